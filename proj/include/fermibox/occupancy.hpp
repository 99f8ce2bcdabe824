#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "fermibox/spectrum.hpp"

namespace fermibox {

// ---------------------------------------------------------------------------
// Finite-degeneracy occupation kernels
//
//   θ(n, z)   = ψ(z(1-n)+1) - ψ(zn+1)
//   θ1(n, z)  = ψ'(z(1-n)+1) + ψ'(zn+1)
//   θ2(n, z)  = ψ''(z(1-n)+1) - ψ''(zn+1)
//
// A level of degeneracy z sits at fractional occupation n where
// θ(n, z) = ε/T - μ/T; dθ/dn = -z θ1.
// ---------------------------------------------------------------------------

/// Checked forms: DomainError unless 0 ≤ n ≤ 1 and z ≥ 1.
double theta(double n, double z);
double theta1(double n, double z);
double theta2(double n, double z);

namespace kernel {
// Unchecked forms for any z > 0 (the continual limit uses z < 1).
double theta(double n, double z);
double theta1(double n, double z);
double theta2(double n, double z);
/// θ(0, z) = ψ(z+1) - ψ(1): half-width of the finite support in x.
double support_half_width(double z);
/// Occupation solving θ(n, z) = x for z > 0; exact 0/1 outside the support.
double solve_population(double z, double x);
}  // namespace kernel

/// Unique n ∈ [0,1] with θ(n, z) = x; exactly 0 for x ≥ θ(0,z) and exactly 1
/// for x ≤ -θ(0,z). DomainError if z < 1 or x is not finite.
double solve_population(double z, double x);

/// Fermi-Dirac occupation with the 1/2z finite-degeneracy correction,
/// clamped to [0,1].
double approx_population(double z, double x);

struct OccupancyState {
  double tau = 0.0;             // T / ε_*
  double t = 0.0;               // μ / T (+∞ for the T = 0 configuration)
  double mu = 0.0;              // μ / ε_*
  double particle_number = 0.0; // N
  std::vector<double> populations;  // n_j for the leading levels; the rest are 0
  SpectrumPtr spectrum;
  bool ground = false;          // T = 0 filling

  double population(std::size_t j) const {
    return j < populations.size() ? populations[j] : 0.0;
  }
  /// Σ z_j n_j
  double total_particles() const;
  /// Number of levels with 0 < n_j < 1.
  std::size_t active_levels() const;
};

/// Levels in energy order until N is reached; the topmost touched level M is
/// partially filled and μ = ε_M. CapacityError if N exceeds the spectrum.
OccupancyState ground_state(SpectrumPtr spectrum, double particle_number);

struct ParticleCount {
  double total = 0.0;        // Σ z_j n_j
  double slope = 0.0;        // dN/dt = Σ_active 1/θ1_j
  std::size_t scanned = 0;   // levels visited
  bool exhausted = false;    // open spectrum ended before the empty-tail bound held
};

/// Evaluates Σ z_j n_j at fixed (τ, t). For open spectra the scan stops at the
/// first level j with γ_j² ≥ τL̃² and ε̃_j/τ - t ≥ θ(0, 4πγ_j²): since
/// z ≤ 4πγ² for every shell, all higher levels are then provably empty.
ParticleCount count_particles(const Spectrum& spectrum, double tau, double t,
                              std::vector<double>* populations = nullptr);

/// Chemical potential t = μ/T with Σ z_j n_j = N to 1e-10 relative.
/// When N(t) has a plateau at N (exactly filled shells), the lower edge is
/// returned, so that τ·t → ε̃_M as τ → 0.
/// BracketFailure if an open spectrum is too short to contain the solution;
/// CapacityError if N exceeds a closed spectrum's capacity.
OccupancyState solve_chemical_potential(SpectrumPtr spectrum, double tau, double particle_number);

/// Builds a spectrum for the model, grows it until the solve succeeds, and
/// routes τ = 0 to ground_state.
OccupancyState solve_state(const CavityModel& model, double box_size, double tau,
                           double particle_number);

/// Ground state on a spectrum large enough for N.
OccupancyState ground_state(const CavityModel& model, double box_size, double particle_number);

}  // namespace fermibox
