#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fermibox/occupancy.hpp"
#include "fermibox/thermo.hpp"

namespace fermibox {

/// The three lowest shells of the cavity: (γ², z) = (3,16), (6,48), (9,48).
struct BottomShells {
  static constexpr double g1 = 3.0, g2 = 6.0, g3 = 9.0;
  static constexpr double z1 = 16.0, z2 = 48.0, z3 = 48.0;
};

struct ZConstants {
  double Z0 = 0.0;
  double Z1 = 0.0;
  double Z2 = 0.0;
};

/// Ground band, level 2 empty and level 1 at N/z1:
///   Z0 = θ(0,z2) - θ(N/z1,z1), Z1 = θ1(0,z2) + θ1(N/z1,z1), Z2 = θ2(0,z2) - θ2(N/z1,z1).
/// DomainError unless 0 < N ≤ z1.
ZConstants z_constants(double particle_number);

/// Same combinations at arbitrary populations (n1, n2) of levels 1 and 2.
ZConstants z_constants_starred(double n1, double n2);

/// Onset of ground → second level transitions, τ₀ = (γ2² - γ1²)/(L̃² Z0).
double tau0(double particle_number, double box_size);

struct TauStar {
  double tau_star = 0.0;        // from τ_* = (γ2²-γ1²)/(L̃² Z̃0)
  double tau_star_alt = 0.0;    // from τ_* = (2/5)(γ2²-γ1²)²/(L̃² Z̃1 d̃_*)
  double n1 = 0.0;
  double n2 = 0.0;
  double alpha = 0.0;           // z1 n1/N = cos²α, z2 n2/N = sin²α
};

/// Instability temperature and post-jump populations for N_m ≤ N ≤ N_*,
/// solved by bisection on α ∈ [0, π/2]. NoSolutionError outside that range.
TauStar tau_star_small_N(double particle_number, double box_size);

struct CriticalNumbers {
  double N_m = 0.0;     // below: ground state at every temperature
  double N_star = 0.0;  // A_V(τ₀) = 0
  double N_c = 0.0;     // τ₀₁ diverges; +∞ when the model has no such limit
  double N_c1 = 0.0;    // τ_{1→2} = τ_{2→3}
};

/// N_m, N_* and N_c1 depend only on the bottom shells. N_c is the particle
/// number at which, for τ → ∞, the ground level sits exactly at its emptying
/// threshold; it is finite only for truncated models.
CriticalNumbers critical_numbers(const CavityModel& model = CavityModel::truncated(4));

/// Process-wide constants N_m and N_* (computed once, immutable).
const CriticalNumbers& ground_band_criticals();

/// Discontinuities of state functions at an onset (value above minus below).
/// Entries are absent where the quantity diverges instead.
struct JumpSet {
  std::optional<double> S, E, p, C_V, C_p, alpha_p, gamma_T, beta_V;
};

struct Tau0Jumps {
  double tau0 = 0.0;
  ZConstants z;
  double A2 = 0.0;
  JumpSet jumps;
  // Values at τ₀ + 0.
  double S0 = 0.0, E0 = 0.0, p0 = 0.0;
  double C_V0 = 0.0, C_p0 = 0.0, alpha_p0 = 0.0, gamma_T0 = 0.0, beta_V0 = 0.0;
};

/// DomainError unless N_* < N ≤ z1.
Tau0Jumps jumps_at_tau0(double particle_number, double box_size);

/// Linear slopes (Θ - Θ₀)/Θ₀ = K Δτ/τ₀ just above τ₀.
struct SlopeCoefficients {
  double K_S = 0.0, K_p = 0.0, K_CV = 0.0, K_Cp = 0.0;
  double K_alpha_p = 0.0, K_gamma_T = 0.0, K_beta_V = 0.0;
  double A1 = 0.0, A2 = 0.0;
};

/// DomainError unless N_* < N ≤ z1.
SlopeCoefficients slope_coefficients(double particle_number);

struct TauStarJumps {
  TauStar star;
  ZConstants z;             // tilde constants at the starred populations
  double A1 = 0.0;          // Ã1
  JumpSet jumps;            // E, p, S, C_V, beta_V; the divergent ones absent
  // C_p ≈ C_p_regular + C_p_amplitude τ_*/(τ-τ_*), likewise α_p and γ_T.
  double C_p_regular = 0.0;
  double C_p_amplitude = 0.0;
  double alpha_p_amplitude = 0.0;
  double gamma_T_amplitude = 0.0;
};

/// DomainError unless N_m ≤ N < N_*.
TauStarJumps jumps_at_tau_star(double particle_number, double box_size);

struct BandOnsets {
  // Raw closed-form values; a non-positive value means that channel never opens.
  double tau_1to2 = 0.0;
  double tau_2to3 = 0.0;
  double active = 0.0;  // the lower positive one
};

/// For z1 < N ≤ z1 + z2. DomainError otherwise.
BandOnsets band_onsets(double particle_number, double box_size);

/// Temperature at which the given (1-based) level first starts to fill, found
/// by bisection on the full chemical-potential solver. Absent for levels that
/// are occupied at T = 0 or that stay empty up to τL̃² = scaled_tau_max.
std::optional<double> level_onset(std::size_t level, double particle_number, double box_size,
                                  const CavityModel& model, double scaled_tau_max = 200.0);

/// Temperature at which n₁ reaches 0. Absent for N ≥ N_c, or (full model)
/// when no depletion occurs up to τL̃² = scaled_tau_max.
std::optional<double> tau_ground_depletion(double particle_number, double box_size,
                                           const CavityModel& model = CavityModel::truncated(4),
                                           double scaled_tau_max = 1e6);

enum class FrozenReason { None, BelowOnset, Unstable, AlwaysGround };
std::string to_string(FrozenReason reason);

struct EquilibriumPoint {
  ThermoPoint point;
  OccupancyState state;
  FrozenReason reason = FrozenReason::None;
};

/// Thermodynamic state at (τ, N, L̃) including the small-N stability rules:
/// N < N_m stays in the ground state; N_m ≤ N < N_* stays there until τ_*.
EquilibriumPoint equilibrium_point(const CavityModel& model, double box_size, double tau,
                                   double particle_number);

enum class OnsetKind { Tau0, TauStar, Tau1To2, Tau2To3, Tau01, LevelOnset };
std::string to_string(OnsetKind kind);

struct OnsetReport {
  OnsetKind kind = OnsetKind::Tau0;
  std::size_t level = 0;  // for LevelOnset
  double tau = 0.0;
  std::vector<double> populations_before;
  std::vector<double> populations_after;
  JumpSet jumps;
  std::optional<SlopeCoefficients> slopes;
};

/// Every onset that applies to (N, L̃): closed forms where the bottom-band
/// analysis covers N, full-solver level onsets for the first `level_limit`
/// levels, and the ground-level depletion temperature.
std::vector<OnsetReport> onset_reports(double particle_number, double box_size,
                                       const CavityModel& model, std::size_t level_limit = 6);

}  // namespace fermibox
