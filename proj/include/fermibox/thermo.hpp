#pragma once

#include <cstddef>
#include <numbers>
#include <string_view>

#include "fermibox/occupancy.hpp"

namespace fermibox {

// Unit system: energies and temperature in ε_* = (ħ²/2m)(2π/a_*)², lengths in
// a_*, k_B = 1. Pressure is reported as p̃ = p/p_* with
// p_* = 2π^{3/2} ε_*/a_*³. The response sums B_T, B_V, A_V and the
// coefficients α_p, γ_T, β_V use ε_* = a_* = 1 directly (so γ_T is in
// a_*³/ε_* and β_V is per unit τ).
inline constexpr double kPressureScale = 2.0 * std::numbers::pi * 1.7724538509055160273;  // 2π^{3/2}
inline constexpr std::string_view kUnitsNote =
    "energy, temperature, mu: eps_*; length: a_*; pressure: p_* = 2 pi^{3/2} eps_*/a_*^3; "
    "B_T, B_V, A_V, alpha_p, gamma_T, beta_V: eps_* = a_* = 1, k_B = 1";

struct ThermoPoint {
  double tau = 0.0;
  double t = 0.0;
  double particle_number = 0.0;
  double box_size = 1.0;
  double mu = 0.0;
  double entropy = 0.0;
  double energy = 0.0;           // Ẽ = E/ε_*
  double pressure = 0.0;         // p̃ = p/p_*
  double grand_potential = 0.0;  // Ω̃ = Ẽ - τS - μ̃N
  double B_T = 0.0;
  double B_V = 0.0;
  double A_V = 0.0;
  double C_V = 0.0;
  double C_p = 0.0;
  double alpha_p = 0.0;
  double gamma_T = 0.0;
  double beta_V = 0.0;
  bool stable = true;
  bool frozen = false;

  double volume() const { return box_size * box_size * box_size; }
  /// p in ε_*/a_*³, the pressure entering γ_T and β_V.
  double pressure_natural() const { return pressure * kPressureScale; }
};

/// S_j = lnΓ(z+1) - lnΓ(zn+1) - lnΓ(z(1-n)+1); zero at n ∈ {0,1}.
double level_entropy(double n, double z);

/// S = Σ_j S_j.
double entropy(const OccupancyState& state);

struct EnergyPressure {
  double energy = 0.0;    // Σ ε̃_j z_j n_j
  double pressure = 0.0;  // p̃ = d / (3π^{3/2} L̃⁵), d = Σ γ_j² z_j n_j
};

EnergyPressure energy_pressure(const OccupancyState& state);

struct ResponseSums {
  double g2 = 0.0;          // Σ γ_j² / θ1_j
  double g4 = 0.0;          // Σ γ_j⁴ / θ1_j
  double inv_theta1 = 0.0;  // Σ 1 / θ1_j
  double d = 0.0;           // Σ γ_j² z_j n_j (all levels)
  double G = 0.0;           // g4 - g2² / inv_theta1
  double B_T = 0.0;
  double B_V = 0.0;
  double A_V = 0.0;
  std::size_t active = 0;   // levels entering g2, g4, 1/θ1
};

/// Response sums over the partially filled levels (0 < n_j < 1); full and
/// empty levels have dn_j = 0 and drop out. Requires τ > 0.
ResponseSums response_sums(const OccupancyState& state);

/// C_V = B_T, C_p = B_T - B_V²/A_V, α_p = -B_V/(V A_V), γ_T = -T/(V A_V),
/// β_V = B_V/(pT). stable = (B_T > 0 and A_V < 0).
ThermoPoint heat_capacities_and_coefficients(const OccupancyState& state, const ResponseSums& sums);

/// Full evaluation of a solved state. A T = 0 state is reported frozen.
ThermoPoint evaluate(const OccupancyState& state);

/// The T = 0 configuration held at temperature τ: C_V = C_p = 0,
/// α_p = β_V = 0, γ_T = 3/(5p), frozen = true.
ThermoPoint frozen_point(const OccupancyState& ground, double tau);

}  // namespace fermibox
