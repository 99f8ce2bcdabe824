#pragma once

#include "fermibox/special_functions.hpp"
#include "fermibox/thermo.hpp"

namespace fermibox {

// Continual description in terms of x = kΛ and ratio = L/Λ. With the
// dimensionless units of the cavity spectrum, Λ = (2πħ²/mT)^{1/2} becomes
// 1/√(πτ) in units of a_*, so ratio = L̃√(πτ) and level j sits at
// x_j = 2πγ_j/ratio.
struct ContinualParams {
  double t = 0.0;
  double ratio = 1.0;
  double lambda = 1.0;

  static ContinualParams from_box(double t, double tau, double box_size);
  /// ratio/2π ≥ 1: the level spacing in x is below one.
  bool continual_valid() const;
};

/// de Broglie wavelength 1/√(πτ) in units of a_*.
double thermal_wavelength(double tau);

/// Continual degeneracy z = (2/π)(ratio·x)².
double continual_degeneracy(double x, double ratio);

/// n(x) solving ψ(z(1-n)+1) - ψ(zn+1) = x²/4π - t with z = continual_degeneracy.
/// At x = 0 (z = 0) the value is 1 if t > 0, else 0. DomainError for x < 0 or ratio ≤ 0.
double continual_population(double x, double t, double ratio);

/// 1/(e^{x²/4π - t} + 1).
double fermi_dirac_population(double x, double t);

struct SupportEndpoints {
  double x1 = 0.0;  // n = 1 for x ≤ x1 (0 if the state never saturates)
  double x2 = 0.0;  // n = 0 for x ≥ x2
};

SupportEndpoints support_endpoints(double t, double ratio);

struct ContinualSums {
  double g2 = 0.0;
  double g4 = 0.0;
  double inv_theta1 = 0.0;
  double d = 0.0;
  double particle_number = 0.0;
  SupportEndpoints support;
};

/// The continual response integrals and particle number. The 1/θ1 integrals
/// run over (x1, x2), where 0 < n < 1; N and d add the saturated core [0, x1].
ContinualSums continual_sums(double t, double ratio);

/// N from the Fermi-Dirac occupation integrated over all x; equals 2 ratio³ Φ_{3/2}(t).
double fermi_dirac_particle_integral(double t, double ratio);

/// Σ z_j n_j over the cavity spectrum at the same (t, ratio).
double discrete_particle_count(double t, double ratio);

struct StonerThermo {
  StonerSet phi;
  double lambda = 0.0;
  double volume = 0.0;
  double tau = 0.0;
  double t = 0.0;
  double grand_potential = 0.0;
  double particle_number = 0.0;
  double pressure_natural = 0.0;  // ε_*/a_*³
  double energy = 0.0;
  double entropy = 0.0;
  double C_V = 0.0;
  double C_p = 0.0;
  double C_p_minus_C_V = 0.0;  // the closed form for the difference
  double alpha_p = 0.0;
  double gamma_T = 0.0;
  double beta_V = 0.0;
  double B_V = 0.0;  // T(∂p/∂T)_V
  double A_V = 0.0;  // T(∂p/∂V)_T

  /// Same conventions as the cavity thermodynamics (pressure as p̃).
  ThermoPoint to_point(double box_size) const;
};

/// Large-volume thermodynamics through Φ_{1/2}, Φ_{3/2}, Φ_{5/2}.
/// DomainError unless τ > 0 and volume > 0.
StonerThermo stoner_thermodynamics(double t, double tau, double volume);

/// Ground-level energy ε₁ = 12π²(a_B/L)² Ry in kelvin, with a_B = 0.53e-8 cm
/// and Ry = 1.6e5 K.
double ground_level_kelvin(double length_cm);

inline constexpr double kBohrRadiusCm = 0.53e-8;
inline constexpr double kRydbergKelvin = 1.6e5;

}  // namespace fermibox
