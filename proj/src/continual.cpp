#include "fermibox/continual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fermibox/error.hpp"
#include "fermibox/occupancy.hpp"
#include "fermibox/quadrature.hpp"
#include "fermibox/roots.hpp"

namespace fermibox {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr quadrature::Tolerance kTol{1e-10, 0.0, 4000};

double offset(double x, double t) { return x * x / (4.0 * kPi) - t; }

double integral(auto&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  const quadrature::Result r = quadrature::integrate(f, a, b, kTol);
  if (!r.converged) throw QuadratureFailure("continual: quadrature did not converge on [" +
                                            std::to_string(a) + ", " + std::to_string(b) + "]");
  return r.value;
}

void require_ratio(double ratio, const char* what) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw DomainError(std::string(what) + ": ratio L/Lambda must be positive");
  }
}

}  // namespace

ContinualParams ContinualParams::from_box(double t, double tau, double box_size) {
  ContinualParams p;
  p.t = t;
  p.lambda = thermal_wavelength(tau);
  if (!(box_size > 0.0)) throw DomainError("ContinualParams: box size must be positive");
  p.ratio = box_size / p.lambda;
  return p;
}

bool ContinualParams::continual_valid() const { return ratio / (2.0 * kPi) >= 1.0; }

double thermal_wavelength(double tau) {
  if (!(tau > 0.0)) throw DomainError("thermal_wavelength: tau must be positive");
  return 1.0 / std::sqrt(kPi * tau);
}

double continual_degeneracy(double x, double ratio) {
  const double kx = ratio * x;
  return 2.0 / kPi * kx * kx;
}

double continual_population(double x, double t, double ratio) {
  require_ratio(ratio, "continual_population");
  if (!(x >= 0.0)) throw DomainError("continual_population: x must be >= 0");
  if (x == 0.0) return t > 0.0 ? 1.0 : 0.0;
  return kernel::solve_population(continual_degeneracy(x, ratio), offset(x, t));
}

double fermi_dirac_population(double x, double t) { return 1.0 / (std::exp(offset(x, t)) + 1.0); }

SupportEndpoints support_endpoints(double t, double ratio) {
  require_ratio(ratio, "support_endpoints");
  auto half = [ratio](double x) { return kernel::support_half_width(continual_degeneracy(x, ratio)); };
  SupportEndpoints out;

  // n = 1 where offset ≤ -θ(0,z); the left side rises from -t monotonically.
  if (t > 0.0) {
    auto h1 = [&](double x) { return offset(x, t) + half(x); };
    const roots::Bracket b = roots::bisect(h1, 0.0, std::sqrt(4.0 * kPi * t), 1e-15);
    out.x1 = 0.5 * (b.lo + b.hi);
  }

  // n = 0 where offset ≥ θ(0,z). θ(0,z) may outgrow x²/4π near x = 0, so take
  // the last sign change on a grid reaching past the region where it could.
  auto h2 = [&](double x) { return offset(x, t) - half(x); };
  double xmax = 2.0 * std::max(4.0, std::sqrt(4.0 * kPi * std::max(t, 0.0)));
  while (h2(xmax) <= 0.0 || offset(xmax, t) < std::log1p(continual_degeneracy(xmax, ratio)) + 1.0) xmax *= 2.0;
  constexpr int kGrid = 4000;
  double last_neg = -1.0;
  for (int i = kGrid; i >= 0; --i) {
    const double x = xmax * i / kGrid;
    if (h2(x) <= 0.0) {
      last_neg = x;
      break;
    }
  }
  if (last_neg < 0.0) {
    out.x2 = 0.0;
    return out;
  }
  const roots::Bracket b = roots::bisect(h2, last_neg, std::min(xmax, last_neg + xmax / kGrid), 1e-15);
  out.x2 = 0.5 * (b.lo + b.hi);
  out.x1 = std::min(out.x1, out.x2);
  return out;
}

ContinualSums continual_sums(double t, double ratio) {
  require_ratio(ratio, "continual_sums");
  ContinualSums out;
  out.support = support_endpoints(t, ratio);
  const double x1 = out.support.x1;
  const double x2 = out.support.x2;

  auto n_at = [&](double x) { return kernel::solve_population(continual_degeneracy(x, ratio), offset(x, t)); };
  auto inv_t1 = [&](double x) {
    const double z = continual_degeneracy(x, ratio);
    const double n = kernel::solve_population(z, offset(x, t));
    if (!(n > 0.0 && n < 1.0)) return 0.0;
    return 1.0 / kernel::theta1(n, z);
  };

  const double i0 = integral(inv_t1, x1, x2);
  const double i2 = integral([&](double x) { return x * x * inv_t1(x); }, x1, x2);
  const double i4 = integral([&](double x) { return x * x * x * x * inv_t1(x); }, x1, x2);
  const double n2 = std::pow(x1, 3) / 3.0 + integral([&](double x) { return x * x * n_at(x); }, x1, x2);
  const double n4 = std::pow(x1, 5) / 5.0 + integral([&](double x) { return std::pow(x, 4) * n_at(x); }, x1, x2);

  const double two_pi = 2.0 * kPi;
  out.inv_theta1 = ratio / two_pi * i0;
  out.g2 = std::pow(ratio / two_pi, 3) * i2;
  out.g4 = std::pow(ratio / two_pi, 5) * i4;
  out.d = std::pow(ratio, 5) / (4.0 * std::pow(kPi, 4)) * n4;
  out.particle_number = std::pow(ratio, 3) / (kPi * kPi) * n2;
  return out;
}

double fermi_dirac_particle_integral(double t, double ratio) {
  require_ratio(ratio, "fermi_dirac_particle_integral");
  // Beyond offset = 745 the occupation underflows to zero.
  const double xmax = std::sqrt(4.0 * kPi * (std::max(t, 0.0) + 745.0));
  const double peak = std::sqrt(4.0 * kPi * std::max(t, 0.0));
  auto f = [t](double x) { return x * x * fermi_dirac_population(x, t); };
  double total = 0.0;
  if (peak > 0.0) total += integral(f, 0.0, peak);
  total += integral(f, peak, peak + 20.0);
  total += integral(f, peak + 20.0, xmax);
  return std::pow(ratio, 3) / (kPi * kPi) * total;
}

double discrete_particle_count(double t, double ratio) {
  require_ratio(ratio, "discrete_particle_count");
  // τ = 1 gives Λ = 1/√π, hence L̃ = ratio/√π.
  const double box = ratio / std::sqrt(kPi);
  std::int64_t g = static_cast<std::int64_t>(std::ceil(4.0 * box * box * (std::max(t, 0.0) + 10.0))) + 64;
  for (int attempt = 0; attempt < 12; ++attempt, g *= 2) {
    const auto spectrum = make_spectrum(CavityModel::full(), box, g);
    const ParticleCount c = count_particles(*spectrum, 1.0, t);
    if (!c.exhausted) return c.total;
  }
  throw BracketFailure("discrete_particle_count: spectrum growth limit reached");
}

StonerThermo stoner_thermodynamics(double t, double tau, double volume) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("stoner_thermodynamics: tau must be positive");
  if (!(volume > 0.0)) throw DomainError("stoner_thermodynamics: volume must be positive");
  if (!std::isfinite(t)) throw DomainError("stoner_thermodynamics: t must be finite");
  StonerThermo s;
  s.phi = stoner_set(t);
  s.tau = tau;
  s.t = t;
  s.volume = volume;
  s.lambda = thermal_wavelength(tau);
  const double p1 = s.phi.phi_half;
  const double p3 = s.phi.phi_three_half;
  const double p5 = s.phi.phi_five_half;
  const double cells = volume / std::pow(s.lambda, 3);  // V/Λ³
  const double r = p1 * p5 / (p3 * p3);

  s.grand_potential = -2.0 * tau * cells * p5;
  s.particle_number = 2.0 * cells * p3;
  s.pressure_natural = 2.0 * tau * p5 / std::pow(s.lambda, 3);
  s.energy = 3.0 * tau * cells * p5;
  s.entropy = 2.0 * cells * (2.5 * p5 - t * p3);
  s.C_V = 7.5 * cells * p3 * p3 / p1 * (r - 0.6);
  s.C_p = 12.5 * cells * p5 * (r - 0.6);
  s.C_p_minus_C_V = 12.5 * cells * p3 * p3 / p1 * (r - 0.6) * (r - 0.6);
  s.alpha_p = 2.5 / tau * (r - 0.6);
  s.gamma_T = std::pow(s.lambda, 3) * p1 / (2.0 * tau * p3 * p3);
  s.beta_V = 2.5 / tau * (r - 0.6) / r;
  s.B_V = tau * s.beta_V * s.pressure_natural;
  s.A_V = -tau / (volume * s.gamma_T);
  return s;
}

ThermoPoint StonerThermo::to_point(double box_size) const {
  ThermoPoint p;
  p.tau = tau;
  p.t = t;
  p.particle_number = particle_number;
  p.box_size = box_size;
  p.mu = t * tau;
  p.entropy = entropy;
  p.energy = energy;
  p.pressure = pressure_natural / kPressureScale;
  p.grand_potential = grand_potential;
  p.B_T = C_V;
  p.B_V = B_V;
  p.A_V = A_V;
  p.C_V = C_V;
  p.C_p = C_p;
  p.alpha_p = alpha_p;
  p.gamma_T = gamma_T;
  p.beta_V = beta_V;
  p.stable = A_V < 0.0 && C_V > 0.0;
  p.frozen = false;
  return p;
}

double ground_level_kelvin(double length_cm) {
  if (!(length_cm > 0.0) || !std::isfinite(length_cm)) {
    throw DomainError("ground_level_kelvin: length must be positive");
  }
  const double ratio = kBohrRadiusCm / length_cm;
  return 12.0 * kPi * kPi * ratio * ratio * kRydbergKelvin;
}

}  // namespace fermibox
