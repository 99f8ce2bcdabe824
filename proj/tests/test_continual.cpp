#include <cmath>
#include <numbers>

#include <doctest.h>

#include "fermibox/continual.hpp"
#include "fermibox/error.hpp"
#include "fermibox/occupancy.hpp"

using namespace fermibox;

namespace {

constexpr double kPi = std::numbers::pi;

double offset(double x, double t) { return x * x / (4.0 * kPi) - t; }

}  // namespace

TEST_CASE("thermal wavelength and ratio") {
  // Λ² = 2πħ²/(mT); with ħ²/(2m a_*²) = ε_* and T = τ ε_*, Λ²/a_*² = 1/(πτ).
  for (double tau : {0.1, 1.0, 7.0}) {
    const double lambda = thermal_wavelength(tau);
    CHECK(lambda * lambda * kPi * tau == doctest::Approx(1.0).epsilon(1e-15));
  }
  const ContinualParams p = ContinualParams::from_box(0.5, 2.0, 3.0);
  CHECK(p.ratio == doctest::Approx(3.0 * std::sqrt(2.0 * kPi)).epsilon(1e-15));
  CHECK(p.continual_valid());
  CHECK_FALSE(ContinualParams::from_box(0.5, 0.1, 1.0).continual_valid());
  CHECK_THROWS_AS(thermal_wavelength(0.0), DomainError);
}

TEST_CASE("support endpoints at t = 1.4, ratio = 3") {
  const SupportEndpoints e = support_endpoints(1.4, 3.0);
  CHECK(std::abs(e.x1 - 0.55) < 0.01);
  CHECK(std::abs(e.x2 - 10.26) < 0.01);
  const double z1 = continual_degeneracy(e.x1, 3.0);
  const double z2 = continual_degeneracy(e.x2, 3.0);
  CHECK(std::abs(theta(1.0, z1) - offset(e.x1, 1.4)) < 1e-10);
  CHECK(std::abs(theta(0.0, z2) - offset(e.x2, 1.4)) < 1e-10);
  CHECK(continual_population(0.9 * e.x1, 1.4, 3.0) == 1.0);
  CHECK(continual_population(1.1 * e.x2, 1.4, 3.0) == 0.0);
  CHECK(continual_population(0.5 * (e.x1 + e.x2), 1.4, 3.0) > 0.0);
  CHECK(continual_population(0.5 * (e.x1 + e.x2), 1.4, 3.0) < 1.0);
}

TEST_CASE("negative t never saturates") {
  for (double t : {-0.5, -5.0, -40.0}) {
    const SupportEndpoints e = support_endpoints(t, 3.0);
    CHECK(e.x1 == 0.0);
    CHECK(continual_population(e.x2 + 0.1, t, 3.0) == 0.0);
  }
  CHECK(support_endpoints(-0.5, 3.0).x2 > 0.0);
  // Deep in the classical region the small-z cap keeps the level empty everywhere.
  CHECK(support_endpoints(-40.0, 3.0).x2 == 0.0);
  const ContinualSums s = continual_sums(-40.0, 3.0);
  CHECK(s.particle_number < 1e-15);
  CHECK(s.d < 1e-15);
  CHECK(s.g2 < 1e-15);
}

TEST_CASE("half filling where the offset vanishes") {
  for (double t : {0.5, 2.0, 9.0}) {
    for (double ratio : {2.0, 10.0, 60.0}) {
      const double x = std::sqrt(4.0 * kPi * t);
      CHECK(std::abs(continual_population(x, t, ratio) - 0.5) < 1e-12);
    }
  }
}

TEST_CASE("x = 0 takes the two-state rule") {
  CHECK(continual_population(0.0, 0.3, 5.0) == 1.0);
  CHECK(continual_population(0.0, -0.3, 5.0) == 0.0);
  CHECK_THROWS_AS(continual_population(-1.0, 0.0, 5.0), DomainError);
  CHECK_THROWS_AS(continual_population(1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("large ratio recovers Fermi-Dirac") {
  for (double x : {0.5, 2.0, 4.0, 6.0}) {
    const double fd = fermi_dirac_population(x, 1.4);
    CHECK(std::abs(continual_population(x, 1.4, 1e4) - fd) < 1e-4);
  }
}

TEST_CASE("deviation from Fermi-Dirac") {
  double previous = HUGE_VAL;
  for (double ratio : {3.0, 10.0, 30.0, 100.0}) {
    const SupportEndpoints e = support_endpoints(1.4, ratio);
    double worst = 0.0;
    for (int i = 1; i <= 2000; ++i) {
      const double x = e.x2 * i / 2000.0;
      worst = std::max(worst, std::abs(continual_population(x, 1.4, ratio) - fermi_dirac_population(x, 1.4)));
    }
    CHECK(worst < previous);
    previous = worst;
    if (e.x1 > 0.0) {
      const double x = 0.5 * e.x1;
      CHECK(std::abs((continual_population(x, 1.4, ratio) - fermi_dirac_population(x, 1.4)) -
                     (1.0 - fermi_dirac_population(x, 1.4))) < 1e-15);
    }
    const double beyond = 1.2 * e.x2;
    CHECK(continual_population(beyond, 1.4, ratio) == 0.0);
    CHECK(std::abs(fermi_dirac_population(beyond, 1.4) - std::abs(continual_population(beyond, 1.4, ratio) -
                                                                  fermi_dirac_population(beyond, 1.4))) < 1e-15);
  }
}

TEST_CASE("Fermi-Dirac particle integral equals the Stoner closed form") {
  for (double t : {-8.0, -1.0, 0.0, 1.4, 12.0, 40.0}) {
    for (double ratio : {3.0, 20.0}) {
      const double ref = 2.0 * std::pow(ratio, 3) * stoner_phi(1.5, t);
      CHECK(std::abs(fermi_dirac_particle_integral(t, ratio) / ref - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("continual sums approach the Fermi-Dirac values") {
  const double t = 1.4;
  double previous = HUGE_VAL;
  for (double ratio : {10.0, 30.0, 100.0}) {
    const ContinualSums s = continual_sums(t, ratio);
    const double n_fd = 2.0 * std::pow(ratio, 3) * stoner_phi(1.5, t);
    const double gap = std::abs(s.particle_number / n_fd - 1.0);
    CHECK(gap < previous);
    previous = gap;
    // Ẽ = d/L̃² with L̃ = ratio/√π at τ = 1, and E = 3 T (V/Λ³) Φ_{5/2}.
    const double energy = s.d / (ratio * ratio / kPi);
    const double e_fd = 3.0 * std::pow(ratio, 3) * stoner_phi(2.5, t);
    CHECK(std::abs(energy / e_fd - 1.0) < 0.05);
  }
  CHECK(previous < 0.01);
}

TEST_CASE("discrete sum converges toward the continual integral") {
  double previous = HUGE_VAL;
  for (double ratio : {10.0, 30.0, 100.0}) {
    const double discrete = discrete_particle_count(1.4, ratio);
    const double continual = continual_sums(1.4, ratio).particle_number;
    const double gap = std::abs(discrete / continual - 1.0);
    MESSAGE("ratio " << ratio << ": relative gap " << gap);
    CHECK(gap < previous);
    previous = gap;
  }
}

TEST_CASE("Stoner classical limit") {
  const StonerThermo s = stoner_thermodynamics(-30.0, 2.0, 50.0);
  CHECK(std::abs(s.C_V / s.particle_number - 1.5) < 1e-9);
  CHECK(std::abs(s.pressure_natural * s.volume / (s.particle_number * s.tau) - 1.0) < 1e-9);
  CHECK(std::abs(s.C_p / s.particle_number - 2.5) < 1e-9);
}

TEST_CASE("Stoner degenerate limit against asymptotic substitution") {
  const double t = 100.0;
  const double tau = 1.5;
  const double volume = 8.0;
  const StonerThermo s = stoner_thermodynamics(t, tau, volume);
  const double p1 = stoner_phi_asymptotic(0.5, t);
  const double p3 = stoner_phi_asymptotic(1.5, t);
  const double p5 = stoner_phi_asymptotic(2.5, t);
  const double cells = volume * std::pow(kPi * tau, 1.5);
  const double r = p1 * p5 / (p3 * p3);
  auto close = [](double a, double b) { return std::abs(a / b - 1.0) < 1e-5; };
  CHECK(close(s.particle_number, 2.0 * cells * p3));
  CHECK(close(s.energy, 3.0 * tau * cells * p5));
  CHECK(close(s.pressure_natural, 2.0 * tau * p5 * std::pow(kPi * tau, 1.5)));
  CHECK(close(s.gamma_T, p1 / (2.0 * tau * p3 * p3 * std::pow(kPi * tau, 1.5))));
  CHECK(r > 0.6);
  // S, C_V, C_p and α_p cancel at leading order; compare with the Sommerfeld
  // results S = C_V = (π²/2) N/t, C_p/C_V → 1 and α_p = π²/(2τt²).
  const double sommerfeld = kPi * kPi / 2.0 * s.particle_number / t;
  CHECK(std::abs(s.entropy / sommerfeld - 1.0) < 1e-3);
  CHECK(std::abs(s.C_V / sommerfeld - 1.0) < 1e-3);
  CHECK(std::abs(s.C_p / s.C_V - 1.0) < 1e-3);
  CHECK(std::abs(s.alpha_p / (kPi * kPi / (2.0 * tau * t * t)) - 1.0) < 1e-3);
}

TEST_CASE("Stoner identities") {
  for (double t = -10.0; t <= 100.0; t += 2.75) {
    const StonerThermo s = stoner_thermodynamics(t, 0.8, 20.0);
    const double mu = t * s.tau;
    CHECK(std::abs(s.entropy - (s.energy - mu * s.particle_number - s.grand_potential) / s.tau) <=
          1e-10 * s.entropy);
    CHECK(std::abs(s.grand_potential + s.pressure_natural * s.volume) <= 1e-12 * std::abs(s.grand_potential));
    CHECK(std::abs(s.energy - 1.5 * s.pressure_natural * s.volume) <= 1e-12 * s.energy);
    const double via_coeffs = s.volume * s.tau * s.alpha_p * s.alpha_p / s.gamma_T;
    CHECK(std::abs((s.C_p - s.C_V) - via_coeffs) <= 1e-10 * via_coeffs);
    CHECK(std::abs((s.C_p - s.C_V) - s.C_p_minus_C_V) <= 1e-10 * s.C_p_minus_C_V);
    CHECK(std::abs(s.alpha_p - s.pressure_natural * s.beta_V * s.gamma_T) <= 1e-10 * std::abs(s.alpha_p));
    const ThermoPoint p = s.to_point(std::cbrt(s.volume));
    CHECK(p.stable);
    CHECK(std::abs((p.C_p - p.C_V) + p.B_V * p.B_V / p.A_V) <= 1e-10 * s.C_p_minus_C_V);
  }
  CHECK_THROWS_AS(stoner_thermodynamics(0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(stoner_thermodynamics(0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("Stoner response derivatives") {
  // C_V = T (∂S/∂T) at fixed N and V.
  const double tau = 1.2, volume = 30.0;
  const StonerThermo s = stoner_thermodynamics(2.0, tau, volume);
  auto t_at = [&](double tt) {
    // Solve 2 V (πτ)^{3/2} Φ_{3/2}(t) = N for t by bisection.
    double lo = -40.0, hi = 200.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (stoner_thermodynamics(mid, tt, volume).particle_number < s.particle_number) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double h = 1e-5 * tau;
  const StonerThermo a = stoner_thermodynamics(t_at(tau - h), tau - h, volume);
  const StonerThermo b = stoner_thermodynamics(t_at(tau + h), tau + h, volume);
  CHECK(std::abs(tau * (b.entropy - a.entropy) / (2 * h) / s.C_V - 1.0) < 1e-6);
  CHECK(std::abs(tau * (b.pressure_natural - a.pressure_natural) / (2 * h) / s.B_V - 1.0) < 1e-6);
}

TEST_CASE("ground level energy in kelvin") {
  CHECK(std::abs(ground_level_kelvin(2.5e-5) - 1.0) < 0.2);
  CHECK(ground_level_kelvin(kBohrRadiusCm) == doctest::Approx(12.0 * kPi * kPi * 1.6e5).epsilon(1e-14));
  CHECK(std::abs(ground_level_kelvin(kBohrRadiusCm / 0.2e-3) - 1.0) < 0.3);
  CHECK_THROWS_AS(ground_level_kelvin(0.0), DomainError);
}
