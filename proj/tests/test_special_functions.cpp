#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <doctest.h>

#include "fermibox/error.hpp"
#include "fermibox/special_functions.hpp"

using namespace fermibox;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Independent Φ_s: double-exponential quadrature of the defining integral.
double phi_oracle(double s, double t) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [s, t](double z) {
    const double e = z - t;
    const double w = e > 0.0 ? std::exp(-e) / (1.0 + std::exp(-e)) : 1.0 / (std::exp(e) + 1.0);
    return std::pow(z, s - 1.0) * w;
  };
  double value = 0.0;
  if (t > 1.0) {
    boost::math::quadrature::exp_sinh<double> tail;
    // Split at the Fermi edge so both pieces are smooth.
    auto g = [&](double u) { return f(t + u); };
    value = boost::math::quadrature::tanh_sinh<double>().integrate(f, 0.0, t) + tail.integrate(g);
  } else {
    value = integrator.integrate(f);
  }
  return value / std::tgamma(s);
}

double index_order(StonerIndex s) { return stoner_order(s); }

}  // namespace

TEST_CASE("log_gamma reference values") {
  CHECK(std::abs(log_gamma(1.0)) < 1e-14);
  CHECK(std::abs(log_gamma(2.0)) < 1e-14);
  CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) < 1e-14);

  double log_factorial = 0.0;
  for (int k = 2; k <= 16; ++k) log_factorial += std::log(static_cast<double>(k));
  CHECK(std::abs(log_gamma(17.0) - log_factorial) < 1e-12);
  CHECK(std::abs(log_gamma(17.0) - 30.67186010608) < 1e-10);
}

TEST_CASE("log_gamma against Boost over the working range") {
  for (double x : {1e-3, 0.01, 0.3, 0.999, 1.5, 7.25, 10.0, 33.3, 1e3, 1e5, 1e6}) {
    CHECK(rel_err(log_gamma(x), boost::math::lgamma(x)) < 1e-13);
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("polygamma exact values at integers") {
  // ψ(n) = -γ + H_{n-1}, ψ'(n) = π²/6 - Σ_{k<n} 1/k², ψ''(n) = -2ζ(3) + 2 Σ_{k<n} 1/k³
  const double zeta3 = 1.2020569031595942854;
  double h1 = 0.0, h2 = 0.0, h3 = 0.0;
  for (int n = 1; n <= 60; ++n) {
    CHECK(std::abs(digamma(n) - (-kEulerGamma + h1)) < 1e-13);
    CHECK(std::abs(trigamma(n) - (std::numbers::pi * std::numbers::pi / 6.0 - h2)) < 1e-13);
    CHECK(std::abs(tetragamma(n) - (-2.0 * zeta3 + 2.0 * h3)) < 1e-13);
    h1 += 1.0 / n;
    h2 += 1.0 / (double(n) * n);
    h3 += 1.0 / (double(n) * n * n);
  }
  CHECK(digamma(2.0) - digamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(digamma(49.0) - 3.881582) < 1e-6);
  CHECK(std::abs(digamma(16.0) - digamma(2.0) - 2.318228993) < 1e-9);
}

TEST_CASE("polygamma against Boost") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> logx(std::log(1e-3), std::log(1e6));
  for (int i = 0; i < 400; ++i) {
    const double x = std::exp(logx(rng));
    CHECK(rel_err(digamma(x), boost::math::digamma(x)) < 1e-12);
    CHECK(rel_err(trigamma(x), boost::math::trigamma(x)) < 1e-12);
    CHECK(rel_err(tetragamma(x), boost::math::polygamma(2, x)) < 1e-11);
  }
}

TEST_CASE("polygamma recurrences and signs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logx(std::log(0.01), std::log(1e4));
  for (int i = 0; i < 500; ++i) {
    const double x = std::exp(logx(rng));
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) < 1e-12 * std::max(1.0, 1.0 / x));
    CHECK(std::abs(trigamma(x + 1.0) - trigamma(x) + 1.0 / (x * x)) < 1e-12 * std::max(1.0, 1.0 / (x * x)));
    CHECK(trigamma(x) > 0.0);
    CHECK(tetragamma(x) < 0.0);
  }
}

TEST_CASE("polygamma derivative consistency") {
  for (double x : {0.05, 0.4, 1.0, 2.5, 9.9, 10.1, 57.0, 900.0}) {
    const double h = 1e-4 * x;
    const double d0 = (digamma(x + h) - digamma(x - h)) / (2 * h);
    const double d1 = (trigamma(x + h) - trigamma(x - h)) / (2 * h);
    CHECK(std::abs(d0 - trigamma(x)) <= 1e-6 * std::max(1.0, trigamma(x)));
    CHECK(std::abs(d1 - tetragamma(x)) <= 1e-6 * std::max(1.0, std::abs(tetragamma(x))));
  }
}

TEST_CASE("polygamma rejects bad input") {
  CHECK_THROWS_AS(polygamma(0, 0.0), DomainError);
  CHECK_THROWS_AS(polygamma(1, -2.0), DomainError);
  CHECK_THROWS_AS(polygamma(3, 1.0), InvalidOrderError);
  CHECK_THROWS_AS(polygamma(-1, 1.0), InvalidOrderError);
}

TEST_CASE("stoner values at t = 0 equal the Dirichlet eta function") {
  for (double s : {0.5, 1.5, 2.5}) {
    const double eta = (1.0 - std::pow(2.0, 1.0 - s)) * boost::math::zeta(s);
    CHECK(rel_err(stoner_phi(s, 0.0), eta) < 1e-12);
  }
  CHECK(std::abs(stoner_phi(1.5, 0.0) - 0.7651470246) < 1e-9);
  CHECK(std::abs(stoner_phi(0.5, 0.0) - 0.6048986434) < 1e-9);
}

TEST_CASE("stoner against independent quadrature") {
  for (double t : {-50.0, -20.0, -5.0, -2.0, -1.0, 0.3, 3.0, 10.0, 14.9, 24.9, 25.0, 60.0, 200.0}) {
    for (double s : {0.5, 1.5, 2.5}) {
      const double ref = phi_oracle(s, t);
      CHECK_MESSAGE(std::abs(stoner_phi(s, t) - ref) <= 1e-9 * ref, "s=" << s << " t=" << t);
    }
  }
}

TEST_CASE("stoner classical limit") {
  CHECK(std::abs(stoner_phi(1.5, -30.0) / std::exp(-30.0) - 1.0) < 1e-9);
}

TEST_CASE("stoner path dispatch and overlap windows") {
  CHECK(stoner_path(-2.0) == StonerPath::Series);
  CHECK(stoner_path(-1.999) == StonerPath::Quadrature);
  CHECK(stoner_path(24.99) == StonerPath::Quadrature);
  CHECK(stoner_path(kStonerSommerfeldMin) == StonerPath::Sommerfeld);
  for (StonerIndex s : {StonerIndex::Half, StonerIndex::ThreeHalf, StonerIndex::FiveHalf}) {
    for (double t = -6.0; t <= -1.0; t += 0.25) {
      const double q = stoner_phi_quadrature(s, t);
      CHECK(std::abs(stoner_phi_series(s, t) - q) <= 1e-9 * q);
    }
    for (double t = 25.0; t <= 60.0; t += 2.5) {
      const double q = stoner_phi_quadrature(s, t);
      CHECK(std::abs(stoner_phi_sommerfeld(s, t) - q) <= 1e-9 * q);
    }
  }
}

TEST_CASE("stoner derivative ladder") {
  const std::pair<StonerIndex, StonerIndex> ladder[] = {{StonerIndex::FiveHalf, StonerIndex::ThreeHalf},
                                                        {StonerIndex::ThreeHalf, StonerIndex::Half}};
  for (double t = -10.0; t <= 50.0; t += 1.7) {
    for (auto [upper, lower] : ladder) {
      const double h = 1e-4 * std::max(1.0, std::abs(t));
      const double d = (stoner_phi(upper, t + h) - stoner_phi(upper, t - h)) / (2 * h);
      const double expect = stoner_phi(lower, t);
      CHECK_MESSAGE(std::abs(d - expect) <= 1e-6 * expect, "s=" << index_order(upper) << " t=" << t);
    }
  }
}

TEST_CASE("stoner monotone and positive") {
  StonerSet prev = stoner_set(-60.0);
  for (double t = -59.5; t <= 200.0; t += 0.5) {
    const StonerSet cur = stoner_set(t);
    CHECK(cur.phi_half > prev.phi_half);
    CHECK(cur.phi_three_half > prev.phi_three_half);
    CHECK(cur.phi_five_half > prev.phi_five_half);
    CHECK(cur.phi_half > 0.0);
    prev = cur;
  }
}

TEST_CASE("stoner degenerate asymptotics") {
  const double pi = std::numbers::pi;
  const double t = 100.0;
  CHECK(stoner_phi_asymptotic(0.5, t) ==
        doctest::Approx(2.0 * std::sqrt(t) / std::sqrt(pi) * (1.0 - pi * pi / (24.0 * t * t))).epsilon(1e-15));
  CHECK(stoner_phi_asymptotic(2.5, t) ==
        doctest::Approx(8.0 * std::pow(t, 2.5) / (15.0 * std::sqrt(pi)) * (1.0 + 5.0 * pi * pi / 80000.0))
            .epsilon(1e-15));
  CHECK(std::abs(stoner_phi_asymptotic(1.5, 40.0) / stoner_phi(1.5, 40.0) - 1.0) < 1e-6);
  for (double tt = 30.0; tt <= 200.0; tt += 10.0) {
    for (double s : {0.5, 1.5, 2.5}) {
      CHECK(std::abs(stoner_phi_asymptotic(s, tt) / stoner_phi(s, tt) - 1.0) <= 1e-5);
    }
  }
  CHECK_THROWS_AS(stoner_phi_asymptotic(1.5, 0.0), DomainError);
}

TEST_CASE("stoner index validation") {
  CHECK_THROWS_AS(stoner_phi(1.0, 0.0), UnsupportedIndexError);
  CHECK_THROWS_AS(stoner_index(3.5), UnsupportedIndexError);
  CHECK(stoner_index(1.5) == StonerIndex::ThreeHalf);
}
