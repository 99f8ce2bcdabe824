#include <cmath>
#include <future>
#include <random>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <doctest.h>

#include "fermibox/error.hpp"
#include "fermibox/occupancy.hpp"

using namespace fermibox;

TEST_CASE("theta kernels against Boost digamma") {
  for (double z : {1.0, 16.0, 48.0, 96.0}) {
    for (double n : {0.0, 0.01, 0.25, 0.5, 0.75, 1.0}) {
      const double ref = boost::math::digamma(z * (1 - n) + 1) - boost::math::digamma(z * n + 1);
      CHECK(std::abs(theta(n, z) - ref) < 1e-12);
      const double ref1 = boost::math::trigamma(z * (1 - n) + 1) + boost::math::trigamma(z * n + 1);
      CHECK(std::abs(theta1(n, z) - ref1) < 1e-12);
    }
  }
  CHECK(std::abs(theta(0.0, 48.0) - 4.458797) < 1e-6);
}

TEST_CASE("theta symmetry and derivative") {
  for (double z : {1.0, 16.0, 48.0}) {
    CHECK(theta(0.5, z) == doctest::Approx(0.0).epsilon(1e-15));
    for (double n : {0.05, 0.3, 0.61, 0.9}) {
      CHECK(std::abs(theta(n, z) + theta(1.0 - n, z)) < 1e-13);
      CHECK(std::abs(theta2(n, z) + theta2(1.0 - n, z)) < 1e-12);
      const double h = 1e-6;
      const double d = (theta(n + h, z) - theta(n - h, z)) / (2 * h);
      CHECK(std::abs(d + z * theta1(n, z)) < 1e-6 * z * theta1(n, z));
      const double d1 = (theta1(n + h, z) - theta1(n - h, z)) / (2 * h);
      CHECK(std::abs(d1 + z * theta2(n, z)) < 1e-5 * std::max(1.0, std::abs(z * theta2(n, z))));
    }
  }
}

TEST_CASE("theta argument checks") {
  CHECK_THROWS_AS(theta(-0.1, 16.0), DomainError);
  CHECK_THROWS_AS(theta(1.1, 16.0), DomainError);
  CHECK_THROWS_AS(theta1(0.5, 0.5), DomainError);
  CHECK_THROWS_AS(solve_population(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(solve_population(16.0, NAN), DomainError);
}

TEST_CASE("population solve inverts theta") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (double z : {1.0, 2.0, 16.0, 48.0, 96.0, 1000.0}) {
    for (int i = 0; i < 200; ++i) {
      const double n = un(rng);
      const double x = theta(n, z);
      CHECK(std::abs(solve_population(z, x) - n) < 1e-10);
    }
  }
  CHECK(solve_population(16.0, 0.0) == 0.5);
}

TEST_CASE("finite support is exact") {
  for (double z : {1.0, 16.0, 48.0}) {
    const double w = theta(0.0, z);
    CHECK(solve_population(z, w) == 0.0);
    CHECK(solve_population(z, w + 1e-3) == 0.0);
    CHECK(solve_population(z, -w) == 1.0);
    CHECK(solve_population(z, -w - 5.0) == 1.0);
    CHECK(solve_population(z, w * (1 - 1e-9)) > 0.0);
    CHECK(solve_population(z, -w * (1 - 1e-9)) < 1.0);
  }
}

TEST_CASE("large degeneracy approaches Fermi-Dirac") {
  for (double x : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
    const double fd = 1.0 / (std::exp(x) + 1.0);
    const double n = solve_population(1e6, x);
    CHECK(std::abs(n - fd) < 1e-5);
    CHECK(std::abs(approx_population(1e3, x) - solve_population(1e3, x)) < 1e-5);
  }
}

TEST_CASE("ground state filling") {
  const auto spectrum = make_spectrum(CavityModel::full(), 1.0, 64);
  const OccupancyState one = ground_state(spectrum, 1.0);
  REQUIRE(one.populations.size() == 1);
  CHECK(one.populations[0] == 1.0 / 16.0);
  CHECK(one.mu == 3.0);

  const OccupancyState s = ground_state(spectrum, 70.0);
  REQUIRE(s.populations.size() == 3);
  CHECK(s.populations[0] == 1.0);
  CHECK(s.populations[1] == 1.0);
  CHECK(s.populations[2] == doctest::Approx(6.0 / 48.0));
  CHECK(s.mu == 9.0);

  CHECK_THROWS_AS(ground_state(make_spectrum(CavityModel::truncated(2), 1.0, 0), 65.0), CapacityError);
}

TEST_CASE("chemical potential reproduces N") {
  for (double n : {0.05, 1.0, 7.5, 16.0, 40.0, 150.0}) {
    for (double tau : {0.3, 2.0, 12.0}) {
      const OccupancyState s = solve_state(CavityModel::full(), 1.0, tau, n);
      CHECK(std::abs(s.total_particles() - n) <= 1e-10 * n);
      CHECK(s.mu == doctest::Approx(s.t * tau));
    }
  }
}

TEST_CASE("full and truncated spectra agree while upper levels are empty") {
  const OccupancyState a = solve_state(CavityModel::full(), 1.0, 1.0, 1.0);
  const OccupancyState b = solve_state(CavityModel::truncated(4), 1.0, 1.0, 1.0);
  CHECK(a.t == doctest::Approx(b.t).epsilon(1e-12));
  for (std::size_t j = 0; j < 4; ++j) CHECK(a.population(j) == doctest::Approx(b.population(j)).epsilon(1e-12));
}

TEST_CASE("chemical potential increases with N") {
  double previous = -HUGE_VAL;
  for (double n = 0.5; n <= 100.0; n += 3.5) {
    const double t = solve_state(CavityModel::full(), 1.0, 3.0, n).t;
    CHECK(t > previous);
    previous = t;
  }
}

TEST_CASE("closed shell takes the plateau edge") {
  // N = 16 fills the ground level exactly: μ = T t tends to ε₁ as T → 0.
  for (double tau : {0.05, 0.01}) {
    const OccupancyState s = solve_state(CavityModel::full(), 1.0, tau, 16.0);
    CHECK(s.population(0) == 1.0);
    CHECK(std::abs(s.mu - 3.0) < 4.0 * tau);
  }
}

TEST_CASE("zero temperature routes to the ground state") {
  const OccupancyState s = solve_state(CavityModel::full(), 1.0, 0.0, 3.0);
  CHECK(s.ground);
  CHECK(s.populations[0] == 3.0 / 16.0);
  CHECK_THROWS_AS(solve_chemical_potential(make_spectrum(CavityModel::full(), 1.0, 64), -1.0, 1.0), DomainError);
}

TEST_CASE("solutions are independent of evaluation thread") {
  std::vector<double> taus;
  for (int i = 1; i <= 24; ++i) taus.push_back(0.4 * i);
  std::vector<double> serial;
  for (double tau : taus) serial.push_back(solve_state(CavityModel::full(), 1.0, tau, 5.0).t);
  std::vector<std::future<double>> jobs;
  for (double tau : taus) {
    jobs.push_back(std::async(std::launch::async, [tau] { return solve_state(CavityModel::full(), 1.0, tau, 5.0).t; }));
  }
  for (std::size_t i = 0; i < taus.size(); ++i) CHECK(jobs[i].get() == serial[i]);
}
