#include "fermibox/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fermibox/error.hpp"
#include "fermibox/roots.hpp"
#include "fermibox/special_functions.hpp"

namespace fermibox {

namespace kernel {

double theta(double n, double z) { return digamma(z * (1.0 - n) + 1.0) - digamma(z * n + 1.0); }

double theta1(double n, double z) { return trigamma(z * (1.0 - n) + 1.0) + trigamma(z * n + 1.0); }

double theta2(double n, double z) {
  return tetragamma(z * (1.0 - n) + 1.0) - tetragamma(z * n + 1.0);
}

double support_half_width(double z) { return digamma(z + 1.0) - digamma(1.0); }

namespace {

// Solves θ(n, z) = x for x ∈ [0, θ(0,z)), i.e. n ∈ (0, 1/2].
double solve_lower_half(double z, double x) {
  if (x == 0.0) return 0.5;
  auto fdf = [z, x](double n) {
    return std::pair{theta(n, z) - x, -z * theta1(n, z)};
  };
  double guess = 1.0 / (std::exp(x) + 1.0);
  guess -= (1.0 - 2.0 * guess) / (2.0 * z);
  guess = std::clamp(guess, 0.0, 0.5);
  const double ftol = 1e-14 * std::max(1.0, std::abs(x));
  return roots::newton_bisect(fdf, 0.0, 0.5, guess, ftol);
}

}  // namespace

double solve_population(double z, double x) {
  const double half_width = support_half_width(z);
  if (x >= half_width) return 0.0;
  if (x <= -half_width) return 1.0;
  // θ(1-n, z) = -θ(n, z): solve on the half where n ≤ 1/2.
  if (x < 0.0) return 1.0 - solve_lower_half(z, -x);
  return solve_lower_half(z, x);
}

}  // namespace kernel

namespace {

void check_theta_args(double n, double z, const char* what) {
  if (!(n >= 0.0 && n <= 1.0)) {
    throw DomainError(std::string(what) + ": occupation must lie in [0,1], got " + std::to_string(n));
  }
  if (!(z >= 1.0) || !std::isfinite(z)) {
    throw DomainError(std::string(what) + ": degeneracy must be >= 1, got " + std::to_string(z));
  }
}

std::int64_t max_degeneracy(const Spectrum& spectrum) {
  std::int64_t best = 1;
  for (const auto& level : spectrum.levels) best = std::max(best, level.degeneracy);
  return best;
}

}  // namespace

double theta(double n, double z) {
  check_theta_args(n, z, "theta");
  return kernel::theta(n, z);
}

double theta1(double n, double z) {
  check_theta_args(n, z, "theta1");
  return kernel::theta1(n, z);
}

double theta2(double n, double z) {
  check_theta_args(n, z, "theta2");
  return kernel::theta2(n, z);
}

double solve_population(double z, double x) {
  if (!(z >= 1.0) || !std::isfinite(z)) {
    throw DomainError("solve_population: degeneracy must be >= 1, got " + std::to_string(z));
  }
  if (!std::isfinite(x)) throw DomainError("solve_population: energy offset must be finite");
  return kernel::solve_population(z, x);
}

double approx_population(double z, double x) {
  if (!(z > 0.0)) throw DomainError("approx_population: degeneracy must be positive");
  const double fd = 1.0 / (std::exp(x) + 1.0);
  return std::clamp(fd - (1.0 - 2.0 * fd) / (2.0 * z), 0.0, 1.0);
}

double OccupancyState::total_particles() const {
  double total = 0.0;
  for (std::size_t j = 0; j < populations.size(); ++j) {
    total += static_cast<double>(spectrum->levels[j].degeneracy) * populations[j];
  }
  return total;
}

std::size_t OccupancyState::active_levels() const {
  return static_cast<std::size_t>(std::count_if(populations.begin(), populations.end(),
                                                [](double n) { return n > 0.0 && n < 1.0; }));
}

OccupancyState ground_state(SpectrumPtr spectrum, double particle_number) {
  if (!(particle_number > 0.0) || !std::isfinite(particle_number)) {
    throw DomainError("ground_state: particle number must be positive");
  }
  OccupancyState state;
  state.spectrum = spectrum;
  state.particle_number = particle_number;
  state.ground = true;
  state.tau = 0.0;
  state.t = std::numeric_limits<double>::infinity();
  double remaining = particle_number;
  for (const auto& level : spectrum->levels) {
    const auto z = static_cast<double>(level.degeneracy);
    if (remaining <= z) {
      state.populations.push_back(remaining / z);
      state.mu = level.energy;
      return state;
    }
    state.populations.push_back(1.0);
    remaining -= z;
  }
  throw CapacityError("ground_state: N = " + std::to_string(particle_number) +
                      " exceeds the capacity of the " + std::to_string(spectrum->size()) +
                      " enumerated levels");
}

ParticleCount count_particles(const Spectrum& spectrum, double tau, double t,
                              std::vector<double>* populations) {
  ParticleCount out;
  if (populations) populations->clear();
  const double scale = tau * spectrum.box_size * spectrum.box_size;  // τL̃²
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const Level& level = spectrum.levels[j];
    const auto z = static_cast<double>(level.degeneracy);
    const double x = level.energy / tau - t;
    const double n = kernel::solve_population(z, x);
    out.total += z * n;
    if (n > 0.0 && n < 1.0) out.slope += 1.0 / kernel::theta1(n, z);
    if (populations) populations->push_back(n);
    out.scanned = j + 1;
    if (!spectrum.closed && static_cast<double>(level.gamma_sq) >= scale && n == 0.0 &&
        x >= kernel::support_half_width(4.0 * std::numbers::pi * static_cast<double>(level.gamma_sq))) {
      return out;
    }
  }
  out.exhausted = !spectrum.closed;
  return out;
}

OccupancyState solve_chemical_potential(SpectrumPtr spectrum, double tau, double particle_number) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("solve_chemical_potential: tau must be positive, got " + std::to_string(tau));
  }
  if (!(particle_number > 0.0) || !std::isfinite(particle_number)) {
    throw DomainError("solve_chemical_potential: particle number must be positive");
  }
  const Spectrum& spec = *spectrum;

  OccupancyState filled;
  try {
    filled = ground_state(spectrum, particle_number);
  } catch (const CapacityError&) {
    if (spec.closed) throw;
    throw BracketFailure("solve_chemical_potential: enumerated levels cannot hold N; gamma_sq_max exhausted");
  }

  auto count = [&](double t) {
    const ParticleCount c = count_particles(spec, tau, t);
    if (c.exhausted) {
      throw BracketFailure("solve_chemical_potential: level cutoff not reached; gamma_sq_max exhausted");
    }
    return c;
  };

  const double t0 = filled.mu / tau;
  double step = std::max(1.0, kernel::support_half_width(static_cast<double>(max_degeneracy(spec))));
  double lo = t0 - step;
  double hi = t0 + step;
  for (int i = 0; count(lo).total >= particle_number; ++i) {
    if (i > 200) throw BracketFailure("solve_chemical_potential: lower bracket not found");
    lo -= step;
    step *= 2.0;
  }
  step = std::max(1.0, kernel::support_half_width(static_cast<double>(max_degeneracy(spec))));
  for (int i = 0; count(hi).total < particle_number; ++i) {
    if (i > 200) throw BracketFailure("solve_chemical_potential: upper bracket not found");
    hi += step;
    step *= 2.0;
  }

  auto fdf = [&](double t) {
    const ParticleCount c = count(t);
    return std::pair{c.total - particle_number, c.slope};
  };
  double t = roots::newton_bisect(fdf, lo, hi, std::clamp(t0, lo, hi), 1e-12 * particle_number);

  OccupancyState state;
  state.spectrum = spectrum;
  state.tau = tau;
  state.particle_number = particle_number;
  ParticleCount c = count_particles(spec, tau, t, &state.populations);

  if (c.slope == 0.0) {
    // N(t) is flat here: move to the plateau's lower edge, where the highest
    // full level is about to open.
    double edge = -HUGE_VAL;
    for (std::size_t j = 0; j < state.populations.size(); ++j) {
      if (state.populations[j] == 1.0) {
        const Level& level = spec.levels[j];
        edge = std::max(edge, level.energy / tau +
                                  kernel::support_half_width(static_cast<double>(level.degeneracy)));
      }
    }
    if (std::isfinite(edge) && edge < t) {
      t = edge;
      c = count_particles(spec, tau, t, &state.populations);
    }
  }
  if (c.exhausted) {
    throw BracketFailure("solve_chemical_potential: level cutoff not reached; gamma_sq_max exhausted");
  }
  if (std::abs(c.total - particle_number) > 1e-10 * particle_number) {
    throw NoSolutionError("solve_chemical_potential: particle number not matched (got " +
                          std::to_string(c.total) + ", want " + std::to_string(particle_number) + ")");
  }
  state.t = t;
  state.mu = t * tau;
  return state;
}

namespace {

std::int64_t initial_gamma_sq_max(double box_size, double tau, double particle_number) {
  // Shell radius holding ~2N states in the continuum, plus a thermal margin.
  const double gamma_n = std::cbrt(3.0 * particle_number / (4.0 * std::numbers::pi));
  const double from_n = 4.0 * gamma_n * gamma_n;
  const double from_tau = 8.0 * tau * box_size * box_size;
  return static_cast<std::int64_t>(std::ceil(std::max({64.0, from_n, from_tau})));
}

}  // namespace

OccupancyState solve_state(const CavityModel& model, double box_size, double tau,
                           double particle_number) {
  if (tau == 0.0) return ground_state(model, box_size, particle_number);
  if (model.is_truncated()) {
    return solve_chemical_potential(make_spectrum(model, box_size, 0), tau, particle_number);
  }
  std::int64_t g = initial_gamma_sq_max(box_size, tau, particle_number);
  for (int attempt = 0; attempt < 12; ++attempt) {
    try {
      return solve_chemical_potential(make_spectrum(model, box_size, g), tau, particle_number);
    } catch (const BracketFailure&) {
      g *= 4;
    }
  }
  throw BracketFailure("solve_state: spectrum growth limit reached");
}

OccupancyState ground_state(const CavityModel& model, double box_size, double particle_number) {
  if (model.is_truncated()) return ground_state(make_spectrum(model, box_size, 0), particle_number);
  std::int64_t g = initial_gamma_sq_max(box_size, 0.0, particle_number);
  while (true) {
    auto spectrum = make_spectrum(model, box_size, g);
    if (static_cast<double>(cumulative_capacity(*spectrum, spectrum->size())) >= particle_number) {
      return ground_state(spectrum, particle_number);
    }
    g *= 4;
  }
}

}  // namespace fermibox
