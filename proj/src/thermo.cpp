#include "fermibox/thermo.hpp"

#include <cmath>
#include <numbers>

#include "fermibox/error.hpp"
#include "fermibox/special_functions.hpp"

namespace fermibox {

namespace {

constexpr double kPi32 = std::numbers::pi * 1.7724538509055160273;  // π^{3/2}

double weighted_gamma_sq_sum(const OccupancyState& state) {
  double d = 0.0;
  for (std::size_t j = 0; j < state.populations.size(); ++j) {
    const Level& level = state.spectrum->levels[j];
    d += static_cast<double>(level.gamma_sq) * static_cast<double>(level.degeneracy) * state.populations[j];
  }
  return d;
}

ThermoPoint base_point(const OccupancyState& state, double tau) {
  ThermoPoint p;
  p.tau = tau;
  p.particle_number = state.particle_number;
  p.box_size = state.spectrum->box_size;
  p.entropy = entropy(state);
  const EnergyPressure ep = energy_pressure(state);
  p.energy = ep.energy;
  p.pressure = ep.pressure;
  return p;
}

}  // namespace

double level_entropy(double n, double z) {
  if (n <= 0.0 || n >= 1.0) return 0.0;
  return log_gamma(z + 1.0) - log_gamma(z * n + 1.0) - log_gamma(z * (1.0 - n) + 1.0);
}

double entropy(const OccupancyState& state) {
  double s = 0.0;
  for (std::size_t j = 0; j < state.populations.size(); ++j) {
    s += level_entropy(state.populations[j], static_cast<double>(state.spectrum->levels[j].degeneracy));
  }
  return s;
}

EnergyPressure energy_pressure(const OccupancyState& state) {
  EnergyPressure out;
  for (std::size_t j = 0; j < state.populations.size(); ++j) {
    const Level& level = state.spectrum->levels[j];
    out.energy += level.energy * static_cast<double>(level.degeneracy) * state.populations[j];
  }
  const double box = state.spectrum->box_size;
  out.pressure = weighted_gamma_sq_sum(state) / (3.0 * kPi32 * std::pow(box, 5));
  return out;
}

ResponseSums response_sums(const OccupancyState& state) {
  if (!(state.tau > 0.0)) throw DomainError("response_sums: requires tau > 0");
  ResponseSums r;
  for (std::size_t j = 0; j < state.populations.size(); ++j) {
    const double n = state.populations[j];
    if (!(n > 0.0 && n < 1.0)) continue;
    const Level& level = state.spectrum->levels[j];
    const double w = 1.0 / kernel::theta1(n, static_cast<double>(level.degeneracy));
    const auto g = static_cast<double>(level.gamma_sq);
    r.inv_theta1 += w;
    r.g2 += w * g;
    r.g4 += w * g * g;
    ++r.active;
  }
  r.d = weighted_gamma_sq_sum(state);
  if (r.active > 1) {
    // G = g4 - g2²/Σw as a weighted variance, which is exactly ≥ 0.
    const double mean = r.g2 / r.inv_theta1;
    for (std::size_t j = 0; j < state.populations.size(); ++j) {
      const double n = state.populations[j];
      if (!(n > 0.0 && n < 1.0)) continue;
      const Level& level = state.spectrum->levels[j];
      const double dev = static_cast<double>(level.gamma_sq) - mean;
      r.G += dev * dev / kernel::theta1(n, static_cast<double>(level.degeneracy));
    }
  }
  const double box = state.spectrum->box_size;
  const double tau = state.tau;
  const double l2 = box * box;
  const double l4 = l2 * l2;
  r.B_T = r.G / (tau * tau * l4);
  r.B_V = 2.0 * r.G / (3.0 * tau * l4 * l2 * box);
  r.A_V = -4.0 / (9.0 * l4 * l4) * (2.5 * tau * r.d - r.G / l2);
  return r;
}

ThermoPoint heat_capacities_and_coefficients(const OccupancyState& state, const ResponseSums& sums) {
  ThermoPoint p = base_point(state, state.tau);
  p.t = state.t;
  p.mu = state.mu;
  p.grand_potential = p.energy - p.tau * p.entropy - p.mu * p.particle_number;
  p.B_T = sums.B_T;
  p.B_V = sums.B_V;
  p.A_V = sums.A_V;
  const double volume = p.volume();
  p.C_V = sums.B_T;
  p.C_p = sums.B_T - sums.B_V * sums.B_V / sums.A_V;
  p.alpha_p = -sums.B_V / (volume * sums.A_V);
  p.gamma_T = -p.tau / (volume * sums.A_V);
  p.beta_V = sums.B_V / (p.pressure_natural() * p.tau);
  p.frozen = sums.G == 0.0;
  p.stable = p.frozen ? sums.A_V < 0.0 : (sums.B_T > 0.0 && sums.A_V < 0.0);
  return p;
}

ThermoPoint evaluate(const OccupancyState& state) {
  if (state.ground || state.tau == 0.0) return frozen_point(state, 0.0);
  return heat_capacities_and_coefficients(state, response_sums(state));
}

ThermoPoint frozen_point(const OccupancyState& ground, double tau) {
  ThermoPoint p = base_point(ground, tau);
  p.mu = ground.mu;
  p.t = tau > 0.0 ? ground.mu / tau : std::numeric_limits<double>::infinity();
  p.grand_potential = p.energy - tau * p.entropy - p.mu * p.particle_number;
  const double box = p.box_size;
  const double l8 = std::pow(box, 8);
  p.A_V = -10.0 * tau * weighted_gamma_sq_sum(ground) / (9.0 * l8);
  p.gamma_T = 3.0 / (5.0 * p.pressure_natural());
  p.frozen = true;
  p.stable = true;
  return p;
}

}  // namespace fermibox
