#include "fermibox/size_effects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fermibox/error.hpp"
#include "fermibox/roots.hpp"
#include "fermibox/special_functions.hpp"

namespace fermibox {

namespace {

using S = BottomShells;
constexpr double kGap = S::g2 - S::g1;  // γ2² - γ1²
constexpr double kInf = std::numeric_limits<double>::infinity();

double root(auto&& f, double lo, double hi) {
  const roots::Bracket b = roots::bisect(f, lo, hi, 1e-15 * std::max(1.0, std::abs(hi)));
  return 0.5 * (b.lo + b.hi);
}

// d̃ = Σ γ² z n for the two-level configuration at the mixing angle α.
struct Mixed {
  double n1, n2, d;
};

Mixed mixed(double N, double alpha) {
  const double c2 = std::cos(alpha) * std::cos(alpha);
  const double s2 = 1.0 - c2;
  return {N * c2 / S::z1, N * s2 / S::z2, N * (S::g1 * c2 + S::g2 * s2)};
}

// Zero at the instability temperature for the post-jump configuration.
double star_condition(double N, double alpha) {
  const Mixed m = mixed(N, alpha);
  const ZConstants z = z_constants_starred(m.n1, m.n2);
  return 0.4 * kGap * z.Z0 / (m.d * z.Z1) - 1.0;
}

double star_condition_top(double N) { return star_condition(N, 0.5 * std::numbers::pi); }

double a_v_at_tau0(double N) {
  const ZConstants z = z_constants(N);
  return 2.5 * N * z.Z1 - z.Z0;
}

double ground_entropy(double N) {
  return log_gamma(S::z1 + 1.0) - log_gamma(N + 1.0) - log_gamma(S::z1 - N + 1.0);
}

void require_tau0_domain(double N, const char* what) {
  const double ns = ground_band_criticals().N_star;
  if (!(N > ns && N <= S::z1)) {
    throw DomainError(std::string(what) + ": requires N_* < N <= 16, got N = " + std::to_string(N));
  }
}

std::vector<double> leading(const OccupancyState& state, std::size_t count) {
  std::vector<double> out(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) out[j] = state.population(j);
  return out;
}

// First u in (u_lo, u_hi] where g changes sign from the sign it has at u_lo.
// Geometric scan followed by bisection.
std::optional<double> first_crossing(auto&& g, double u_lo, double u_hi, double ratio = 1.05) {
  double a = u_lo;
  const bool start = g(a) < 0.0;
  while (a < u_hi) {
    const double b = std::min(a * ratio, u_hi);
    if ((g(b) < 0.0) != start) {
      double lo = a, hi = b;
      while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) < 0.0) == start) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return hi;
    }
    a = b;
  }
  return std::nullopt;
}

}  // namespace

ZConstants z_constants(double N) {
  if (!(N > 0.0 && N <= S::z1)) {
    throw DomainError("z_constants: requires 0 < N <= 16, got N = " + std::to_string(N));
  }
  return z_constants_starred(N / S::z1, 0.0);
}

ZConstants z_constants_starred(double n1, double n2) {
  return {theta(n2, S::z2) - theta(n1, S::z1), theta1(n2, S::z2) + theta1(n1, S::z1),
          theta2(n2, S::z2) - theta2(n1, S::z1)};
}

double tau0(double N, double box) {
  if (!(box > 0.0)) throw DomainError("tau0: box size must be positive");
  return kGap / (box * box * z_constants(N).Z0);
}

const CriticalNumbers& ground_band_criticals() {
  static const CriticalNumbers c = [] {
    CriticalNumbers out;
    out.N_star = root(a_v_at_tau0, 1e-6, 1.0);
    out.N_m = root(star_condition_top, 1e-4, out.N_star);
    // τ_{1→2} has a pole where θ((N-16)/48, 48) = θ(1, 16).
    const double n_pole = S::z1 + S::z2 * solve_population(S::z2, -theta(0.0, S::z1));
    auto diff = [](double N) {
      const double n2 = (N - S::z1) / S::z2;
      const double inv12 = theta(n2, S::z2) - theta(1.0, S::z1);
      const double inv23 = theta(0.0, S::z3) - theta(n2, S::z2);
      return inv12 / kGap - inv23 / (S::g3 - S::g2);
    };
    out.N_c1 = root(diff, S::z1 + 1e-9, n_pole - 1e-9);
    out.N_c = kInf;
    return out;
  }();
  return c;
}

CriticalNumbers critical_numbers(const CavityModel& model) {
  CriticalNumbers out = ground_band_criticals();
  if (!model.is_truncated() || *model.level_count < 2) return out;
  // τ → ∞: every level sees the same offset x = -t, and level 1 empties at
  // x = θ(0, z1).
  const auto spectrum = make_spectrum(model, 1.0, 0);
  const double x = kernel::support_half_width(static_cast<double>(spectrum->levels[0].degeneracy));
  double n = 0.0;
  for (std::size_t j = 1; j < spectrum->size(); ++j) {
    const auto z = static_cast<double>(spectrum->levels[j].degeneracy);
    n += z * kernel::solve_population(z, x);
  }
  out.N_c = n;
  return out;
}

TauStar tau_star_small_N(double N, double box) {
  if (!(box > 0.0)) throw DomainError("tau_star_small_N: box size must be positive");
  const CriticalNumbers& c = ground_band_criticals();
  const double slack = 1e-12;
  if (!(N >= c.N_m * (1.0 - slack) && N <= c.N_star * (1.0 + slack))) {
    throw NoSolutionError("tau_star_small_N: no instability temperature for N = " + std::to_string(N) +
                          " (needs N_m <= N <= N_*)");
  }
  const double top = 0.5 * std::numbers::pi;
  auto f = [N](double a) { return star_condition(N, a); };
  double alpha;
  const double f0 = f(0.0);
  const double f1 = f(top);
  if (std::abs(f0) < 1e-9) {
    alpha = 0.0;
  } else if (std::abs(f1) < 1e-9) {
    alpha = top;
  } else if ((f0 < 0.0) == (f1 < 0.0)) {
    throw NoSolutionError("tau_star_small_N: mixing angle not bracketed");
  } else {
    alpha = root(f, 0.0, top);
  }
  const Mixed m = mixed(N, alpha);
  const ZConstants z = z_constants_starred(m.n1, m.n2);
  TauStar out;
  out.alpha = alpha;
  out.n1 = m.n1;
  out.n2 = m.n2;
  out.tau_star = kGap / (box * box * z.Z0);
  out.tau_star_alt = 0.4 * kGap * kGap / (box * box * z.Z1 * m.d);
  return out;
}

Tau0Jumps jumps_at_tau0(double N, double box) {
  require_tau0_domain(N, "jumps_at_tau0");
  if (!(box > 0.0)) throw DomainError("jumps_at_tau0: box size must be positive");
  const double eps1 = S::g1 / (box * box);
  const double volume = box * box * box;
  const ZConstants z = z_constants(N);
  const double r0 = z.Z0 / z.Z1;
  const double A2 = 7.5 * N - kGap * r0;

  Tau0Jumps out;
  out.tau0 = kGap / (box * box * z.Z0);
  out.z = z;
  out.A2 = A2;
  out.S0 = ground_entropy(N);
  out.E0 = eps1 * N;
  out.p0 = 2.0 * out.E0 / (3.0 * volume * kPressureScale);
  out.C_V0 = z.Z0 * r0;
  out.C_p0 = z.Z0 * r0 * (1.0 + kGap * r0 / A2);
  out.alpha_p0 = 1.5 * (S::g1 / eps1) * z.Z0 * r0 / A2;
  out.gamma_T0 = 2.25 * S::g1 * volume / (eps1 * A2);
  out.beta_V0 = z.Z0 * r0 / (N * eps1);

  const double p_nat0 = 2.0 * out.E0 / (3.0 * volume);
  out.jumps.S = 0.0;
  out.jumps.E = 0.0;
  out.jumps.p = 0.0;
  out.jumps.C_V = out.C_V0;
  out.jumps.C_p = out.C_p0;
  out.jumps.alpha_p = out.alpha_p0;
  out.jumps.gamma_T = out.gamma_T0 - 3.0 / (5.0 * p_nat0);
  out.jumps.beta_V = out.beta_V0;
  return out;
}

SlopeCoefficients slope_coefficients(double N) {
  require_tau0_domain(N, "slope_coefficients");
  const ZConstants z = z_constants(N);
  const double q = z.Z0 / z.Z1;
  const double r = z.Z0 * z.Z2 / (z.Z1 * z.Z1);
  SlopeCoefficients k;
  k.A2 = 7.5 * N - kGap * q;
  k.A1 = 7.5 * N + kGap * q * (2.5 - r);
  const double ratio = k.A1 / k.A2;
  const double cp0 = z.Z0 * q * (1.0 + kGap * q / k.A2);
  const double s0 = ground_entropy(N);
  k.K_S = s0 > 0.0 ? z.Z0 * q / s0 : kInf;
  k.K_p = kGap / (S::g1 * N) * q;
  k.K_CV = r - 2.0;
  k.K_Cp = z.Z0 * q / cp0 * ((r - 2.0) + kGap * q / k.A2 * (2.0 * (r - 1.0) - ratio));
  k.K_alpha_p = r - 1.0 - ratio;
  k.K_gamma_T = 1.0 - ratio;
  k.K_beta_V = r - 2.0 - kGap / (S::g1 * N) * q;
  return k;
}

TauStarJumps jumps_at_tau_star(double N, double box) {
  const CriticalNumbers& c = ground_band_criticals();
  if (!(N >= c.N_m && N < c.N_star)) {
    throw DomainError("jumps_at_tau_star: requires N_m <= N < N_*, got N = " + std::to_string(N));
  }
  const TauStar star = tau_star_small_N(N, box);
  const double eps1 = S::g1 / (box * box);
  const double volume = box * box * box;
  const ZConstants z = z_constants_starred(star.n1, star.n2);
  const double q = z.Z0 / z.Z1;
  const double r = z.Z0 * z.Z2 / (z.Z1 * z.Z1);
  const double raised = S::z2 * star.n2;  // particles moved to level 2
  const double d = S::g1 * S::z1 * star.n1 + S::g2 * raised;

  TauStarJumps out;
  out.star = star;
  out.z = z;
  out.A1 = 2.5 * d + kGap * q * (2.5 - r);
  out.jumps.E = eps1 * (S::g2 / S::g1 - 1.0) * raised;
  out.jumps.p = 2.0 * *out.jumps.E / (3.0 * volume * kPressureScale);
  out.jumps.S = log_gamma(S::z1 + 1.0) + log_gamma(S::z2 + 1.0) - log_gamma(S::z1 * star.n1 + 1.0) -
                log_gamma(S::z1 * (1.0 - star.n1) + 1.0) - log_gamma(raised + 1.0) -
                log_gamma(S::z2 - raised + 1.0) - ground_entropy(N);
  out.jumps.C_V = z.Z0 * q;
  out.jumps.beta_V = z.Z0 * q / (eps1 * (N + (S::g2 / S::g1 - 1.0) * raised));
  out.C_p_regular = z.Z0 * q;
  out.C_p_amplitude = kGap * z.Z0 * q * q / out.A1;
  out.alpha_p_amplitude = 1.5 * (S::g1 / eps1) * z.Z0 * q / out.A1;
  out.gamma_T_amplitude = 2.25 * (S::g1 / eps1) * volume / out.A1;
  return out;
}

BandOnsets band_onsets(double N, double box) {
  if (!(N > S::z1 && N <= S::z1 + S::z2)) {
    throw DomainError("band_onsets: requires 16 < N <= 64, got N = " + std::to_string(N));
  }
  if (!(box > 0.0)) throw DomainError("band_onsets: box size must be positive");
  const double n2 = (N - S::z1) / S::z2;
  const double l2 = box * box;
  const double inv12 = theta(n2, S::z2) - theta(1.0, S::z1);
  const double inv23 = theta(0.0, S::z3) - theta(n2, S::z2);
  BandOnsets out;
  out.tau_1to2 = inv12 > 0.0 ? kGap / (l2 * inv12) : (inv12 < 0.0 ? kGap / (l2 * inv12) : kInf);
  out.tau_2to3 = inv23 > 0.0 ? (S::g3 - S::g2) / (l2 * inv23) : kInf;
  out.active = kInf;
  if (out.tau_1to2 > 0.0) out.active = std::min(out.active, out.tau_1to2);
  if (out.tau_2to3 > 0.0) out.active = std::min(out.active, out.tau_2to3);
  return out;
}

std::optional<double> level_onset(std::size_t level, double N, double box, const CavityModel& model,
                                  double scaled_tau_max) {
  if (level == 0) throw DomainError("level_onset: levels are numbered from 1");
  if (!(box > 0.0)) throw DomainError("level_onset: box size must be positive");
  const OccupancyState ground = ground_state(model, 1.0, N);
  if (level <= ground.populations.size()) return std::nullopt;
  if (model.is_truncated() && level > *model.level_count) return std::nullopt;
  const auto spectrum = make_spectrum(model, 1.0, static_cast<std::int64_t>(level) * 8 + 64);
  if (level > spectrum->size()) return std::nullopt;
  const Level& target = spectrum->levels[level - 1];
  const double half = kernel::support_half_width(static_cast<double>(target.degeneracy));
  // Work at L̃ = 1 in u = τL̃²; g ≥ 0 while the level is empty.
  auto g = [&](double u) {
    const OccupancyState s = solve_state(model, 1.0, u, N);
    return target.energy / u - s.t - half;
  };
  const auto u = first_crossing(g, 0.05, scaled_tau_max);
  if (!u) return std::nullopt;
  return *u / (box * box);
}

std::optional<double> tau_ground_depletion(double N, double box, const CavityModel& model,
                                           double scaled_tau_max) {
  if (!(box > 0.0)) throw DomainError("tau_ground_depletion: box size must be positive");
  if (!(N > 0.0)) throw DomainError("tau_ground_depletion: particle number must be positive");
  const CriticalNumbers c = critical_numbers(model);
  if (N >= c.N_c) return std::nullopt;
  const double limit = model.is_truncated() ? scaled_tau_max : std::min(scaled_tau_max, 200.0);
  const auto spectrum = make_spectrum(model, 1.0, 64);
  const Level& first = spectrum->levels[0];
  const double half = kernel::support_half_width(static_cast<double>(first.degeneracy));
  auto g = [&](double u) {
    const OccupancyState s = solve_state(model, 1.0, u, N);
    return first.energy / u - s.t - half;
  };
  const auto u = first_crossing(g, 0.05, limit, model.is_truncated() ? 1.1 : 1.05);
  if (!u) return std::nullopt;
  return *u / (box * box);
}

std::string to_string(FrozenReason reason) {
  switch (reason) {
    case FrozenReason::None: return "none";
    case FrozenReason::BelowOnset: return "below_onset";
    case FrozenReason::Unstable: return "unstable";
    case FrozenReason::AlwaysGround: return "always_ground";
  }
  return "unknown";
}

EquilibriumPoint equilibrium_point(const CavityModel& model, double box, double tau, double N) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw DomainError("equilibrium_point: tau must be finite and >= 0, got " + std::to_string(tau));
  }
  EquilibriumPoint out;
  auto freeze = [&](FrozenReason reason) {
    out.state = ground_state(model, box, N);
    out.point = frozen_point(out.state, tau);
    out.reason = reason;
    return out;
  };
  if (tau == 0.0) return freeze(FrozenReason::BelowOnset);
  const CriticalNumbers& c = ground_band_criticals();
  if (N < c.N_m) return freeze(FrozenReason::AlwaysGround);
  if (N < c.N_star && tau < tau_star_small_N(N, box).tau_star) return freeze(FrozenReason::Unstable);
  out.state = solve_state(model, box, tau, N);
  out.point = evaluate(out.state);
  out.reason = out.point.frozen ? FrozenReason::BelowOnset : FrozenReason::None;
  return out;
}

std::string to_string(OnsetKind kind) {
  switch (kind) {
    case OnsetKind::Tau0: return "tau0";
    case OnsetKind::TauStar: return "tau_star";
    case OnsetKind::Tau1To2: return "tau_1to2";
    case OnsetKind::Tau2To3: return "tau_2to3";
    case OnsetKind::Tau01: return "tau_01";
    case OnsetKind::LevelOnset: return "level_onset";
  }
  return "unknown";
}

std::vector<OnsetReport> onset_reports(double N, double box, const CavityModel& model,
                                       std::size_t level_limit) {
  std::vector<OnsetReport> out;
  const std::size_t width = std::max<std::size_t>(level_limit, 4);
  auto with_populations = [&](OnsetReport r) {
    const double lo = r.tau * (1.0 - 1e-9);
    const double hi = r.tau * (1.0 + 1e-9);
    r.populations_before = leading(equilibrium_point(model, box, lo, N).state, width);
    r.populations_after = leading(equilibrium_point(model, box, hi, N).state, width);
    out.push_back(std::move(r));
  };
  const CriticalNumbers& c = ground_band_criticals();

  if (N > c.N_star && N <= S::z1) {
    const Tau0Jumps j = jumps_at_tau0(N, box);
    OnsetReport r;
    r.kind = OnsetKind::Tau0;
    r.tau = j.tau0;
    r.jumps = j.jumps;
    r.slopes = slope_coefficients(N);
    with_populations(std::move(r));
  } else if (N >= c.N_m && N < c.N_star) {
    const TauStarJumps j = jumps_at_tau_star(N, box);
    OnsetReport r;
    r.kind = OnsetKind::TauStar;
    r.tau = j.star.tau_star;
    r.jumps = j.jumps;
    with_populations(std::move(r));
  } else if (N > S::z1 && N <= S::z1 + S::z2) {
    const BandOnsets b = band_onsets(N, box);
    OnsetReport r;
    r.kind = b.active == b.tau_1to2 ? OnsetKind::Tau1To2 : OnsetKind::Tau2To3;
    r.tau = b.active;
    if (std::isfinite(r.tau)) with_populations(std::move(r));
  }

  if (N >= c.N_m) {
    for (std::size_t level = 2; level <= level_limit; ++level) {
      const auto tau = level_onset(level, N, box, model);
      if (!tau) continue;
      OnsetReport r;
      r.kind = OnsetKind::LevelOnset;
      r.level = level;
      r.tau = *tau;
      with_populations(std::move(r));
    }
    if (const auto tau = tau_ground_depletion(N, box, model)) {
      OnsetReport r;
      r.kind = OnsetKind::Tau01;
      r.level = 1;
      r.tau = *tau;
      with_populations(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const OnsetReport& a, const OnsetReport& b) { return a.tau < b.tau; });
  return out;
}

}  // namespace fermibox
