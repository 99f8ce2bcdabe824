#include "fermibox/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fermibox/error.hpp"
#include "fermibox/quadrature.hpp"

namespace fermibox {

namespace {

using std::numbers::pi;

// B_2, B_4, ..., B_14
constexpr std::array<double, 7> kBernoulli = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};

constexpr double kAsymptoticStart = 10.0;

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

double log_gamma_stirling(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    series += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * power;
    power *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * pi) + series;
}

// Dirichlet eta η(2k) = (1 - 2^{1-2k}) ζ(2k), k = 0..15 (η(0) ≡ 1/2).
constexpr std::array<double, 16> kEtaEven = {
    0.5,
    0.82246703342411321824, 0.94703282949724591758, 0.98555109129743510410,
    0.99623300185264789923, 0.99903950759827156564, 0.99975768514385819085,
    0.99993917034597971817, 0.99998476421490610644, 0.99999618786961011348,
    0.99999904661158152212, 0.99999976161323082255, 0.99999994039889239463,
    0.99999998509923199657, 0.99999999627475340011, 0.99999999906868228145};

double eta_even(std::size_t k) {
  if (k < kEtaEven.size()) return kEtaEven[k];
  // Alternating sum converges after a handful of terms for 2k ≥ 32.
  double sum = 0.0;
  for (int n = 8; n >= 1; --n) {
    sum += ((n % 2) ? 1.0 : -1.0) * std::pow(static_cast<double>(n), -2.0 * static_cast<double>(k));
  }
  return sum;
}

double gamma_of_order(StonerIndex s) {
  const double root_pi = std::sqrt(pi);
  switch (s) {
    case StonerIndex::Half: return root_pi;
    case StonerIndex::ThreeHalf: return 0.5 * root_pi;
    case StonerIndex::FiveHalf: return 0.75 * root_pi;
  }
  return root_pi;
}

// 1/(e^y + 1) without overflow.
double fermi_factor(double y) {
  if (y > 0.0) {
    const double e = std::exp(-y);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(y) + 1.0);
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x >= kAsymptoticStart) return log_gamma_stirling(x);
  double product = 1.0;
  while (x < kAsymptoticStart) {
    product *= x;
    x += 1.0;
  }
  return log_gamma_stirling(x) - std::log(product);
}

double polygamma(int order, double x) {
  if (order < 0 || order > 2) {
    throw InvalidOrderError("polygamma: order must be 0, 1 or 2, got " + std::to_string(order));
  }
  require_positive(x, "polygamma");

  // Recurrence terms are accumulated separately and added last, smallest
  // argument (largest term) last, to limit rounding.
  double shift = 0.0;
  double y = x;
  std::array<double, 16> terms{};
  std::size_t nterms = 0;
  while (y < kAsymptoticStart) {
    switch (order) {
      case 0: terms[nterms++] = -1.0 / y; break;
      case 1: terms[nterms++] = 1.0 / (y * y); break;
      default: terms[nterms++] = -2.0 / (y * y * y); break;
    }
    y += 1.0;
  }

  const double inv = 1.0 / y;
  const double inv2 = inv * inv;
  double asym = 0.0;
  switch (order) {
    case 0: {
      double power = inv2;
      for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
        asym -= kBernoulli[k - 1] / (2.0 * k) * power;
        power *= inv2;
      }
      asym += std::log(y) - 0.5 * inv;
      break;
    }
    case 1: {
      double power = inv2 * inv;
      for (double b : kBernoulli) {
        asym += b * power;
        power *= inv2;
      }
      asym += inv + 0.5 * inv2;
      break;
    }
    default: {
      double power = inv2 * inv2;
      for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
        asym -= (2.0 * k + 1.0) * kBernoulli[k - 1] * power;
        power *= inv2;
      }
      asym += -inv2 - inv2 * inv;
      break;
    }
  }
  shift = asym;
  for (std::size_t i = nterms; i-- > 0;) shift += terms[i];
  return shift;
}

std::string_view to_string(StonerPath path) {
  switch (path) {
    case StonerPath::Series: return "series";
    case StonerPath::Quadrature: return "quadrature";
    case StonerPath::Sommerfeld: return "sommerfeld";
  }
  return "unknown";
}

StonerIndex stoner_index(double s) {
  if (s == 0.5) return StonerIndex::Half;
  if (s == 1.5) return StonerIndex::ThreeHalf;
  if (s == 2.5) return StonerIndex::FiveHalf;
  throw UnsupportedIndexError("stoner_phi: index must be 1/2, 3/2 or 5/2, got " + std::to_string(s));
}

double stoner_order(StonerIndex s) {
  switch (s) {
    case StonerIndex::Half: return 0.5;
    case StonerIndex::ThreeHalf: return 1.5;
    case StonerIndex::FiveHalf: return 2.5;
  }
  return 0.5;
}

StonerPath stoner_path(double t) {
  if (t <= kStonerSeriesMax) return StonerPath::Series;
  if (t < kStonerSommerfeldMin) return StonerPath::Quadrature;
  return StonerPath::Sommerfeld;
}

double stoner_phi_series(StonerIndex s, double t) {
  if (!(t < 0.0)) throw DomainError("stoner_phi_series: requires t < 0");
  const double order = stoner_order(s);
  const double q = std::exp(t);
  double sum = 0.0;
  double qk = 1.0;
  for (int k = 1; k < 100000; ++k) {
    qk *= q;
    const double term = qk / std::pow(static_cast<double>(k), order);
    sum += (k % 2) ? term : -term;
    if (term < 1e-16 * std::abs(sum) || qk == 0.0) break;
  }
  return sum;
}

double stoner_phi_quadrature(StonerIndex s, double t) {
  // z = u²: Φ_s = 2/Γ(s) ∫ u^{2s-1} / (e^{u²-t} + 1) du, smooth at u = 0.
  const int power = 2 * static_cast<int>(stoner_order(s) - 0.5);  // 0, 2, 4
  auto integrand = [power, t](double u) {
    const double u2 = u * u;
    double w = 1.0;
    for (int i = 0; i < power; ++i) w *= u;
    return w * fermi_factor(u2 - t);
  };
  const double z_split = std::max(t, 1.0);
  const double u_split = std::sqrt(z_split);
  // Beyond z_split + 64 the integrand is below e^{-64} of its scale.
  const double u_end = std::sqrt(z_split + 64.0);
  const quadrature::Tolerance tol{1e-13, 0.0, 4000};
  const auto head = quadrature::integrate(integrand, 0.0, u_split, tol);
  const auto tail = quadrature::integrate(integrand, u_split, u_end, tol);
  if (!head.converged || !tail.converged) {
    throw QuadratureFailure("stoner_phi_quadrature: refinement stalled at t = " + std::to_string(t));
  }
  return 2.0 * (head.value + tail.value) / gamma_of_order(s);
}

double stoner_phi_sommerfeld(StonerIndex s, double t) {
  if (!(t > 0.0)) throw DomainError("stoner_phi_sommerfeld: requires t > 0");
  const double order = stoner_order(s);
  // term_k = 2 η(2k) t^{s-2k} / Γ(s+1-2k)
  double inv_gamma = 1.0 / (order * gamma_of_order(s));  // 1/Γ(s+1)
  double arg = order + 1.0;                               // argument of that Γ
  double tpow = std::pow(t, order);
  const double inv_t2 = 1.0 / (t * t);
  double sum = 0.0;
  double previous = HUGE_VAL;
  for (std::size_t k = 0; k < 200; ++k) {
    const double term = 2.0 * eta_even(k) * tpow * inv_gamma;
    if (std::abs(term) > previous) break;  // asymptotic series starts diverging
    sum += term;
    previous = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    // Γ(a-2) = Γ(a) / ((a-1)(a-2))
    inv_gamma *= (arg - 1.0) * (arg - 2.0);
    arg -= 2.0;
    tpow *= inv_t2;
  }
  return sum;
}

double stoner_phi(StonerIndex s, double t) {
  if (std::isnan(t)) throw DomainError("stoner_phi: t is NaN");
  switch (stoner_path(t)) {
    case StonerPath::Series: return stoner_phi_series(s, t);
    case StonerPath::Quadrature: return stoner_phi_quadrature(s, t);
    case StonerPath::Sommerfeld: return stoner_phi_sommerfeld(s, t);
  }
  return 0.0;
}

double stoner_phi(double s, double t) { return stoner_phi(stoner_index(s), t); }

double stoner_phi_asymptotic(double s, double t) {
  const StonerIndex index = stoner_index(s);
  if (!(t > 0.0)) throw DomainError("stoner_phi_asymptotic: requires t > 0");
  const double root_pi = std::sqrt(pi);
  const double pi2 = pi * pi;
  const double t2 = t * t;
  switch (index) {
    case StonerIndex::Half:
      return 2.0 * std::sqrt(t) / root_pi * (1.0 - pi2 / (24.0 * t2));
    case StonerIndex::ThreeHalf:
      return 4.0 * std::pow(t, 1.5) / (3.0 * root_pi) * (1.0 + pi2 / (8.0 * t2));
    case StonerIndex::FiveHalf:
      return 8.0 * std::pow(t, 2.5) / (15.0 * root_pi) * (1.0 + 5.0 * pi2 / (8.0 * t2));
  }
  return 0.0;
}

StonerSet stoner_set(double t) {
  return {t, stoner_phi(StonerIndex::Half, t), stoner_phi(StonerIndex::ThreeHalf, t),
          stoner_phi(StonerIndex::FiveHalf, t), stoner_path(t)};
}

}  // namespace fermibox
