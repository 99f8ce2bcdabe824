#pragma once

#include <string_view>

namespace fermibox {

/// ln Γ(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// Polygamma ψ^(order)(x) for order ∈ {0, 1, 2} and x > 0.
///
/// The argument is shifted above 10 with the upward recurrence and the
/// Bernoulli asymptotic series (through B14) is applied there. Relative
/// accuracy is about 1e-15 everywhere; ψ' > 0 and ψ'' < 0 hold exactly.
double polygamma(int order, double x);

inline double digamma(double x) { return polygamma(0, x); }
inline double trigamma(double x) { return polygamma(1, x); }
inline double tetragamma(double x) { return polygamma(2, x); }

// ---------------------------------------------------------------------------
// Fermi-Stoner functions
//
//   Φ_s(t) = 1/Γ(s) ∫_0^∞ z^{s-1} dz / (e^{z-t} + 1),   s ∈ {1/2, 3/2, 5/2}
// ---------------------------------------------------------------------------

enum class StonerIndex { Half, ThreeHalf, FiveHalf };
enum class StonerPath { Series, Quadrature, Sommerfeld };

std::string_view to_string(StonerPath path);

/// Maps s = 0.5, 1.5, 2.5 to the index; UnsupportedIndexError otherwise.
StonerIndex stoner_index(double s);
double stoner_order(StonerIndex s);

/// Dispatch boundaries: series below, Sommerfeld at or above.
inline constexpr double kStonerSeriesMax = -2.0;
inline constexpr double kStonerSommerfeldMin = 25.0;

StonerPath stoner_path(double t);

/// Φ_s(t) for any real t, relative accuracy ≤ 1e-9 (typically ~1e-13).
double stoner_phi(double s, double t);
double stoner_phi(StonerIndex s, double t);

// Individual evaluation paths; exposed for cross-checking.

/// Alternating series Σ (-1)^{k+1} e^{kt}/k^s; converges for t < 0.
double stoner_phi_series(StonerIndex s, double t);
/// Adaptive Gauss-Kronrod on the defining integral (any t).
double stoner_phi_quadrature(StonerIndex s, double t);
/// Optimally truncated Sommerfeld expansion; t > 0, accurate for large t.
double stoner_phi_sommerfeld(StonerIndex s, double t);

/// Two-term degenerate-limit forms:
///   Φ_{1/2} = 2√t/√π (1 - π²/24t²)
///   Φ_{3/2} = 4t^{3/2}/3√π (1 + π²/8t²)
///   Φ_{5/2} = 8t^{5/2}/15√π (1 + 5π²/8t²)
/// DomainError for t ≤ 0.
double stoner_phi_asymptotic(double s, double t);

struct StonerSet {
  double t = 0.0;
  double phi_half = 0.0;
  double phi_three_half = 0.0;
  double phi_five_half = 0.0;
  StonerPath path = StonerPath::Quadrature;
};

StonerSet stoner_set(double t);

}  // namespace fermibox
