#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace fermibox::roots {

struct Bracket {
  double lo;
  double hi;
};

// Bisection for the sign change of f on [lo, hi]. f(lo) and f(hi) must differ
// in sign (zero counts as the sign of `hi`). Returns the final bracket, whose
// width is at most xtol or one ulp.
template <class F>
Bracket bisect(F&& f, double lo, double hi, double xtol, std::size_t max_iter = 400) {
  const bool lo_negative = f(lo) < 0.0;
  for (std::size_t i = 0; i < max_iter && std::abs(hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if ((f(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

// Safeguarded Newton iteration for a monotone function on a bracket.
// `fdf(x)` returns {f(x), f'(x)}. Steps that leave the bracket, or fail to
// halve the residual, fall back to bisection. Terminates when |f| <= ftol or
// the bracket collapses to adjacent doubles.
template <class FDF>
double newton_bisect(FDF&& fdf, double lo, double hi, double x0, double ftol,
                     std::size_t max_iter = 200) {
  auto [flo, dlo] = fdf(lo);
  (void)dlo;
  if (flo == 0.0) return lo;
  const bool increasing = flo < 0.0;
  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  double last_abs = HUGE_VAL;
  for (std::size_t i = 0; i < max_iter; ++i) {
    auto [fx, dfx] = fdf(x);
    if (std::abs(fx) <= ftol) return x;
    if ((fx < 0.0) == increasing) {
      lo = x;
    } else {
      hi = x;
    }
    double next = (dfx != 0.0) ? x - fx / dfx : lo;
    const bool inside = next > lo && next < hi;
    if (!inside || std::abs(fx) > 0.5 * last_abs) {
      next = 0.5 * (lo + hi);
    }
    last_abs = std::abs(fx);
    if (next == x || next <= lo || next >= hi) {
      // Bracket has collapsed to neighbouring doubles.
      const double flo_abs = std::abs(fdf(lo).first);
      const double fhi_abs = std::abs(fdf(hi).first);
      return flo_abs <= fhi_abs ? lo : hi;
    }
    x = next;
  }
  return x;
}

}  // namespace fermibox::roots
