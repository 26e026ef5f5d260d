#pragma once

#include <cmath>
#include <limits>

namespace lab {

// C-infinity decreasing step: 1 on (-inf, 1/4], 0 on [3/4, inf),
// built from g(t) = e^{-1/t}
namespace detail {
inline double bump_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
inline double bump_g_prime(double t) {
  return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
}
}  // namespace detail

inline double smooth_step(double x) {
  const double a = detail::bump_g(0.75 - x); // positive for x < 3/4
  const double b = detail::bump_g(x - 0.25); // positive for x > 1/4
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 1.0;
  return a / (a + b);
}

inline double smooth_step_prime(double x) {
  const double a = detail::bump_g(0.75 - x);
  const double b = detail::bump_g(x - 0.25);
  if (a == 0.0 || b == 0.0) return 0.0;
  const double ap = -detail::bump_g_prime(0.75 - x);
  const double bp = detail::bump_g_prime(x - 0.25);
  const double s = a + b;
  return (ap * b - a * bp) / (s * s);
}

// radial cutoff: 1 for s <= center - width, 0 for s >= center + width.
// CutoffSpec::none() is the constant-1 cutoff (derivative identically 0).
struct CutoffSpec {
  double center = std::numeric_limits<double>::infinity();
  double width = 1.0;

  static CutoffSpec none() { return CutoffSpec{}; }
  bool is_none() const { return !std::isfinite(center); }

  double chi(double s) const {
    if (is_none()) return 1.0;
    return smooth_step(0.25 + (s - center + width) / (4.0 * width));
  }
  double chi_prime(double s) const {
    if (is_none()) return 0.0;
    return smooth_step_prime(0.25 + (s - center + width) / (4.0 * width)) / (4.0 * width);
  }
};

}  // namespace lab
