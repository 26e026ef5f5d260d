#include "lab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace lab {

GridSpec GridSpec::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw BadGrid("grid scaling needs alpha > 0");
  const double lam = std::pow(alpha, -1.0 / 3.0);
  return GridSpec{s_max * lam, n, h0 * lam};
}

namespace {

// fraction of the total span taken by the first of n graded intervals
double first_interval_fraction(double g, int n) {
  if (g <= 0.0) return 1.0 / double(n);
  return std::expm1(g / double(n)) / std::expm1(g);
}

}  // namespace

RadialGrid make_grid(const GridSpec& spec) {
  if (spec.n < 2 || spec.n % 2 != 0) throw BadGrid("interval count must be even and >= 2");
  if (!(spec.h0 > 0.0) || !(spec.s_max > spec.h0)) throw BadGrid("need 0 < h0 < s_max");
  const double q = spec.h0 / spec.s_max;
  const double uniform_q = 1.0 / double(spec.n);
  if (q > uniform_q * (1.0 + 1e-12))
    throw BadGrid("first interval exceeds uniform spacing; cannot grade toward 0");

  RadialGrid grid;
  grid.s_max = spec.s_max;
  grid.s.resize(spec.n + 1);

  if (q >= uniform_q * (1.0 - 1e-12)) {
    grid.gamma = 0.0;
    for (int i = 0; i <= spec.n; ++i) grid.s[i] = spec.s_max * double(i) / double(spec.n);
  } else {
    // first_interval_fraction is strictly decreasing in g; bisect
    double lo = 0.0, hi = 1.0;
    while (first_interval_fraction(hi, spec.n) > q) {
      hi *= 2.0;
      if (hi > 700.0) { hi = 700.0; break; }
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (first_interval_fraction(mid, spec.n) > q) lo = mid; else hi = mid;
    }
    grid.gamma = 0.5 * (lo + hi);
    const double a = spec.s_max / std::expm1(grid.gamma);
    for (int i = 0; i <= spec.n; ++i)
      grid.s[i] = a * std::expm1(grid.gamma * double(i) / double(spec.n));
    grid.s[0] = 0.0;
    grid.s[spec.n] = spec.s_max;
  }

  // adjacent spacing ratio must stay within [1/2, 2]
  if (std::exp(grid.gamma / double(spec.n)) > 2.0)
    throw BadGrid("grading too aggressive for this interval count");
  return grid;
}

RadialGrid halve_spacing(const GridSpec& spec, RadialGrid* out_coarse) {
  if (out_coarse) *out_coarse = make_grid(spec);
  return make_grid(GridSpec{spec.s_max, spec.n * 2, spec.h0 * 0.5});
}

double integrate(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n < 2 || n % 2 != 0 || y.size() != x.size())
    throw BadGrid("quadrature needs an even interval count");
  double total = 0.0;
  for (int j = 0; j + 2 <= n; j += 2) {
    const double h0 = x[j + 1] - x[j];
    const double h1 = x[j + 2] - x[j + 1];
    const double H = h0 + h1;
    total += H / 6.0 * ((2.0 - h1 / h0) * y[j] + H * H / (h0 * h1) * y[j + 1] +
                        (2.0 - h0 / h1) * y[j + 2]);
  }
  return total;
}

double integrate_with_error(const std::vector<double>& x, const std::vector<double>& y,
                            double* err_estimate) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n % 4 != 0) throw BadGrid("error estimate needs an interval count divisible by 4");
  const double fine = integrate(x, y);
  std::vector<double> xc, yc;
  xc.reserve(n / 2 + 1);
  yc.reserve(n / 2 + 1);
  for (int i = 0; i <= n; i += 2) { xc.push_back(x[i]); yc.push_back(y[i]); }
  const double coarse = integrate(xc, yc);
  if (err_estimate) *err_estimate = (fine - coarse) / 15.0;
  return fine;
}

std::vector<double> cumulative_integral(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n < 2 || n % 2 != 0 || y.size() != x.size())
    throw BadGrid("quadrature needs an even interval count");
  std::vector<double> cum(x.size(), 0.0);
  for (int j = 0; j + 2 <= n; j += 2) {
    const double h0 = x[j + 1] - x[j];
    const double h1 = x[j + 2] - x[j + 1];
    const double H = h0 + h1;
    // integral of the interpolating parabola over the first subinterval
    const double first = y[j] * h0 * (3.0 * H - h0) / (6.0 * H) +
                         y[j + 1] * h0 * (3.0 * H - 2.0 * h0) / (6.0 * h1) -
                         y[j + 2] * h0 * h0 * h0 / (6.0 * H * h1);
    const double full = H / 6.0 * ((2.0 - h1 / h0) * y[j] + H * H / (h0 * h1) * y[j + 1] +
                                   (2.0 - h0 / h1) * y[j + 2]);
    cum[j + 1] = cum[j] + first;
    cum[j + 2] = cum[j] + full;
  }
  return cum;
}

void fd_weights(double z, const double* xs, int k, int m, double* w) {
  // Fornberg recurrence; wk[j][d] = weight of node j for derivative d
  std::vector<double> wk(static_cast<std::size_t>(k) * (m + 1), 0.0);
  auto W = [&](int j, int d) -> double& { return wk[std::size_t(j) * (m + 1) + d]; };
  double c1 = 1.0;
  double c4 = xs[0] - z;
  W(0, 0) = 1.0;
  for (int i = 1; i < k; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int d = mn; d >= 1; --d)
          W(i, d) = c1 * (d * W(i - 1, d - 1) - c5 * W(i - 1, d)) / c2;
        W(i, 0) = -c1 * c5 * W(i - 1, 0) / c2;
      }
      for (int d = mn; d >= 1; --d) W(j, d) = (c4 * W(j, d) - d * W(j, d - 1)) / c3;
      W(j, 0) = c4 * W(j, 0) / c3;
    }
    c1 = c2;
  }
  for (int j = 0; j < k; ++j) w[j] = W(j, m);
}

namespace {

double deriv_any(const std::vector<double>& x, const std::vector<double>& y, int i,
                 int width, int order) {
  const int nn = static_cast<int>(x.size());
  if (width > nn) throw BadGrid("stencil wider than grid");
  int start = std::clamp(i - width / 2, 0, nn - width);
  double w[16];
  fd_weights(x[i], &x[start], width, order, w);
  double acc = 0.0;
  for (int j = 0; j < width; ++j) acc += w[j] * y[start + j];
  return acc;
}

}  // namespace

double deriv1(const std::vector<double>& x, const std::vector<double>& y, int i, int width) {
  return deriv_any(x, y, i, width, 1);
}

double deriv2(const std::vector<double>& x, const std::vector<double>& y, int i, int width) {
  return deriv_any(x, y, i, width, 2);
}

}  // namespace lab
