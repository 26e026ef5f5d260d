#pragma once

#include <cstddef>
#include <vector>

#include "lab/errors.hpp"

namespace lab {

// Radial mesh on [0, s_max], geometrically graded near 0:
//   s(x) = A(e^{gx} - 1), x = i/n, with A, g chosen so the first interval
//   is h0 and the last node is s_max. g = 0 degenerates to uniform spacing.
struct GridSpec {
  double s_max = 20.0;
  int n = 2000;     // number of intervals; must be even (pairwise quadrature)
  double h0 = 1e-4; // first interval length

  // same resolution in the stretched variable alpha^{1/3} s
  GridSpec scaled(double alpha) const;
};

struct RadialGrid {
  std::vector<double> s; // nodes, s[0] = 0, strictly increasing
  double s_max = 0.0;
  double gamma = 0.0; // grading rate, 0 = uniform

  int n() const { return static_cast<int>(s.size()) - 1; }
  double spacing(int i) const { return s[i + 1] - s[i]; } // i in [0, n)
};

RadialGrid make_grid(const GridSpec& spec); // throws BadGrid
// same map with every interval halved (n doubled, h0 halved)
RadialGrid halve_spacing(const GridSpec& spec, RadialGrid* out_coarse = nullptr);

// composite 3-point Newton-Cotes on interval pairs; exact on quadratics,
// order 4 on smoothly graded meshes; x.size() odd (even interval count)
double integrate(const std::vector<double>& x, const std::vector<double>& y);

// integral with a Richardson error estimate from the every-other-node mesh
// (n must be divisible by 4); est = (I_h - I_2h)/15
double integrate_with_error(const std::vector<double>& x, const std::vector<double>& y,
                            double* err_estimate);

// cumulative integral at every node, parabola pieces split mid-pair
std::vector<double> cumulative_integral(const std::vector<double>& x,
                                        const std::vector<double>& y);

// finite-difference weights for the m-th derivative at z from arbitrary
// nodes xs[0..k) (Fornberg recurrence); fills w[0..k)
void fd_weights(double z, const double* xs, int k, int m, double* w);

// derivative of sampled values at node i from a centered stencil of the
// given width (clamped at the ends); width 3 = second order, 5 = fourth
double deriv1(const std::vector<double>& x, const std::vector<double>& y, int i, int width);
double deriv2(const std::vector<double>& x, const std::vector<double>& y, int i, int width);

}  // namespace lab
