#pragma once

#include <vector>

#include "lab/grid.hpp"

namespace lab::detail {

// Damped Newton relaxation for the radial sinh-Gordon family
//   -(1/s)(s y')' + alpha*s*sinh(2(y + shift)) = 0,  shift = (1/2) ln s or 0,
// on a node subrange, with either the s=0 regularity closure or a Dirichlet
// value on the left, and a Dirichlet value on the right. The discrete system
// is the gradient of a convex energy; Armijo backtracking keeps descent.
struct RadialNewtonProblem {
  const RadialGrid* grid = nullptr;
  double alpha = 1.0;
  int i_left = 0;             // leftmost owned node
  bool left_regular = true;   // true: i_left must be 0, closure f'(0)=0
  double left_value = 0.0;    // Dirichlet value when !left_regular
  double right_value = 0.0;   // Dirichlet value at the last grid node
  bool shift_half_log = true; // potential argument y + (1/2) ln s vs plain y
  double tol = 1e-10;         // target max-norm of the reported residual
  int i_report = 1;           // first node counted in the reported residual:
                              // below it the fine spacing quantizes the
                              // residual at ~2 ulp(y)/h^2 per stored double,
                              // above any useful tolerance
  int max_iter = 60;
};

struct RadialNewtonResult {
  std::vector<double> y;               // full-grid-length, owned range filled
  double residual_max = 0.0;           // long-double evaluated, interior nodes
  int iterations = 0;
  std::vector<double> energy_history;  // discrete energy per accepted step
};

// init must be full-grid-length; values outside the owned range are ignored.
// Throws NoConvergence when the residual stalls above tol.
RadialNewtonResult relax_radial_sinh(const RadialNewtonProblem& prob,
                                     const std::vector<double>& init);

// Bisection-shooting trajectory used to initialize the fiducial solve,
// exposed so tests can compare the marched orbit against the relaxed one.
// Samples stop where u = f + (1/2) ln s flattens to numerical zero or exits
// the tracking band; past the core the march amplifies the bracketing gap
// like e^{(2sqrt2/3) s^{3/2}}, so trust it only a few lengths out.
struct ShotTrace {
  std::vector<double> s, f;
  double f0 = 0.0;  // bracketed initial value
};
ShotTrace fiducial_shot_trace(double alpha, double s_max);

}  // namespace lab::detail
