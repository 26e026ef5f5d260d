#pragma once

#include <complex>
#include <vector>

#include "lab/errors.hpp"

namespace lab {

// Truncated power series with no constant term: coeffs[i] multiplies u^{i+1}.
// radius is the disk on which the coefficient-sum norm estimates the sup.
struct SeriesPoly {
  std::vector<std::complex<double>> coeffs;
  double radius = 0.5;

  int order() const { return static_cast<int>(coeffs.size()); }
  // Sum |b_n| radius^n; upper bound for sup over |u| <= radius.
  double norm() const;
  std::complex<double> eval(std::complex<double> u) const;
  // d/du of u -> sum b_n u^n (still without the constant from any 1+ prefix).
  std::complex<double> eval_deriv(std::complex<double> u) const;

  static SeriesPoly zero(int n_coeffs, double radius);
};

inline constexpr int kMaxSeriesOrder = 128;

// One application of the averaging map: c = (1+theta)^{1/2} (1+beta)^{-1/2} - 1
// truncated to the working order, then coefficient n of the result is c_n/(n+1).
SeriesPoly contraction_step(const SeriesPoly& beta, const SeriesPoly& theta_hol);

struct NormalizeReport {
  SeriesPoly beta;
  int iterations = 0;
  // norms of successive iterate differences, for contraction diagnostics
  std::vector<double> step_norms;
  double contraction_factor = 0.0;  // max measured ratio of consecutive steps
  double recursion_residual = 0.0;  // max_n |(n+1) b_n - c_n|
  double ode_residual = 0.0;        // max |z (dz/du)^2 - u(1+theta)| on |u| = radius/2
};

NormalizeReport normalize_coordinate(const SeriesPoly& theta_hol, double tol = 1e-14);

struct PhaseNormalization {
  double alpha_positive = 0.0;
  double omega = 0.0;                   // rotation angle, principal branch
  std::complex<double> rotation{1, 0};  // e^{i omega}
};

// Rotate u -> e^{i omega} u so the leading coefficient becomes positive real;
// omega solves 3*omega = -arg(alpha) mod 2pi, reduced to (-pi/3, pi/3].
PhaseNormalization alpha_phase_normalize(std::complex<double> alpha);

}  // namespace lab
