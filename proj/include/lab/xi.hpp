#pragma once

#include <vector>

#include "lab/bump.hpp"
#include "lab/errors.hpp"
#include "lab/fiducial.hpp"
#include "lab/grid.hpp"

namespace lab {

// Which half of the zero set the local model sits over; flips the sign of Xi.
enum class SignConvention { theta_plus, theta_minus };

// Xi = -(2/3)(s v' + 1/2) = -(2/3) s u'(s) in the theta_plus convention
// (+ for theta_minus). Its derivative is stored through the profile ODE
// flux, d/ds (s u') = alpha s^2 sinh(2u), so xi and xi_prime satisfy the
// density identity bracket = -(3/2)(1/s) xi' exactly by construction.
struct XiProfile {
  RadialGrid grid;
  std::vector<double> xi;        // per node; xi[0] = -+ 1/3 analytic limit
  std::vector<double> xi_prime;  // per node; 0 at both ends
  SignConvention sign = SignConvention::theta_plus;
  double alpha = 1.0;
  FiducialSolution source;  // profile the construction read from
};

// Scalar densities of the local model field on the profile grid.
struct ModelDensities {
  RadialGrid grid;
  std::vector<double> phi_sq;   // |phi|^2 = (1/4) alpha s (e^{2u} + e^{-2u}); > 0
  std::vector<double> bracket;  // <i sigma3 [phi*, phi]> = alpha s sinh(2u); < 0
};

struct Lemma73Report {
  double xi0 = 0.0;     // Xi at s = 0
  double I_dxi = 0.0;   // 2 pi int (Xi')^2 s ds
  double I_phixi = 0.0; // 2 pi int |phi|^2 Xi^2 s ds
};

XiProfile xi_from_f(const FiducialSolution& sol, SignConvention sign);

// theta_plus only (throws BadParams otherwise)
ModelDensities model_densities(const XiProfile& xi);

// Exact-identity integrals; requires theta_plus and s_max >= 15 alpha^{-1/3}.
// Throws QuadratureUnconverged when the Richardson estimate of the
// quadrature error exceeds 1e-6 relative.
Lemma73Report lemma73_report(const XiProfile& xi);

// 2 pi int [ -1/2 (Xi + Xi^3) bracket + 2 phi_sq Xi^2 + 1/4 (Xi')^2 ] s ds
double pairing_integral_k0(const XiProfile& xi);

// The 1/z-mode pairing in its regularized form: 1 + 3 Xi is evaluated as
// -2 s v' so every term is O(s) at the origin. Strictly positive; scales
// like alpha^{2/3}.
double pairing_integral_km1(const XiProfile& xi);

// (2 pi / 24) int chi'(s) (s Xi')^2 ds: the boundary pairing left after
// telescoping a total derivative against the cutoff. Exactly 0 for the
// constant-1 cutoff; tiny whenever the transition sits where s Xi' has
// already decayed.
double telescoping_check(const XiProfile& xi, const CutoffSpec& cutoff);

}  // namespace lab
