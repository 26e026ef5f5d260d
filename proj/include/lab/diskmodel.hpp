#pragma once

#include <complex>
#include <vector>

#include "lab/fiducial.hpp"
#include "lab/grid.hpp"
#include "lab/xi.hpp"

namespace lab {

// Dirichlet solve of the radial disk equation
//   -(v'' + v'/s) + (1/2) alpha (e^{2v}s^2 - e^{-2v}) = 0,  alpha = r^2 alpha1,
// on [0, r0] with v(r0) = -(1/2) ln r0 and regularity v'(0) = 0, together
// with the remainder y = v - f(alpha^{1/3} s) - (1/6) ln alpha against the
// whole-plane profile f.
struct DiskVSolution {
  double r = 0.0;
  double alpha1 = 0.0;
  double r0 = 0.0;
  RadialGrid grid;  // on [0, r0]
  std::vector<double> v;
  std::vector<double> y;
  double sup_y = 0.0;
  std::vector<double> energy_history;  // one entry per accepted Newton step
  int newton_iters = 0;
};

// Throws BadParams (r < 2, alpha1 <= 0, r0 outside (0, 1]) or NewtonDiverged.
DiskVSolution solve_v_disk(double r, double alpha1, double r0);

// Max plug-in residual of the closed-form lower-mode profile
// (3/(3+2k)) s^k Xi in the discrete mode operator
//   -(h'' + h'/s - k^2 h/s^2) + alpha(e^{2v_f}s^2 + e^{-2v_f}) h
//     = alpha(e^{2v_f}s^2 - e^{-2v_f}) s^k
// (the holomorphic upper mode s^k is annihilated by the k-mode Laplacian, so
// its potential term is carried on the right-hand side), measured on nodes
// with s in [s_min, r0], r0 = 0.2 s_max. The rows evaluate the factored form
// g = h/s^k in the variable w = s^2, where the mode is analytic through the
// axis, so the returned residual is the scheme's own truncation error,
// O(spacing^2) uniformly in s.
// Throws BadParams (k < -1, s_min <= 0 for the k = -1 pole, wrong convention).
double verify_exact_mode(const XiProfile& xi, int k, double s_min);

struct ModeSolution {
  int k = 0;
  std::complex<double> a_k;
  RadialGrid grid;  // prefix of the xi grid, [0, r0]
  std::vector<double> h;
  double predicted_coeff = 0.0;  // 3/(3+2k)
  double sup_deviation = 0.0;    // vs predicted_coeff |a_k| s^k Xi on [0, r0/2]
};

// Linear positive-definite BVP for the lower-mode radial factor driven by
// the upper mode |a_k| s^k, outer Dirichlet from the closed-form model,
// inner regularity (h'(0) = 0 for k = 0, h(0) = 0 for k >= 1).
// Throws BadParams (k < 0, wrong convention); SingularSystem should not
// occur (the operator is positive definite).
ModeSolution solve_mode_bvp(const XiProfile& xi, int k, std::complex<double> a_k);

// Sensitivity of the mode solve to the potential source: repeats the BVP on
// the window [0, min(0.2 s_max, disk r0)] twice, once with the potential and
// drive rebuilt from the computed disk profile v and once from the exact
// model, identical Dirichlet data, and returns sup|h_v - h_model|. The disk
// solve must match the profile scale, alpha = r^2 alpha1; the gap it reports
// is carried by v - v_model and decays in r like the disk remainder.
// Throws BadParams (k < 0, scale mismatch, window without interior nodes,
// wrong convention).
double mode_potential_substitution(const XiProfile& xi, const DiskVSolution& disk, int k,
                                   std::complex<double> a_k);

struct Sigma3Mode {
  RadialGrid grid;
  std::vector<double> c;      // -(1/2) Xi
  double residual_max = 0.0;  // plug-in residual, 4th-order stencils
};

// The diagonal-gauge model profile c = -(1/2) Xi (the amplitude -1/2
// instance of the k = 0 mode), with its plug-in residual in the radial
// model equation. Throws BadParams on the wrong convention.
Sigma3Mode sigma3_mode(const XiProfile& xi);

}  // namespace lab
