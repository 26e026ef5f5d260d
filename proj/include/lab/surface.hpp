#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "lab/errors.hpp"

namespace lab {

// Zero placement for the synthetic torus density. Positions are physical
// coordinates on [0, 2pi)^2; build_synthetic_q snaps each one to the nearest
// node of the n x n grid, so layouts meant to be compared across resolutions
// should use positions exactly representable on every grid involved.
struct TorusZeroSpec {
  int n = 128;
  std::vector<std::array<double, 2>> zeros_plus;
  std::vector<std::array<double, 2>> zeros_minus;
};

// Default layout: two plus/minus dipoles on the main diagonal, vertical
// offset 2 pi * 11/128 from the dipole centers (pi/2, pi/2) and
// (3pi/2, 3pi/2). A reflection across y = pi/2 exchanges the two zero sets,
// and the offset is tuned so the regular part of mu_diamond at the zeros is
// near zero, which is what lets the near-zero values of the solved field
// match the radial model with the measured |q1| slope alone.
TorusZeroSpec default_torus_spec(int n = 128);

// Synthetic stand-in for a quadratic differential density on the flat torus.
// |q1| = exp(sum of periodic log factors), one factor per zero, each built
// from the mean-zero lattice Green's function so that it vanishes linearly
// at its zero and mu_diamond is discretely harmonic away from the zero set
// to roundoff. Node (i, j) sits at (i h, j h), h = 2 pi / n, row-major.
struct TorusData {
  int n = 0;
  std::vector<std::complex<double>> q1;           // density; zero phase
  std::vector<std::array<double, 2>> zeros_plus;  // snapped positions
  std::vector<std::array<double, 2>> zeros_minus;
  std::vector<double> w_plus_sq;   // |first factor|^2,  vanishes on zeros_plus
  std::vector<double> w_minus_sq;  // |second factor|^2, vanishes on zeros_minus
  std::vector<double> mu_diamond;  // (1/4) ln(w_minus_sq / w_plus_sq)
  std::vector<double> theta_dist;  // periodic distance to the zero set,
                                   // smoothly capped at theta_cap far away
  double theta_cap = 2.0;

  double h() const { return 6.283185307179586232 / n; }
  int node(int i, int j) const { return i * n + j; }
};

// Builds the synthetic density. The splitting of the factors between the two
// sides carries one free relative scale; it is fixed so the regular parts of
// mu_diamond at the two zero sets balance, the convention the near-zero
// oracle of two_regime_report presumes. Throws ZerosTooClose if any two
// snapped zeros are nearer than 10 grid cells, BadParams for fewer than two
// zeros on a side, mismatched counts, or n below 16.
TorusData build_synthetic_q(const TorusZeroSpec& spec);

// Same data with the roles of the two factors exchanged; mu_diamond negates
// bitwise.
TorusData swap_sides(const TorusData& data);

// Converged solution of the semilinear equation
//   (d'd mu) + (1/2) r^2 (e^{2 mu} w_plus_sq - e^{-2 mu} w_minus_sq) = 0
// on the data's grid, found as the minimizer of the convex energy
//   E = (1/2) sum_edges (d mu)^2
//     + (1/4) r^2 h^2 sum (e^{2 mu} w_plus_sq + e^{-2 mu} w_minus_sq).
struct TorusField {
  const TorusData* data = nullptr;
  double r = 0.0;
  double tol = 0.0;
  std::vector<double> mu;
  int newton_iters = 0;
  double energy = 0.0;
  double residual_max = 0.0;  // sup norm of the discrete equation
  std::vector<double> energy_history;  // at the init and each accepted step
  int pcg_iters = 0;                   // inner iterations, all steps
};

// Damped Newton on the discrete Euler-Lagrange system; the SPD Jacobian
// (five-point Laplacian plus r^2 (e^{2mu} w+ + e^{-2mu} w-) on the diagonal)
// is solved by Jacobi-preconditioned CG with the forcing tolerance slaved to
// the Newton residual, and steps are accepted under an energy decrease test.
// Throws BadParams (r < 2, wrong init size, non-finite init, tol <= 0),
// NewtonDiverged (residual overflow, failed line search, iteration budget),
// SingularJacobian if CG meets nonpositive curvature (must not happen: the
// energy is strictly convex).
TorusField solve_mu(const TorusData& data, double r, const std::vector<double>& init,
                    double tol);

// mu_diamond clipped to [-(1/3) ln r, (1/3) ln r]: the expected magnitude of
// the solution at the zeros; a cheap warm start far from the zero set.
std::vector<double> clamped_diamond_init(const TorusData& data, double r);

struct TorusZeroReport {
  std::array<double, 2> pos{};
  int side = 0;         // +1 zero of the first factor, -1 second
  double near_value = 0.0;    // side * mu(zero) - (1/3) ln r
  double alpha1_local = 0.0;  // measured |q1| / dist on a near annulus
};

// Decay fit of the far field against the near-zero profile. The fit regresses
// log|mu - mu_diamond| on r * theta^{3/2} over nodes with theta_dist in
// [3 r^{-2/3}, theta_cap / 2], skipping nodes where the difference has
// decayed to roundoff. Derivative sup norms are reported unscored.
struct TwoRegimeReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int fit_nodes = 0;
  double grad_scale = 0.0;  // sup r^{-2/3} |centered gradient of mu|
  double hess_scale = 0.0;  // sup r^{-4/3} |second differences of mu|
  std::vector<TorusZeroReport> zeros;
};

// Throws InsufficientNodes when the fit window holds fewer than 16 usable
// nodes (it empties once 3 r^{-2/3} exceeds theta_cap / 2).
TwoRegimeReport two_regime_report(const TorusField& field);

// Solves the data and its side-swapped copy from the zero init and returns
// sup |mu + mu_swapped|; the two systems are exact mirrors, so this measures
// only solver slop and is bounded by 2 tol.
double swap_symmetry_check(const TorusData& data, double r, double tol = 1e-10);

// Grid dump: comment header (n, r, zero lists), then one
// i,j,x,y,mu,mu_diamond,theta_dist row per node. Throws IoFailure.
void export_field_csv(const TorusField& field, const std::string& path);

// JSON object with the fit block and one entry per zero.
std::string two_regime_report_json(const TwoRegimeReport& report);

// Row-parallel kernels behind solve_mu, with the serial reference path
// selected by parallel = false. Outputs are bitwise identical across the two
// paths: every node is independent, and reductions accumulate fixed-order
// per-row partials.

// residual of the discrete equation and the Jacobian diagonal at mu
void torus_residual(const TorusData& data, double r, const std::vector<double>& mu,
                    std::vector<double>& residual, std::vector<double>& jac_diag,
                    bool parallel);
// out = (4x - neighbor sum) / h^2 + jac_diag .* x on the periodic grid
void torus_apply_jacobian(int n, double h, const std::vector<double>& jac_diag,
                          const std::vector<double>& x, std::vector<double>& out,
                          bool parallel);
// the discrete energy E defined at TorusField
double torus_energy(const TorusData& data, double r, const std::vector<double>& mu,
                    bool parallel);

}  // namespace lab
