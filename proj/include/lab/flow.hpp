#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "lab/errors.hpp"

namespace lab {

// A sampled path of symmetric matrices; between samples the path is the
// linear interpolation of its neighbors.
struct FlowPath {
  std::vector<double> params;
  std::vector<Eigen::MatrixXd> matrices;
};

struct FlowResult {
  int flow = 0;
  std::vector<double> crossings;    // refined parameter values
  std::vector<int> crossing_signs;  // +1 negative-to-positive, -1 the reverse
};

// Net signed count of eigenvalue zero crossings along the path, computed by
// differencing the negative-eigenvalue count (exact for the net number), with
// bisection refinement of each crossing location.
FlowResult spectral_flow(const FlowPath& path);

// Flow of a path whose members all anti-commute with one orthogonal J with
// J^2 = -1; the spectrum is then symmetric about 0 and the flow must vanish.
int gamma_pairing_flow(const FlowPath& path, const Eigen::MatrixXd& J);

// Finite model of the operator pencil: the symmetric matrix is
// sigma_z (x) (A_part + a_part) acting on R^{2q}.
struct DiracModel {
  Eigen::MatrixXd A_part;
  Eigen::MatrixXd a_part;
};

struct StageReport {
  std::array<int, 5> stage_flow{};
  int total = 0;
  int small_count = 0;  // eigenvalues of the base pencil within |eps| norm
  double R_max = 0.0;
};

// Five-stage homotopy: (1) shrink the perturbation, (2) grow the R*Gamma
// term, (3) shrink a_part, (4) deform A_part to the identity, (5) shrink R.
// Stages 3-5 must carry zero flow and |total| <= small_count.
StageReport stage_path_flow(const DiracModel& model, const Eigen::MatrixXd& eps_F, double R_max,
                            int steps_per_stage = 48);

}  // namespace lab
