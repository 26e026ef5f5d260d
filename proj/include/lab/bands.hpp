#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lab/errors.hpp"

namespace lab {

// Two-block symmetric matrix [[s, l], [l^T, S]] with a small block s whose
// spectrum stays near 0 and a large block S whose spectrum stays away from
// (-1, 1); l couples them.
struct BlockMatrix {
  Eigen::MatrixXd s_block;  // d x d symmetric
  Eigen::MatrixXd S_block;  // (k-d) x (k-d) symmetric
  Eigen::MatrixXd l_block;  // d x (k-d)

  int d() const { return static_cast<int>(s_block.rows()); }
  int k() const { return d() + static_cast<int>(S_block.rows()); }
  Eigen::MatrixXd assemble() const;
};

// Max displacement between the sorted spectra of S and S+G. Guaranteed to be
// at most the spectral norm of G; a violation is raised as a hard error.
double weyl_check(const Eigen::MatrixXd& S, const Eigen::MatrixXd& G);

struct BlockSplitReport {
  std::vector<double> small_distances;  // per near-s eigenvalue, distance to spec(s)
  std::vector<double> large_distances;  // per near-S eigenvalue, distance to spec(S)
  double l_norm = 0.0;
  double bound = 0.0;  // kappa * l_norm^2
};

// Classify the spectrum of the assembled matrix: exactly d eigenvalues within
// kappa*|l|^2 of spec(s) and k-d within the same distance of spec(S).
BlockSplitReport block_split_check(const BlockMatrix& M, double kappa);

// Eigenvalue band model: a 2-dimensional block with entries ~ zC*(4g-4)/r^2
// and a (6g-8)-dimensional block with entries ~ zK*alpha1^{2/3}/r^{2/3},
// weakly coupled. The whole matrix carries an overall factor m.
struct BandModel {
  int g = 2;
  double r = 0.0;
  double m = 0.0;
  std::vector<double> alpha1_list;
  double zC = 0.0;
  double zK = 0.0;
  BlockMatrix unit_m;  // assembled blocks for m = 1

  // sorted ascending; exactly m * spectrum(unit_m), so linearity in m is exact
  std::vector<double> eigenvalues() const;
  // smallest large-band eigenvalue over largest small-band eigenvalue
  double band_ratio() const;
};

BandModel assemble_band_model(int g, double r, double m, const std::vector<double>& alpha1_list,
                              double zC, double zK, double l_scale = 0.5,
                              std::uint64_t seed = 0x5eedULL);

}  // namespace lab
