#include "lab/bands.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lab {

namespace {

void require_symmetric(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() != A.cols()) throw NotSymmetric(std::string(what) + " is not square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NotSymmetric(std::string(what) + " deviates from symmetry");
}

Eigen::VectorXd sorted_spectrum(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues();  // ascending
}

double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(0);
}

}  // namespace

Eigen::MatrixXd BlockMatrix::assemble() const {
  const int dd = d(), kk = k();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(kk, kk);
  M.topLeftCorner(dd, dd) = s_block;
  M.bottomRightCorner(kk - dd, kk - dd) = S_block;
  M.topRightCorner(dd, kk - dd) = l_block;
  M.bottomLeftCorner(kk - dd, dd) = l_block.transpose();
  return M;
}

double weyl_check(const Eigen::MatrixXd& S, const Eigen::MatrixXd& G) {
  require_symmetric(S, "base matrix");
  require_symmetric(G, "perturbation");
  if (S.rows() != G.rows()) throw BadDimensions("base and perturbation dimensions differ");

  const Eigen::VectorXd a = sorted_spectrum(S);
  const Eigen::VectorXd b = sorted_spectrum(S + G);
  const double disp = (a - b).cwiseAbs().maxCoeff();
  const double g_norm = spectral_norm(G);
  if (disp > g_norm + 1e-12 * std::max(1.0, g_norm))
    throw LabError("eigenvalue displacement exceeds the perturbation norm");
  return disp;
}

BlockSplitReport block_split_check(const BlockMatrix& M, double kappa) {
  require_symmetric(M.s_block, "small block");
  require_symmetric(M.S_block, "large block");
  if (M.l_block.rows() != M.s_block.rows() || M.l_block.cols() != M.S_block.rows())
    throw BadDimensions("coupling block shape mismatch");
  if (!(kappa > 0.0)) throw BadParams("kappa must be positive");

  const double s_norm = spectral_norm(M.s_block);
  const double l_norm = spectral_norm(M.l_block);
  const Eigen::VectorXd spec_S = sorted_spectrum(M.S_block);
  const double S_min_abs = spec_S.cwiseAbs().minCoeff();
  const double slack = 1e-12;
  if (s_norm > 1.0 / kappa + slack) throw HypothesisViolated("small block norm above 1/kappa");
  if (S_min_abs < 1.0 - slack) throw HypothesisViolated("large block spectrum enters (-1,1)");
  if (l_norm > 1.0 / (kappa * kappa) + slack)
    throw HypothesisViolated("coupling norm above 1/kappa^2");

  const Eigen::VectorXd spec_s = sorted_spectrum(M.s_block);
  const Eigen::VectorXd spec_M = sorted_spectrum(M.assemble());

  BlockSplitReport rep;
  rep.l_norm = l_norm;
  rep.bound = kappa * l_norm * l_norm;
  for (int i = 0; i < spec_M.size(); ++i) {
    const double ds = (spec_s.array() - spec_M(i)).abs().minCoeff();
    const double dS = (spec_S.array() - spec_M(i)).abs().minCoeff();
    if (ds <= dS)
      rep.small_distances.push_back(ds);
    else
      rep.large_distances.push_back(dS);
  }
  const int d = M.d(), k = M.k();
  if (static_cast<int>(rep.small_distances.size()) != d ||
      static_cast<int>(rep.large_distances.size()) != k - d)
    throw LabError("eigenvalue classification does not split d / k-d");
  for (double v : rep.small_distances)
    if (v > rep.bound + slack) throw LabError("near-s eigenvalue outside the stated bound");
  for (double v : rep.large_distances)
    if (v > rep.bound + slack) throw LabError("near-S eigenvalue outside the stated bound");
  return rep;
}

std::vector<double> BandModel::eigenvalues() const {
  const Eigen::VectorXd ev = sorted_spectrum(unit_m.assemble());
  std::vector<double> out(ev.size());
  for (int i = 0; i < ev.size(); ++i) out[i] = m * ev(i);
  return out;
}

double BandModel::band_ratio() const {
  const std::vector<double> ev = eigenvalues();
  return ev[2] / ev[1];
}

BandModel assemble_band_model(int g, double r, double m, const std::vector<double>& alpha1_list,
                              double zC, double zK, double l_scale, std::uint64_t seed) {
  if (g < 2) throw BadParams("genus must be at least 2");
  if (!(r > 0.0) || !(m > 0.0)) throw BadParams("r and m must be positive");
  if (!(zC > 0.0) || !(zK > 0.0)) throw BadParams("band constants must be positive");
  if (l_scale < 0.0 || l_scale > 0.5) throw BadParams("coupling scale outside [0, 0.5]");
  const int n_zero = 4 * g - 4;
  if (static_cast<int>(alpha1_list.size()) != n_zero)
    throw BadDimensions("alpha1_list must have 4g-4 entries");
  for (double a : alpha1_list)
    if (!(a > 0.0)) throw BadParams("alpha1 entries must be positive");

  BandModel model;
  model.g = g;
  model.r = r;
  model.m = m;
  model.alpha1_list = alpha1_list;
  model.zC = zC;
  model.zK = zK;

  const int d = 2;
  const int kd = 6 * g - 8;
  model.unit_m.s_block = Eigen::MatrixXd::Identity(d, d) * (zC * n_zero / (r * r));
  model.unit_m.S_block = Eigen::MatrixXd::Zero(kd, kd);
  for (int i = 0; i < kd; ++i) {
    const double a1 = alpha1_list[i % n_zero];
    model.unit_m.S_block(i, i) = zK * std::pow(a1, 2.0 / 3.0) * std::pow(r, -2.0 / 3.0);
  }

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, kd);
  if (l_scale > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < kd; ++j) l(i, j) = gauss(rng);
    const double norm = spectral_norm(l);
    if (norm > 0.0) l *= l_scale / (r * r) / norm;
  }
  model.unit_m.l_block = l;
  return model;
}

}  // namespace lab
