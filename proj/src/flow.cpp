#include "lab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lab {

namespace {

double mat_scale(const Eigen::MatrixXd& M) {
  return std::max(1.0, M.cwiseAbs().maxCoeff());
}

void require_symmetric(const Eigen::MatrixXd& M, const char* what) {
  if (M.rows() != M.cols()) throw NotSymmetric(std::string(what) + " is not square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * mat_scale(M))
    throw NotSymmetric(std::string(what) + " deviates from symmetry");
}

// negatives counted strictly below the zero band [-tol, tol]
int n_neg(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double tol = 1e-12 * mat_scale(M);
  int c = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < -tol) ++c;
  return c;
}

int kernel_dim(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double tol = 1e-10 * mat_scale(M);
  int c = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::fabs(es.eigenvalues()(i)) <= tol) ++c;
  return c;
}

struct Segment {
  double ta, tb;
  const Eigen::MatrixXd *Ma, *Mb;
  Eigen::MatrixXd at(double t) const {
    const double w = (t - ta) / (tb - ta);
    return (1.0 - w) * (*Ma) + w * (*Mb);
  }
};

// Bisection on the negative-eigenvalue count. Each level splits the pending
// crossing count between the halves; a half whose count stays put is dropped.
void refine(const Segment& seg, double ta, int na, double tb, int nb, double res,
            std::vector<std::pair<double, int>>* out) {
  const int delta = na - nb;  // net upward crossings in (ta, tb)
  if (delta == 0) return;
  if (tb - ta <= res) {
    const double t = 0.5 * (ta + tb);
    const int sign = delta > 0 ? 1 : -1;
    for (int i = 0; i < std::abs(delta); ++i) out->emplace_back(t, sign);
    return;
  }
  const double tm = 0.5 * (ta + tb);
  const int nm = n_neg(seg.at(tm));
  refine(seg, ta, na, tm, nm, res, out);
  refine(seg, tm, nm, tb, nb, res, out);
}

void validate_path(const FlowPath& path) {
  const std::size_t m = path.params.size();
  if (m < 2 || path.matrices.size() != m)
    throw BadParams("path needs matching params and matrices, at least two samples");
  const Eigen::Index n = path.matrices.front().rows();
  for (std::size_t i = 0; i < m; ++i) {
    if (path.matrices[i].rows() != n || path.matrices[i].cols() != n)
      throw BadDimensions("path matrices must share one dimension");
    require_symmetric(path.matrices[i], "path matrix");
    if (i > 0 && !(path.params[i] > path.params[i - 1]))
      throw BadParams("path parameters must be strictly increasing");
  }
}

}  // namespace

FlowResult spectral_flow(const FlowPath& path) {
  validate_path(path);
  const int kd_front = kernel_dim(path.matrices.front());
  if (kd_front > 0) throw EndpointKernel("initial matrix has kernel", kd_front);
  const int kd_back = kernel_dim(path.matrices.back());
  if (kd_back > 0) throw EndpointKernel("final matrix has kernel", kd_back);

  const std::size_t m = path.params.size();
  std::vector<int> counts(m);
  for (std::size_t i = 0; i < m; ++i) counts[i] = n_neg(path.matrices[i]);

  const double span = path.params.back() - path.params.front();
  const double res = 1e-9 * span;
  FlowResult result;
  std::vector<std::pair<double, int>> found;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const Segment seg{path.params[i], path.params[i + 1], &path.matrices[i],
                      &path.matrices[i + 1]};
    // midpoint probe: a count outside the endpoint range means an eigenvalue
    // crossed zero and returned inside one step, invisible to the samples
    const int nm = n_neg(seg.at(0.5 * (seg.ta + seg.tb)));
    if (nm < std::min(counts[i], counts[i + 1]) || nm > std::max(counts[i], counts[i + 1]))
      throw StepTooCoarse("eigenvalue crosses zero and returns within one step");
    refine(seg, seg.ta, counts[i], seg.tb, counts[i + 1], res, &found);
  }
  std::sort(found.begin(), found.end());
  for (const auto& [t, s] : found) {
    result.crossings.push_back(t);
    result.crossing_signs.push_back(s);
    result.flow += s;
  }
  // the per-step differencing telescopes; keep the exact endpoint form
  result.flow = counts.front() - counts.back();
  return result;
}

int gamma_pairing_flow(const FlowPath& path, const Eigen::MatrixXd& J) {
  validate_path(path);
  const Eigen::Index n = J.rows();
  if (J.cols() != n || n != path.matrices.front().rows())
    throw BadDimensions("J dimension mismatch");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  if ((J.transpose() * J - I).cwiseAbs().maxCoeff() > 1e-12)
    throw NotAnticommuting("J is not orthogonal");
  if ((J * J + I).cwiseAbs().maxCoeff() > 1e-12)
    throw NotAnticommuting("J squared is not -1");
  for (const auto& M : path.matrices)
    if ((J * M + M * J).cwiseAbs().maxCoeff() > 1e-12 * mat_scale(M))
      throw NotAnticommuting("path member fails to anti-commute with J");

  const int flow = spectral_flow(path).flow;
  if (flow != 0) throw LabError("paired spectrum produced nonzero flow");
  return flow;
}

namespace {

FlowPath sampled(double t0, double t1, int steps,
                 const std::function<Eigen::MatrixXd(double)>& f) {
  FlowPath p;
  for (int i = 0; i <= steps; ++i) {
    const double t = t0 + (t1 - t0) * double(i) / steps;
    p.params.push_back(t);
    p.matrices.push_back(f(t));
  }
  return p;
}

}  // namespace

StageReport stage_path_flow(const DiracModel& model, const Eigen::MatrixXd& eps_F, double R_max,
                            int steps_per_stage) {
  require_symmetric(model.A_part, "A part");
  require_symmetric(model.a_part, "a part");
  require_symmetric(eps_F, "perturbation");
  const Eigen::Index q = model.A_part.rows();
  if (model.a_part.rows() != q || eps_F.rows() != q)
    throw BadDimensions("model blocks must share one dimension");
  if (steps_per_stage < 2) throw BadParams("need at least two steps per stage");

  const Eigen::MatrixXd D = model.A_part + model.a_part;
  const Eigen::MatrixXd Iq = Eigen::MatrixXd::Identity(q, q);
  auto embed_z = [&](const Eigen::MatrixXd& B) {  // sigma_z (x) B
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * q, 2 * q);
    M.topLeftCorner(q, q) = B;
    M.bottomRightCorner(q, q) = -B;
    return M;
  };
  auto embed_x = [&](double R) {  // R * sigma_x (x) I
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * q, 2 * q);
    M.topRightCorner(q, q) = R * Iq;
    M.bottomLeftCorner(q, q) = R * Iq;
    return M;
  };
  auto embed_diag = [&](const Eigen::MatrixXd& F) {  // I_2 (x) F
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * q, 2 * q);
    M.topLeftCorner(q, q) = F;
    M.bottomRightCorner(q, q) = F;
    return M;
  };

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
  const double D_norm = q > 0 ? svd.singularValues()(0) : 0.0;
  if (!(R_max > 2.0 * D_norm)) throw BadParams("R_max must exceed twice the pencil norm");

  Eigen::JacobiSVD<Eigen::MatrixXd> svdF(eps_F);
  const double F_norm = (eps_F.size() > 0 && eps_F.cwiseAbs().maxCoeff() > 0.0)
                            ? svdF.singularValues()(0)
                            : 0.0;

  StageReport rep;
  rep.R_max = R_max;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(embed_z(D), Eigen::EigenvaluesOnly);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::fabs(es.eigenvalues()(i)) <= F_norm) ++rep.small_count;

  const int s = steps_per_stage;
  const Eigen::MatrixXd base = embed_z(D);
  rep.stage_flow[0] = spectral_flow(sampled(0, 1, s, [&](double t) -> Eigen::MatrixXd {
                        return base + (1 - t) * embed_diag(eps_F);
                      })).flow;
  rep.stage_flow[1] = spectral_flow(sampled(0, 1, s, [&](double t) -> Eigen::MatrixXd {
                        return base + embed_x(t * R_max);
                      })).flow;
  rep.stage_flow[2] = spectral_flow(sampled(0, 1, s, [&](double t) -> Eigen::MatrixXd {
                        return embed_z(model.A_part + (1 - t) * model.a_part) + embed_x(R_max);
                      })).flow;
  rep.stage_flow[3] = spectral_flow(sampled(0, 1, s, [&](double t) -> Eigen::MatrixXd {
                        return embed_z((1 - t) * model.A_part + t * Iq) + embed_x(R_max);
                      })).flow;
  rep.stage_flow[4] = spectral_flow(sampled(0, 1, s, [&](double t) -> Eigen::MatrixXd {
                        return embed_z(Iq) + embed_x((1 - t) * R_max);
                      })).flow;

  rep.total = 0;
  for (int f : rep.stage_flow) rep.total += f;
  for (int i = 2; i < 5; ++i)
    if (rep.stage_flow[i] != 0) throw LabError("gapped stage produced nonzero flow");
  if (std::abs(rep.total) > rep.small_count)
    throw LabError("total flow exceeds the small-eigenvalue count");
  return rep;
}

}  // namespace lab
