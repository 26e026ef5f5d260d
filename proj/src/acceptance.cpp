#include "lab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "lab/bands.hpp"
#include "lab/diskmodel.hpp"
#include "lab/fiducial.hpp"
#include "lab/fit.hpp"
#include "lab/flow.hpp"
#include "lab/grid.hpp"
#include "lab/normalize.hpp"
#include "lab/rng.hpp"
#include "lab/surface.hpp"
#include "lab/xi.hpp"

namespace lab::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double computed, double exact) {
  return std::abs(computed - exact) / std::abs(exact);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Collects sub-checks of one criterion. The detail string keeps the measured
// numbers from note() and, on failure, the names of the violated gates.
struct Checker {
  bool ok = true;
  std::string notes;
  std::string failures;

  void gate(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!failures.empty()) failures += "; ";
    failures += what;
  }
  void note(const std::string& s) {
    if (!notes.empty()) notes += ", ";
    notes += s;
  }
  std::string detail() const {
    if (ok) return notes;
    return failures.empty() ? notes : "violated: " + failures;
  }
};

// Heavy inputs shared across criteria, built once on first use. Criterion 1
// owns the alpha=1 solve so its reported runtime covers the whole pipeline.
struct Shared {
  std::optional<FiducialSolution> f1_;
  std::optional<XiProfile> x1_, x8_, x64_, xf_;

  const FiducialSolution& f1() {
    if (!f1_) f1_ = solve_fiducial(1.0, GridSpec{}, 1e-10);
    return *f1_;
  }
  const XiProfile& x1() {
    if (!x1_) x1_ = xi_from_f(f1(), SignConvention::theta_plus);
    return *x1_;
  }
  const XiProfile& x8() {
    if (!x8_)
      x8_ = xi_from_f(solve_fiducial(8.0, GridSpec{}.scaled(8.0), 4e-9),
                      SignConvention::theta_plus);
    return *x8_;
  }
  const XiProfile& x64() {
    if (!x64_)
      x64_ = xi_from_f(solve_fiducial(64.0, GridSpec{}.scaled(64.0), 1.6e-8),
                       SignConvention::theta_plus);
    return *x64_;
  }
  // Finer grid used by the plug-in order studies; halving starts from here.
  const XiProfile& xf() {
    if (!xf_)
      xf_ = xi_from_f(solve_fiducial(1.0, GridSpec{20.0, 4000, 5e-5}, 4e-10),
                      SignConvention::theta_plus);
    return *xf_;
  }
};

// Area integral of a radial density: 2*pi * int y(s) s-weighted values.
// Callers bake the s weight into y, matching the module conventions.
double quad(const RadialGrid& g, const std::vector<double>& y) {
  return 2.0 * kPi * integrate(g.s, y);
}

using Body = std::function<void(Checker&, Shared&)>;

CriterionResult timed(int index, const std::string& name, double budget_s,
                      Shared& sh, const Body& body) {
  CriterionResult res;
  res.index = index;
  res.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Checker c;
    body(c, sh);
    res.passed = c.ok;
    res.detail = c.detail();
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && res.seconds > budget_s) {
    res.passed = false;
    res.detail += fmt("; runtime %.1fs over %.0fs budget", res.seconds, budget_s);
  }
  return res;
}

// ---- criterion bodies -------------------------------------------------------

void c1_identities(Checker& c, Shared& sh) {
  const auto rep = lemma73_report(sh.x1());
  const double xi0_err = std::abs(rep.xi0 - (-1.0 / 3.0));
  const double dxi_rel = rel_err(rep.I_dxi, 17.0 * kPi / 162.0);
  const double phixi_rel = rel_err(rep.I_phixi, 37.0 * kPi / 648.0);
  c.gate(xi0_err <= 1e-8, fmt("|xi0 + 1/3| = %.3g > 1e-8", xi0_err));
  c.gate(dxi_rel <= 1e-4, fmt("gradient integral rel err %.3g > 1e-4", dxi_rel));
  c.gate(phixi_rel <= 1e-4, fmt("density integral rel err %.3g > 1e-4", phixi_rel));
  c.gate(sh.x1().grid.s_max >= 15.0, "domain shorter than 15");
  c.note(fmt("xi0 err %.2g, rel errs %.2g / %.2g", xi0_err, dxi_rel, phixi_rel));
}

void c2_combination(Checker& c, Shared& sh) {
  const auto rep = lemma73_report(sh.x1());
  const double combo = rep.I_dxi + 4.0 * rep.I_phixi;
  const double rel = rel_err(combo, kPi / 3.0);
  c.gate(rel <= 1e-4, fmt("combined integral rel err %.3g > 1e-4", rel));
  c.note(fmt("I_dxi + 4 I_phixi = %.9f, rel err %.2g", combo, rel));
}

void c3_pairing_k0(Checker& c, Shared& sh) {
  const auto& x = sh.x1();
  const double v1 = pairing_integral_k0(x);
  const double rel = rel_err(v1, 17.0 * kPi / 324.0);
  c.gate(rel <= 1e-4, fmt("pairing value rel err %.3g > 1e-4", rel));

  // Termwise split: potential, density, and gradient contributions.
  const auto dens = model_densities(x);
  const std::size_t n = x.grid.n() + 1;
  std::vector<double> w1(n), w2(n), w3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = x.grid.s[i];
    const double xi = x.xi[i];
    w1[i] = -0.5 * (xi + xi * xi * xi) * dens.bracket[i] * s;
    w2[i] = 2.0 * dens.phi_sq[i] * xi * xi * s;
    w3[i] = 0.25 * x.xi_prime[i] * x.xi_prime[i] * s;
  }
  const double t1 = quad(x.grid, w1), t2 = quad(x.grid, w2), t3 = quad(x.grid, w3);
  const double e1 = -19.0 * kPi / 216.0, e2 = 37.0 * kPi / 324.0, e3 = 17.0 * kPi / 648.0;
  c.gate(rel_err(t1, e1) <= 1e-4, fmt("potential term rel err %.3g", rel_err(t1, e1)));
  c.gate(rel_err(t2, e2) <= 1e-4, fmt("density term rel err %.3g", rel_err(t2, e2)));
  c.gate(rel_err(t3, e3) <= 1e-4, fmt("gradient term rel err %.3g", rel_err(t3, e3)));

  const double v8 = pairing_integral_k0(sh.x8());
  const double drift = rel_err(v8, v1);
  c.gate(drift <= 1e-5, fmt("scale drift %.3g > 1e-5", drift));
  c.note(fmt("value rel err %.2g, scale drift %.2g", rel, drift));
}

void c4_pairing_km1(Checker& c, Shared& sh) {
  const auto& x = sh.x1();
  const double z1 = pairing_integral_km1(x);
  c.gate(z1 > 0.0, fmt("value %.3g not positive", z1));

  const double z8 = pairing_integral_km1(sh.x8());
  const double z64 = pairing_integral_km1(sh.x64());
  const double d8 = rel_err(z8 / std::pow(8.0, 2.0 / 3.0), z1);
  const double d64 = rel_err(z64 / std::pow(64.0, 2.0 / 3.0), z1);
  c.gate(d8 <= 1e-4, fmt("scaled value at alpha=8 drifts %.3g", d8));
  c.gate(d64 <= 1e-4, fmt("scaled value at alpha=64 drifts %.3g", d64));

  // Independent coarse lower bounds; the pairing value must dominate both.
  const auto dens = model_densities(x);
  const std::size_t n = x.grid.n() + 1;
  std::vector<double> w1(n, 0.0), w2(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double s = x.grid.s[i];
    const double xi = x.xi[i];
    w1[i] = 1.5 * xi * xi * (2.0 * dens.phi_sq[i] + dens.bracket[i]) / s;
    w2[i] = 1.5 * x.xi_prime[i] * x.xi_prime[i] / s;
  }
  const double lb1 = quad(x.grid, w1), lb2 = quad(x.grid, w2);
  c.gate(z1 > lb1, fmt("value %.4f below first bound %.4f", z1, lb1));
  c.gate(z1 > lb2, fmt("value %.4f below second bound %.4f", z1, lb2));
  c.note(fmt("value %.6f, bounds %.4f / %.4f", z1, lb1, lb2));
}

void c5_modes(Checker& c, Shared& sh) {
  const auto& xc = sh.x1();
  const auto& xf = sh.xf();
  double min_order = 1e9;
  for (int k = -1; k <= 3; ++k) {
    const double s_min = (k == -1) ? 0.05 : 0.0;
    const double rc = verify_exact_mode(xc, k, s_min);
    const double rf = verify_exact_mode(xf, k, s_min);
    const double order = std::log2(rc / rf);
    min_order = std::min(min_order, order);
    c.gate(order >= 1.8, fmt("plug-in order %.2f at k=%d", order, static_cast<double>(k)));
  }

  double max_coeff_err = 0.0;
  for (int k = 0; k <= 2; ++k) {
    const double a_k = 1.0;
    const auto mc = solve_mode_bvp(xc, k, a_k);
    const auto mf = solve_mode_bvp(xf, k, a_k);
    // Richardson gap between the two grids estimates the discretization error.
    const double est = (4.0 / 3.0) * std::abs(mc.sup_deviation - mf.sup_deviation);
    c.gate(mc.sup_deviation <= 5.0 * std::max(est, 1e-14),
           fmt("deviation %.3g exceeds 5x estimate %.3g at k=%d", mc.sup_deviation, est,
               static_cast<double>(k)));

    const double coeff = 3.0 / (3.0 + 2.0 * k);
    for (std::size_t i = 0; i < mc.grid.s.size(); ++i) {
      const double s = mc.grid.s[i];
      if (s < 0.1 || s > 0.5) continue;
      const double pred = coeff * std::pow(s, k) * xc.xi[i];
      if (std::abs(pred) < 1e-12) continue;
      max_coeff_err = std::max(max_coeff_err, std::abs(mc.h[i] / (std::pow(s, k) * xc.xi[i]) - coeff));
    }
  }
  c.gate(max_coeff_err <= 1e-3, fmt("coefficient error %.3g > 1e-3", max_coeff_err));
  c.note(fmt("min order %.2f, coeff err %.2g", min_order, max_coeff_err));
}

void c6_disk(Checker& c, Shared&) {
  const std::vector<double> rs = {4.0, 6.0, 8.0, 10.0};
  std::vector<double> sup(rs.size()), log_sup(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_v_disk(rs[i], 1.0, 1.0);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.gate(dt < 10.0, fmt("solve at r=%.0f took %.1fs", rs[i], dt));
    sup[i] = sol.sup_y;
    log_sup[i] = std::log(sol.sup_y);
  }
  for (std::size_t i = 1; i < rs.size(); ++i)
    c.gate(sup[i] < sup[i - 1], fmt("remainder not decreasing at r=%.0f", rs[i]));
  const auto fit = line_fit(rs, log_sup);
  c.gate(fit.r2 >= 0.9, fmt("log-linear fit r2 %.3f < 0.9", fit.r2));
  c.gate(sup.back() < 1e-3, fmt("remainder %.3g at r=10 not below 1e-3", sup.back()));
  c.note(fmt("sup at r=10 is %.2g, fit r2 %.3f", sup.back(), fit.r2));
}

void c7_decay(Checker& c, Shared& sh) {
  const auto fit = decay_rate_fit(sh.f1(), 4.0, 9.0);
  const double target = 2.0 * std::sqrt(2.0) / 3.0;
  const double rel = std::abs(fit.slope / target - 1.0);
  c.gate(rel <= 0.03, fmt("decay slope off by %.2f%%", 100.0 * rel));
  c.note(fmt("slope %.6f vs %.6f (%.2f%%)", fit.slope, target, 100.0 * rel));
}

void c8_torus(Checker& c, Shared&) {
  const auto spec = default_torus_spec(256);
  const auto data = build_synthetic_q(spec);

  const auto zero = std::vector<double>(data.q1.size(), 0.0);
  const auto fa = solve_mu(data, 40.0, zero, 1e-10);
  const auto fb = solve_mu(data, 40.0, clamped_diamond_init(data, 40.0), 1e-10);
  double sup = 0.0;
  for (std::size_t i = 0; i < fa.mu.size(); ++i)
    sup = std::max(sup, std::abs(fa.mu[i] - fb.mu[i]));
  c.gate(sup <= 1e-8, fmt("init dependence %.3g > 1e-8", sup));

  const auto f20 = solve_mu(data, 20.0, clamped_diamond_init(data, 20.0), 1e-10);
  const auto rep40 = two_regime_report(fb);
  const auto rep20 = two_regime_report(f20);
  double near_drift = 0.0;
  for (std::size_t z = 0; z < rep40.zeros.size(); ++z)
    near_drift = std::max(near_drift,
                          std::abs(rep40.zeros[z].near_value - rep20.zeros[z].near_value));
  c.gate(near_drift < 0.05, fmt("near-zone drift %.3g under r doubling", near_drift));

  c.gate(rep40.slope < 0.0, fmt("far-field slope %.3f not negative", rep40.slope));
  c.gate(rep40.r_squared >= 0.85, fmt("far-field fit r2 %.3f < 0.85", rep40.r_squared));
  c.note(fmt("init gap %.2g, near drift %.3f, far r2 %.3f", sup, near_drift, rep40.r_squared));
}

std::vector<double> alpha1_list(int g) {
  std::vector<double> v(4 * g - 4);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 + 0.25 * static_cast<double>(i % 3);
  return v;
}

void c9_bands(Checker& c, Shared&) {
  const double zC = 17.0 * kPi / 324.0;
  for (int g : {2, 3, 4}) {
    const auto bm = assemble_band_model(g, 20.0, 0.01, alpha1_list(g), zC, 1.0);
    const auto ev = bm.eigenvalues();
    c.gate(static_cast<int>(ev.size()) == 6 * g - 6,
           fmt("eigenvalue count at genus %.0f", static_cast<double>(g)));
    // The split is wherever the largest relative gap sits; it must be at 2.
    std::size_t split = 0;
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
      const double gap = ev[i + 1] / ev[i];
      if (gap > best) {
        best = gap;
        split = i + 1;
      }
    }
    c.gate(split == 2, fmt("small band size %.0f at genus %.0f", static_cast<double>(split),
                           static_cast<double>(g)));
  }

  const std::vector<double> rs = {10.0, 20.0, 40.0, 80.0};
  const std::vector<double> a1 = {0.6, 1.0, 1.4, 0.9};
  std::vector<double> log_r(rs.size()), log_small(rs.size()), log_large(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto bm = assemble_band_model(2, rs[i], 0.01, a1, zC, 1.0);
    const auto ev = bm.eigenvalues();
    const double small = 0.5 * (ev[0] + ev[1]);
    double large = 0.0;
    for (std::size_t j = 2; j < ev.size(); ++j) large += ev[j];
    large /= static_cast<double>(ev.size() - 2);
    log_r[i] = std::log(rs[i]);
    log_small[i] = std::log(small);
    log_large[i] = std::log(large);
  }
  const auto fs = line_fit(log_r, log_small);
  const auto fl = line_fit(log_r, log_large);
  c.gate(std::abs(fs.slope - (-2.0)) <= 0.05 * 2.0, fmt("small-band slope %.3f", fs.slope));
  c.gate(std::abs(fl.slope - (-2.0 / 3.0)) <= 0.05 * (2.0 / 3.0),
         fmt("large-band slope %.3f", fl.slope));

  auto a = assemble_band_model(2, 20.0, 0.01, a1, zC, 1.0);
  auto b = a;
  b.m = 0.02;
  const auto ea = a.eigenvalues(), eb = b.eigenvalues();
  bool linear = ea.size() == eb.size();
  for (std::size_t i = 0; linear && i < ea.size(); ++i) linear = (eb[i] == 2.0 * ea[i]);
  c.gate(linear, "mass linearity not exact");
  c.note(fmt("slopes %.3f / %.3f", fs.slope, fl.slope));
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  return 0.5 * (a + a.transpose());
}

double snorm(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

void c10_matrix_suites(Checker& c, Shared&) {
  int weyl_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::mt19937_64 rng(trial_seed(0x11aaULL, static_cast<std::uint64_t>(trial)));
    const auto S = random_symmetric(rng, 8);
    const Eigen::MatrixXd G = 0.3 * random_symmetric(rng, 8);
    try {
      const double disp = weyl_check(S, G);
      if (disp > snorm(G) + 1e-12) ++weyl_violations;
    } catch (const std::exception&) {
      ++weyl_violations;
    }
  }
  c.gate(weyl_violations == 0,
         fmt("%.0f displacement violations", static_cast<double>(weyl_violations)));

  int split_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::mt19937_64 rng(trial_seed(0x22bbULL, static_cast<std::uint64_t>(trial)));
    std::uniform_int_distribution<int> dd(1, 3), dk(2, 6);
    std::uniform_real_distribution<double> uu(0.0, 3.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = dd(rng), kd = dk(rng);

    Eigen::MatrixXd s_block = random_symmetric(rng, d);
    if (snorm(s_block) > 0.0) s_block *= 0.01 / snorm(s_block);

    Eigen::MatrixXd raw(kd, kd);
    for (int i = 0; i < kd; ++i)
      for (int j = 0; j < kd; ++j) raw(i, j) = gauss(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd diag(kd);
    for (int i = 0; i < kd; ++i) {
      const double mag = 1.0 + uu(rng);
      diag(i) = (gauss(rng) > 0.0) ? mag : -mag;
    }
    const Eigen::MatrixXd S_block = Q * diag.asDiagonal() * Q.transpose();

    Eigen::MatrixXd l_block(d, kd);
    double lmax = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < kd; ++j) {
        l_block(i, j) = gauss(rng);
        lmax = std::max(lmax, std::abs(l_block(i, j)));
      }
    if (lmax > 0.0) l_block *= 0.01 / l_block.norm();

    BlockMatrix M{s_block, S_block, l_block};
    try {
      const auto rep = block_split_check(M, 4.0);
      for (double dist : rep.small_distances)
        if (dist > rep.bound) ++split_violations;
    } catch (const std::exception&) {
      ++split_violations;
    }
  }
  c.gate(split_violations == 0,
         fmt("%.0f split violations", static_cast<double>(split_violations)));

  // Perturbation shrinkage: halving the coupling shrinks eigenvalue
  // displacement quadratically, so the ratio sits near 4.
  std::mt19937_64 rng(0xc0ffeeULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::MatrixXd s_block = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd diag(4);
  diag << 1.5, 2.5, -1.2, 3.0;
  const Eigen::MatrixXd S_block = diag.asDiagonal();
  Eigen::MatrixXd l_block(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) l_block(i, j) = gauss(rng);
  l_block *= 0.01 / l_block.norm();

  const BlockMatrix full{s_block, S_block, l_block};
  const BlockMatrix half{s_block, S_block, 0.5 * l_block};
  const auto rf = block_split_check(full, 4.0);
  const auto rh = block_split_check(half, 4.0);
  const double mf = *std::max_element(rf.small_distances.begin(), rf.small_distances.end());
  const double mh = *std::max_element(rh.small_distances.begin(), rh.small_distances.end());
  const double ratio = mf / mh;
  c.gate(ratio >= 3.0 && ratio <= 5.0, fmt("shrinkage ratio %.2f outside [3,5]", ratio));
  c.note(fmt("0 violations in 2000 trials, shrinkage ratio %.2f", ratio));
}

double min_abs_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

// Evaluates spectral flow with step-doubling retries on coarse paths.
FlowResult robust_flow(const std::vector<double>& ts,
                       const std::function<Eigen::MatrixXd(double)>& at, int steps) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    FlowPath path;
    const int n = steps << attempt;
    if (n > 4096) break;
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      path.params.push_back(t);
      path.matrices.push_back(at(t));
    }
    try {
      return spectral_flow(path);
    } catch (const StepTooCoarse&) {
      continue;
    }
  }
  FlowPath path;
  for (int i = 0; i <= 4096; ++i) {
    const double t = static_cast<double>(i) / 4096;
    path.params.push_back(t);
    path.matrices.push_back(at(t));
  }
  return spectral_flow(path);
  (void)ts;
}

void c11_flow_suites(Checker& c, Shared&) {
  int homotopy_mismatches = 0, homotopy_tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::mt19937_64 rng(trial_seed(0x33ccULL, static_cast<std::uint64_t>(trial)));
    const auto A = random_symmetric(rng, 5);
    const auto B = random_symmetric(rng, 5);
    if (min_abs_eig(A) < 0.05 || min_abs_eig(B) < 0.05) continue;
    const auto bump = random_symmetric(rng, 5);
    ++homotopy_tested;

    auto straight = [&](double t) -> Eigen::MatrixXd { return (1.0 - t) * A + t * B; };
    auto wiggled = [&](double t) -> Eigen::MatrixXd {
      return (1.0 - t) * A + t * B + 0.4 * std::sin(kPi * t) * bump;
    };
    const auto fa = robust_flow({}, straight, 64);
    const auto fb = robust_flow({}, wiggled, 64);
    if (fa.flow != fb.flow) ++homotopy_mismatches;
  }
  c.gate(homotopy_mismatches == 0,
         fmt("%.0f homotopy mismatches", static_cast<double>(homotopy_mismatches)));

  // Families anticommuting with a fixed complex structure carry zero flow.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
  J.block(0, 2, 2, 2) = -Eigen::MatrixXd::Identity(2, 2);
  J.block(2, 0, 2, 2) = Eigen::MatrixXd::Identity(2, 2);
  int anti_nonzero = 0, anti_tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::mt19937_64 rng(trial_seed(0x44ddULL, static_cast<std::uint64_t>(trial)));
    const auto A0 = random_symmetric(rng, 2);
    const auto A1 = random_symmetric(rng, 2);
    const auto B0 = random_symmetric(rng, 2);
    const auto B1 = random_symmetric(rng, 2);
    auto member = [&](double t) -> Eigen::MatrixXd {
      const Eigen::MatrixXd A = (1.0 - t) * A0 + t * A1;
      const Eigen::MatrixXd B = (1.0 - t) * B0 + t * B1;
      Eigen::MatrixXd m(4, 4);
      m.block(0, 0, 2, 2) = A;
      m.block(0, 2, 2, 2) = B;
      m.block(2, 0, 2, 2) = B;
      m.block(2, 2, 2, 2) = -A;
      return m;
    };
    if (min_abs_eig(member(0.0)) < 0.05 || min_abs_eig(member(1.0)) < 0.05) continue;
    ++anti_tested;
    FlowPath path;
    for (int i = 0; i <= 60; ++i) {
      const double t = static_cast<double>(i) / 60.0;
      path.params.push_back(t);
      path.matrices.push_back(member(t));
    }
    const auto res = gamma_pairing_flow(path, J);
    if (res.flow != 0) ++anti_nonzero;
  }
  c.gate(anti_tested > 150,
         fmt("only %.0f usable anticommuting trials", static_cast<double>(anti_tested)));
  c.gate(anti_nonzero == 0, fmt("%.0f nonzero flows", static_cast<double>(anti_nonzero)));

  // Reversal: one simple crossing counted +1 forward must count -1 backward.
  auto ramp = [](double sign) {
    FlowPath p;
    for (int i = 0; i <= 4; ++i) {
      const double t = static_cast<double>(i) / 4.0;
      p.params.push_back(t);
      Eigen::MatrixXd m(1, 1);
      m(0, 0) = sign * (t - 0.5);
      p.matrices.push_back(m);
    }
    return p;
  };
  const auto up = spectral_flow(ramp(1.0));
  const auto down = spectral_flow(ramp(-1.0));
  c.gate(up.flow == 1 && down.flow == -1 && down.flow == -up.flow,
         fmt("reversal flows %+.0f / %+.0f", static_cast<double>(up.flow),
             static_cast<double>(down.flow)));

  DiracModel model;
  model.A_part = Eigen::MatrixXd::Zero(3, 3);
  model.A_part.diagonal() << 0.1, -0.05, 3.0;
  model.a_part = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd F = 0.2 * Eigen::MatrixXd::Identity(3, 3);
  const auto stage = stage_path_flow(model, F, 7.0);
  c.gate(stage.stage_flow[2] == 0 && stage.stage_flow[3] == 0 && stage.stage_flow[4] == 0,
         "late stages carry flow");
  c.gate(std::abs(stage.total) <= stage.small_count,
         fmt("total %+.0f exceeds small count %.0f", static_cast<double>(stage.total),
             static_cast<double>(stage.small_count)));
  c.note(fmt("tested %.0f homotopy / %.0f anticommuting pairs, all clean",
             static_cast<double>(homotopy_tested), static_cast<double>(anti_tested)));
}

void c12_normalize(Checker& c, Shared&) {
  const auto zero_rep = normalize_coordinate(SeriesPoly::zero(32, 0.5));
  double beta_norm = 0.0;
  for (const auto& b : zero_rep.beta.coeffs) beta_norm = std::max(beta_norm, std::abs(b));
  c.gate(beta_norm == 0.0, fmt("zero input gives beta norm %.3g", beta_norm));

  // Two small inputs at the contract norm: a single linear coefficient and a
  // geometric tail, both scaled to norm 0.01.
  auto linear_theta = [] {
    SeriesPoly t = SeriesPoly::zero(32, 0.5);
    t.coeffs[0] = 0.02;
    const double n = t.norm();
    for (auto& cf : t.coeffs) cf *= 0.01 / n;
    return t;
  };
  auto tail_theta = [] {
    SeriesPoly t = SeriesPoly::zero(32, 0.5);
    for (std::size_t k = 0; k < t.coeffs.size(); ++k) t.coeffs[k] = std::pow(0.7, double(k));
    const double n = t.norm();
    for (auto& cf : t.coeffs) cf *= 0.01 / n;
    return t;
  };
  const auto rep_a = normalize_coordinate(linear_theta());
  const auto rep_b = normalize_coordinate(tail_theta());
  c.gate(rep_a.contraction_factor <= 0.75,
         fmt("contraction %.3f on linear input", rep_a.contraction_factor));
  c.gate(rep_b.contraction_factor <= 0.75,
         fmt("contraction %.3f on tail input", rep_b.contraction_factor));

  SeriesPoly analytic = SeriesPoly::zero(32, 0.5);
  for (std::size_t k = 0; k < analytic.coeffs.size(); ++k)
    analytic.coeffs[k] = 0.008 * std::pow(0.6, double(k)) *
                         std::exp(std::complex<double>(0.0, 0.3 * double(k)));
  const auto rep_c = normalize_coordinate(analytic);
  c.gate(rep_c.ode_residual <= 1e-10, fmt("circle residual %.3g > 1e-10", rep_c.ode_residual));
  c.note(fmt("contractions %.3f / %.3f, residual %.2g", rep_a.contraction_factor,
             rep_b.contraction_factor, rep_c.ode_residual));
}

}  // namespace

std::vector<CriterionResult> run_all() {
  Shared sh;
  std::vector<CriterionResult> out;
  out.push_back(timed(1, "profile identity integrals", 5.0, sh, c1_identities));
  out.push_back(timed(2, "derivative-density combination", 0.0, sh, c2_combination));
  out.push_back(timed(3, "constant-mode pairing", 0.0, sh, c3_pairing_k0));
  out.push_back(timed(4, "inverse-mode pairing", 0.0, sh, c4_pairing_km1));
  out.push_back(timed(5, "exact mode oracle and BVP", 0.0, sh, c5_modes));
  out.push_back(timed(6, "disk remainder decay", 0.0, sh, c6_disk));
  out.push_back(timed(7, "fiducial decay exponent", 0.0, sh, c7_decay));
  out.push_back(timed(8, "torus two-regime solve", 60.0, sh, c8_torus));
  out.push_back(timed(9, "eigenvalue band model", 0.0, sh, c9_bands));
  out.push_back(timed(10, "matrix inequality suites", 0.0, sh, c10_matrix_suites));
  out.push_back(timed(11, "spectral flow suites", 0.0, sh, c11_flow_suites));
  out.push_back(timed(12, "holomorphic normalization", 0.0, sh, c12_normalize));
  return out;
}

bool print_report(const std::vector<CriterionResult>& results, std::ostream& out) {
  int passed = 0;
  for (const auto& r : results) {
    char line[64];
    std::snprintf(line, sizeof(line), "%s  [%2d] %-32s %7.2fs  ", r.passed ? "PASS" : "FAIL",
                  r.index, r.name.c_str(), r.seconds);
    out << line << r.detail << "\n";
    if (r.passed) ++passed;
  }
  out << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size());
}

}  // namespace lab::acceptance
