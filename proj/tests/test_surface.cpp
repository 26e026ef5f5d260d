#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "lab/fiducial.hpp"
#include "lab/surface.hpp"

using namespace lab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double periodic_dist(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, kTwoPi - d);
}

double dist_to(const std::array<double, 2>& z, double x, double y) {
  return std::hypot(periodic_dist(x, z[0]), periodic_dist(y, z[1]));
}

std::vector<double> zero_field(const TorusData& d) {
  return std::vector<double>(static_cast<size_t>(d.n) * d.n, 0.0);
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

TEST_CASE("synthetic data satisfies the declared pointwise invariants") {
  const TorusData data = build_synthetic_q(default_torus_spec(128));
  const int n = data.n;
  const double h = data.h();

  // factor product recovers |q1|^2
  double prod_err = 0.0;
  for (size_t i = 0; i < data.q1.size(); ++i) {
    const double q2 = std::norm(data.q1[i]);
    prod_err = std::max(prod_err, std::abs(data.w_plus_sq[i] * data.w_minus_sq[i] - q2));
  }
  CHECK(prod_err < 1e-12);

  // simple zeros: |q1|/dist pinched between positive constants near every
  // zero, and |q1| at the zero node itself below one cell
  std::vector<std::array<double, 2>> all(data.zeros_plus);
  all.insert(all.end(), data.zeros_minus.begin(), data.zeros_minus.end());
  for (const auto& z : all) {
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double d = dist_to(z, i * h, j * h);
        if (d < 0.9 * h || d > 0.3) continue;
        const double ratio = std::abs(data.q1[static_cast<size_t>(i) * n + j]) / d;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 20.0);
    const int zi = static_cast<int>(std::llround(z[0] / h));
    const int zj = static_cast<int>(std::llround(z[1] / h));
    CHECK(std::abs(data.q1[static_cast<size_t>(zi) * n + zj]) < h);
  }

  // mu_diamond discrete-harmonic away from the zeros
  double lap_sup = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const size_t c = static_cast<size_t>(i) * n + j;
      if (data.theta_dist[c] <= 0.5) continue;
      const double lap =
          (4.0 * data.mu_diamond[c] - data.mu_diamond[static_cast<size_t>((i + n - 1) % n) * n + j] -
           data.mu_diamond[static_cast<size_t>((i + 1) % n) * n + j] -
           data.mu_diamond[c - j + (j + n - 1) % n] - data.mu_diamond[c - j + (j + 1) % n]) /
          (h * h);
      lap_sup = std::max(lap_sup, std::abs(lap));
    }
  }
  CHECK(lap_sup < 1e-6);

  // near a plus zero the diamond profile is -(1/2)ln(dist) + bounded
  for (const auto& z : data.zeros_plus) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double d = dist_to(z, i * h, j * h);
        if (d < 0.9 * h || d > 0.3) continue;
        const double reg = data.mu_diamond[static_cast<size_t>(i) * n + j] + 0.5 * std::log(d);
        CHECK(std::abs(reg) < 2.5);
      }
    }
  }

  // theta_dist: exact distance in the near zone, capped constant far away
  double theta_max = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = kTwoPi;
      for (const auto& z : all) d = std::min(d, dist_to(z, i * h, j * h));
      const double th = data.theta_dist[static_cast<size_t>(i) * n + j];
      theta_max = std::max(theta_max, th);
      if (d <= 0.5 * data.theta_cap) CHECK(th == doctest::Approx(d).epsilon(1e-9));
      if (d >= data.theta_cap) CHECK(th == data.theta_cap);
    }
  }
  CHECK(theta_max == data.theta_cap);
}

TEST_CASE("swapping the zero sets negates mu_diamond exactly") {
  TorusZeroSpec spec = default_torus_spec(64);
  TorusZeroSpec swapped = spec;
  std::swap(swapped.zeros_plus, swapped.zeros_minus);

  const TorusData a = build_synthetic_q(spec);
  const TorusData b = build_synthetic_q(swapped);
  for (size_t i = 0; i < a.mu_diamond.size(); ++i) {
    CHECK(b.mu_diamond[i] == -a.mu_diamond[i]);
    CHECK(b.w_plus_sq[i] == a.w_minus_sq[i]);
  }

  // the in-place swap agrees with the rebuild
  const TorusData c = swap_sides(a);
  CHECK(sup_diff(c.mu_diamond, b.mu_diamond) == 0.0);
  CHECK(c.zeros_plus == a.zeros_minus);
}

TEST_CASE("bad inputs are rejected up front") {
  CHECK_THROWS_AS(default_torus_spec(37), BadParams);

  TorusZeroSpec spec = default_torus_spec(64);
  TorusZeroSpec bad = spec;
  bad.zeros_plus.pop_back();
  CHECK_THROWS_AS(build_synthetic_q(bad), BadParams);  // mismatched counts

  bad = spec;
  bad.zeros_plus = {{1.0, 1.0}};
  bad.zeros_minus = {{4.0, 4.0}};
  CHECK_THROWS_AS(build_synthetic_q(bad), BadParams);  // one zero per side

  bad = spec;
  bad.n = 8;
  CHECK_THROWS_AS(build_synthetic_q(bad), BadParams);

  bad = spec;
  const double h = kTwoPi / bad.n;
  bad.zeros_plus[1] = {bad.zeros_plus[0][0] + 5 * h, bad.zeros_plus[0][1]};
  CHECK_THROWS_AS(build_synthetic_q(bad), ZerosTooClose);

  const TorusData data = build_synthetic_q(spec);
  CHECK_THROWS_AS(solve_mu(data, 1.5, zero_field(data), 1e-10), BadParams);
  CHECK_THROWS_AS(solve_mu(data, 10.0, zero_field(data), 0.0), BadParams);
  CHECK_THROWS_AS(solve_mu(data, 10.0, std::vector<double>(7, 0.0), 1e-10), BadParams);
  std::vector<double> nan_init = zero_field(data);
  nan_init[3] = std::nan("");
  CHECK_THROWS_AS(solve_mu(data, 10.0, nan_init, 1e-10), BadParams);

  // an init far outside the basin overflows the exponentials
  CHECK_THROWS_AS(
      solve_mu(data, 10.0, std::vector<double>(zero_field(data).size(), 400.0), 1e-10),
      NewtonDiverged);

  // r so small that the fit window [3 r^{-2/3}, cap/2] is empty
  const TorusField tight = solve_mu(data, 2.5, zero_field(data), 1e-10);
  CHECK_THROWS_AS(two_regime_report(tight), InsufficientNodes);
}

TEST_CASE("both initializations land on the same field") {
  const TorusData data = build_synthetic_q(default_torus_spec(128));
  const double r = 20.0;
  const TorusField a = solve_mu(data, r, zero_field(data), 1e-10);
  const TorusField b = solve_mu(data, r, clamped_diamond_init(data, r), 1e-10);
  CHECK(a.residual_max <= 1e-10);
  CHECK(b.residual_max <= 1e-10);
  CHECK(sup_diff(a.mu, b.mu) < 1e-8);

  // clamp bound is the near-zone plateau scale
  const std::vector<double> init = clamped_diamond_init(data, r);
  const double bound = std::log(r) / 3.0;
  double sup = 0.0;
  for (double v : init) sup = std::max(sup, std::abs(v));
  CHECK(sup <= bound);
}

TEST_CASE("energy descends to the minimizer and the maximum principle pins the extrema") {
  const TorusData data = build_synthetic_q(default_torus_spec(128));
  const double r = 10.0, tol = 1e-10;
  const TorusField field = solve_mu(data, r, zero_field(data), tol);

  // dedicated zero-field bound: E(0) = (1/4) r^2 sum (w+^2 + w-^2) cellarea
  double mass = 0.0;
  for (size_t i = 0; i < data.w_plus_sq.size(); ++i)
    mass += data.w_plus_sq[i] + data.w_minus_sq[i];
  const double e0 = 0.25 * r * r * data.h() * data.h() * mass;
  CHECK(torus_energy(data, r, zero_field(data), false) == doctest::Approx(e0).epsilon(1e-12));

  CHECK(field.energy <= e0);
  REQUIRE(field.energy_history.size() >= 2);
  CHECK(field.energy_history.front() == doctest::Approx(e0).epsilon(1e-12));
  // non-increasing up to rounding: endgame steps move the energy by less
  // than one ulp at its own magnitude
  for (size_t k = 1; k < field.energy_history.size(); ++k)
    CHECK(field.energy_history[k] <=
          field.energy_history[k - 1] + 1e-12 * std::abs(field.energy_history[k - 1]));
  CHECK(field.energy == field.energy_history.back());

  // at the interior discrete max the nonlinearity cannot push up, so the
  // solution cannot overshoot the diamond profile there (and dually below)
  const size_t imax = std::max_element(field.mu.begin(), field.mu.end()) - field.mu.begin();
  const size_t imin = std::min_element(field.mu.begin(), field.mu.end()) - field.mu.begin();
  const double r2 = r * r;
  const double nl_max = 0.5 * r2 * (std::exp(2.0 * field.mu[imax]) * data.w_plus_sq[imax] -
                                    std::exp(-2.0 * field.mu[imax]) * data.w_minus_sq[imax]);
  const double nl_min = 0.5 * r2 * (std::exp(2.0 * field.mu[imin]) * data.w_plus_sq[imin] -
                                    std::exp(-2.0 * field.mu[imin]) * data.w_minus_sq[imin]);
  CHECK(nl_max <= 2.0 * tol);
  CHECK(nl_min >= -2.0 * tol);
  CHECK(field.mu[imax] <= data.mu_diamond[imax] + 1e-8);
  CHECK(field.mu[imin] >= data.mu_diamond[imin] - 1e-8);
  const double dmax = *std::max_element(data.mu_diamond.begin(), data.mu_diamond.end());
  const double dmin = *std::min_element(data.mu_diamond.begin(), data.mu_diamond.end());
  CHECK(field.mu[imax] <= dmax + 1e-8);
  CHECK(field.mu[imin] >= dmin - 1e-8);
}

TEST_CASE("far field collapses onto the diamond profile, near zone is stable in r") {
  const TorusData data = build_synthetic_q(default_torus_spec(256));
  const TorusField f20 = solve_mu(data, 20.0, clamped_diamond_init(data, 20.0), 1e-10);
  const TorusField f40 = solve_mu(data, 40.0, clamped_diamond_init(data, 40.0), 1e-10);

  // at r = 40 the far-field deviation sits >= 3 orders below the zero values
  double far = 0.0, at_zeros = 1e300;
  const double half_max = 0.5 * data.theta_cap;
  for (size_t i = 0; i < f40.mu.size(); ++i)
    if (data.theta_dist[i] > half_max)
      far = std::max(far, std::abs(f40.mu[i] - data.mu_diamond[i]));
  const double h = data.h();
  auto node_value = [&](const TorusField& f, const std::array<double, 2>& z) {
    const int zi = static_cast<int>(std::llround(z[0] / h));
    const int zj = static_cast<int>(std::llround(z[1] / h));
    return f.mu[static_cast<size_t>(zi) * data.n + zj];
  };
  for (const auto& z : data.zeros_plus)
    at_zeros = std::min(at_zeros, std::abs(node_value(f40, z)));
  for (const auto& z : data.zeros_minus)
    at_zeros = std::min(at_zeros, std::abs(node_value(f40, z)));
  CHECK(far * 1e3 < at_zeros);

  // mu_r(zero) - (1/3)ln r moves by < 0.05 under a doubling of r
  for (const auto& z : data.zeros_plus) {
    const double a = node_value(f20, z) - std::log(20.0) / 3.0;
    const double b = node_value(f40, z) - std::log(40.0) / 3.0;
    CHECK(std::abs(a - b) < 0.05);
  }

  SUBCASE("two-regime fits: negative exponential slope, r-stable, fiducial-matched") {
    const TwoRegimeReport r20 = two_regime_report(f20);
    const TwoRegimeReport r40 = two_regime_report(f40);
    CHECK(r40.slope < 0.0);
    CHECK(r40.r_squared >= 0.85);
    CHECK(r20.r_squared >= 0.85);
    CHECK(std::abs(r20.slope - r40.slope) <= 0.25 * std::abs(r40.slope));
    CHECK(r40.fit_nodes >= 16);
    CHECK(std::isfinite(r40.grad_scale));
    CHECK(std::isfinite(r40.hess_scale));
    CHECK(r40.grad_scale > 0.0);

    // cross-module oracle: the plateau value at a zero is the central value
    // of the fiducial profile at the local scale r^2 * alpha1
    const double f0 = solve_fiducial(1.0, GridSpec{}, 1e-10).f0;
    REQUIRE(r40.zeros.size() == 4);
    for (const TorusZeroReport& z : r40.zeros) {
      CHECK(z.alpha1_local > 0.0);
      const double oracle = f0 + std::log(z.alpha1_local) / 6.0;
      CHECK(std::abs(z.near_value - oracle) <= 0.1);
    }
    for (size_t k = 0; k < r40.zeros.size(); ++k)
      CHECK(std::abs(r40.zeros[k].near_value - r20.zeros[k].near_value) < 0.05);
  }
}

TEST_CASE("swap antisymmetry of the solved field, and translation symmetry of layouts") {
  const TorusData data = build_synthetic_q(default_torus_spec(128));
  const double tol = 1e-10;
  CHECK(swap_symmetry_check(data, 10.0, tol) <= 2.0 * tol);
  CHECK(swap_symmetry_check(data, 40.0, tol) <= 2.0 * tol);

  // checkerboard layout: translating by (pi, 0) exchanges the two zero sets,
  // so the solution itself must be antisymmetric under that translation
  TorusZeroSpec spec;
  spec.n = 128;
  const double q = kTwoPi / 4.0;
  spec.zeros_plus = {{q, q}, {3 * q, 3 * q}};
  spec.zeros_minus = {{3 * q, q}, {q, 3 * q}};
  const TorusData board = build_synthetic_q(spec);
  const TorusField field = solve_mu(board, 10.0, zero_field(board), tol);
  const int n = board.n;
  double anti = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      anti = std::max(anti, std::abs(field.mu[static_cast<size_t>(i) * n + j] +
                                     field.mu[static_cast<size_t>((i + n / 2) % n) * n + j]));
  CHECK(anti <= 2.0 * tol);
}

TEST_CASE("mesh refinement converges at second order") {
  // the same four physical zeros, exactly representable on every level
  auto level_spec = [](int scale) {
    TorusZeroSpec spec;
    spec.n = 96 * scale;
    const double h = kTwoPi / spec.n;
    const int c1 = 24 * scale, c2 = 72 * scale, off = 8 * scale;
    spec.zeros_plus = {{c1 * h, (c1 + off) * h}, {c2 * h, (c2 + off) * h}};
    spec.zeros_minus = {{c1 * h, (c1 - off) * h}, {c2 * h, (c2 - off) * h}};
    return spec;
  };
  const double r = 8.0;
  std::vector<std::vector<double>> mu;
  for (int scale : {1, 2, 4}) {
    const TorusData data = build_synthetic_q(level_spec(scale));
    mu.push_back(solve_mu(data, r, clamped_diamond_init(data, r), 1e-10).mu);
  }
  auto restrict_diff = [](const std::vector<double>& coarse, const std::vector<double>& fine,
                          int nc) {
    double sup = 0.0;
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j)
        sup = std::max(sup, std::abs(coarse[static_cast<size_t>(i) * nc + j] -
                                     fine[static_cast<size_t>(2 * i) * (2 * nc) + 2 * j]));
    return sup;
  };
  const double d1 = restrict_diff(mu[0], mu[1], 96);
  const double d2 = restrict_diff(mu[1], mu[2], 192);
  const double order = std::log2(d1 / d2);
  CHECK(order >= 1.8);
  // sup-difference between n and 2n stays under C n^{-2} with one constant
  CHECK(d2 * 192.0 * 192.0 <= 2.0 * d1 * 96.0 * 96.0);
}

TEST_CASE("parallel kernels reproduce the serial reference bitwise") {
  const TorusData data = build_synthetic_q(default_torus_spec(128));
  const size_t nn = data.mu_diamond.size();
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  std::vector<double> mu(nn), x(nn);
  for (size_t i = 0; i < nn; ++i) {
    mu[i] = dist(rng);
    x[i] = dist(rng);
  }
  const double r = 10.0;

  std::vector<double> f_ser, jd_ser, f_par, jd_par;
  torus_residual(data, r, mu, f_ser, jd_ser, false);
  torus_residual(data, r, mu, f_par, jd_par, true);
  CHECK(sup_diff(f_ser, f_par) == 0.0);
  CHECK(sup_diff(jd_ser, jd_par) == 0.0);

  std::vector<double> y_ser, y_par;
  torus_apply_jacobian(data.n, data.h(), jd_ser, x, y_ser, false);
  torus_apply_jacobian(data.n, data.h(), jd_ser, x, y_par, true);
  CHECK(sup_diff(y_ser, y_par) == 0.0);

  CHECK(torus_energy(data, r, mu, false) == torus_energy(data, r, mu, true));

  // the matvec really is the residual's derivative: J x = d/dt F(mu + t x)
  const double eps = 1e-7;
  std::vector<double> mu2(nn), f2, jd2;
  for (size_t i = 0; i < nn; ++i) mu2[i] = mu[i] + eps * x[i];
  torus_residual(data, r, mu2, f2, jd2, false);
  double fd_err = 0.0, scale = 0.0;
  for (size_t i = 0; i < nn; ++i) {
    fd_err = std::max(fd_err, std::abs((f2[i] - f_ser[i]) / eps - y_ser[i]));
    scale = std::max(scale, std::abs(y_ser[i]));
  }
  CHECK(fd_err < 1e-5 * scale);
}

TEST_CASE("field export and report serialization") {
  const TorusData data = build_synthetic_q(default_torus_spec(64));
  const TorusField field = solve_mu(data, 12.0, zero_field(data), 1e-10);

  const std::string path = "surface_field_test.csv";
  export_field_csv(field, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# torus field export");
  std::getline(in, line);
  CHECK(line.find("# n=64 r=12") == 0);
  std::getline(in, line);
  CHECK(line.find("# zeros_plus=(") == 0);
  std::getline(in, line);
  CHECK(line.find("# zeros_minus=(") == 0);
  std::getline(in, line);
  CHECK(line == "i,j,x,y,mu,mu_diamond,theta_dist");
  size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<size_t>(64) * 64);
  std::remove(path.c_str());

  CHECK_THROWS_AS(export_field_csv(field, "/nonexistent_dir_xyz/out.csv"), IoFailure);

  const TwoRegimeReport rep = two_regime_report(field);
  const nlohmann::json j = nlohmann::json::parse(two_regime_report_json(rep));
  CHECK(j.at("slope").get<double>() == rep.slope);
  CHECK(j.at("fit_nodes").get<int>() == rep.fit_nodes);
  CHECK(j.at("zeros").size() == 4);
  CHECK(j.at("zeros")[0].at("side").get<int>() == 1);
  CHECK(j.at("zeros")[2].at("side").get<int>() == -1);
  CHECK(std::isfinite(j.at("r_squared").get<double>()));
}
