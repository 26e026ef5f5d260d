#include "lab/surface.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-zero log factor: the mean-zero solution of
//   (discrete Laplacian) L = -2 pi (delta / h^2 - 1 / (2 pi)^2)
// on the periodic grid, which behaves like ln(dist) + const near the source
// node. Each factor is harmonic away from its zero only up to the uniform
// background charge; the backgrounds cancel in mu_diamond because the two
// factors carry equally many zeros.
std::vector<double> log_factor_kernel(int n) {
  const double h = kTwoPi / n;
  std::vector<std::complex<double>> buf(static_cast<size_t>(n) * n);
  fftw_plan fwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
  const double background = -1.0 / (kTwoPi * kTwoPi);
  std::fill(buf.begin(), buf.end(), std::complex<double>(background, 0.0));
  buf[0] += 1.0 / (h * h);
  fftw_execute(fwd);
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      if (k1 == 0 && k2 == 0) {
        buf[0] = 0.0;
        continue;
      }
      const double lam = (4.0 - 2.0 * std::cos(kTwoPi * k1 / n) -
                          2.0 * std::cos(kTwoPi * k2 / n)) /
                         (h * h);
      buf[static_cast<size_t>(k1) * n + k2] /= lam;
    }
  }
  fftw_execute(bwd);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  std::vector<double> g(static_cast<size_t>(n) * n);
  const double scale = -kTwoPi / (static_cast<double>(n) * n);
  for (size_t i = 0; i < g.size(); ++i) g[i] = scale * buf[i].real();
  return g;
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

struct ZeroIdx {
  int i, j;
};

ZeroIdx snap(const std::array<double, 2>& pos, int n) {
  const double h = kTwoPi / n;
  return {wrap(static_cast<int>(std::llround(pos[0] / h)), n),
          wrap(static_cast<int>(std::llround(pos[1] / h)), n)};
}

// mean of f(node index, dist) over the annulus 1.5h <= dist <= 4.5h around a
// zero node; wide enough to average out the lattice anisotropy, close enough
// that the local linearization still dominates
template <typename F>
double annulus_mean(int n, ZeroIdx z, F&& f) {
  const double h = kTwoPi / n;
  double sum = 0.0;
  int count = 0;
  for (int di = -5; di <= 5; ++di) {
    for (int dj = -5; dj <= 5; ++dj) {
      const double d = h * std::sqrt(double(di * di + dj * dj));
      if (d < 1.5 * h || d > 4.5 * h) continue;
      sum += f(static_cast<size_t>(wrap(z.i + di, n)) * n + wrap(z.j + dj, n), d);
      ++count;
    }
  }
  return sum / count;
}

double periodic_dist_to_node(int n, int i, int j, ZeroIdx z) {
  const double h = kTwoPi / n;
  const int dx = std::min(std::abs(i - z.i), n - std::abs(i - z.i));
  const int dy = std::min(std::abs(j - z.j), n - std::abs(j - z.j));
  return h * std::sqrt(double(dx) * dx + double(dy) * dy);
}

double smootherstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double fit_r_squared(const std::vector<double>& x, const std::vector<double>& y,
                     double slope, double intercept) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= y.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - (slope * x[i] + intercept);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

void check_spec(const TorusZeroSpec& spec, std::vector<ZeroIdx>& zp, std::vector<ZeroIdx>& zm) {
  if (spec.n < 16) throw BadParams("build_synthetic_q: grid too small");
  if (spec.zeros_plus.size() < 2 || spec.zeros_minus.size() < 2)
    throw BadParams("build_synthetic_q: need at least two zeros on each side");
  if (spec.zeros_plus.size() != spec.zeros_minus.size())
    throw BadParams("build_synthetic_q: zero counts must match");
  for (const auto& p : spec.zeros_plus) zp.push_back(snap(p, spec.n));
  for (const auto& p : spec.zeros_minus) zm.push_back(snap(p, spec.n));
  std::vector<ZeroIdx> all(zp);
  all.insert(all.end(), zm.begin(), zm.end());
  for (size_t a = 0; a < all.size(); ++a) {
    for (size_t b = a + 1; b < all.size(); ++b) {
      const int dx = std::min(std::abs(all[a].i - all[b].i),
                              spec.n - std::abs(all[a].i - all[b].i));
      const int dy = std::min(std::abs(all[a].j - all[b].j),
                              spec.n - std::abs(all[a].j - all[b].j));
      if (dx * dx + dy * dy < 100)
        throw ZerosTooClose("build_synthetic_q: snapped zeros closer than 10 cells");
    }
  }
}

void append_num(std::string& out, double v) {
  char tmp[32];
  std::snprintf(tmp, sizeof(tmp), "%.17g", v);
  out += tmp;
}

}  // namespace

TorusZeroSpec default_torus_spec(int n) {
  if (n < 32 || n % 4 != 0)
    throw BadParams("default_torus_spec: n must be a multiple of 4, at least 32");
  const double h = kTwoPi / n;
  const int q = n / 4;
  const int dc = std::max<int>(5, static_cast<int>(std::llround(11.0 * n / 128.0)));
  TorusZeroSpec spec;
  spec.n = n;
  spec.zeros_plus = {{q * h, (q + dc) * h}, {3 * q * h, (3 * q + dc) * h}};
  spec.zeros_minus = {{q * h, (q - dc) * h}, {3 * q * h, (3 * q - dc) * h}};
  return spec;
}

TorusData build_synthetic_q(const TorusZeroSpec& spec) {
  std::vector<ZeroIdx> zp, zm;
  check_spec(spec, zp, zm);
  const int n = spec.n;
  const size_t nn = static_cast<size_t>(n) * n;
  const std::vector<double> kernel = log_factor_kernel(n);

  std::vector<double> ln_p(nn, 0.0), ln_m(nn, 0.0);
  auto accumulate = [&](std::vector<double>& dst, ZeroIdx z) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dst[static_cast<size_t>(i) * n + j] +=
            kernel[static_cast<size_t>(wrap(i - z.i, n)) * n + wrap(j - z.j, n)];
  };
  for (ZeroIdx z : zp) accumulate(ln_p, z);
  for (ZeroIdx z : zm) accumulate(ln_m, z);

  // Fix the relative scale of the two factors by balancing the regular part
  // of mu_diamond at the two zero sets. This is the one free constant in the
  // splitting; balancing it is what the near-zero oracle assumes.
  auto raw_diamond = [&](size_t idx) { return 0.5 * (ln_m[idx] - ln_p[idx]); };
  double reg_plus = 0.0, reg_minus = 0.0;
  for (ZeroIdx z : zp)
    reg_plus += annulus_mean(
        n, z, [&](size_t idx, double d) { return raw_diamond(idx) + 0.5 * std::log(d); });
  for (ZeroIdx z : zm)
    reg_minus += annulus_mean(
        n, z, [&](size_t idx, double d) { return -raw_diamond(idx) + 0.5 * std::log(d); });
  reg_plus /= zp.size();
  reg_minus /= zm.size();
  const double sigma = 0.5 * (reg_plus - reg_minus);
  for (size_t i = 0; i < nn; ++i) {
    ln_p[i] += sigma;
    ln_m[i] -= sigma;
  }

  TorusData data;
  data.n = n;
  data.q1.resize(nn);
  data.w_plus_sq.resize(nn);
  data.w_minus_sq.resize(nn);
  data.mu_diamond.resize(nn);
  data.theta_dist.resize(nn);
  for (size_t i = 0; i < nn; ++i) {
    data.q1[i] = std::exp(ln_p[i] + ln_m[i]);
    data.w_plus_sq[i] = std::exp(2.0 * ln_p[i]);
    data.w_minus_sq[i] = std::exp(2.0 * ln_m[i]);
    data.mu_diamond[i] = 0.5 * (ln_m[i] - ln_p[i]);
  }
  const double h = kTwoPi / n;
  for (ZeroIdx z : zp) data.zeros_plus.push_back({z.i * h, z.j * h});
  for (ZeroIdx z : zm) data.zeros_minus.push_back({z.i * h, z.j * h});

  // distance to the zero set, exact inside theta_cap/2, blended to the
  // constant theta_cap beyond 3/4 of it so the far field is flat
  const double r0 = data.theta_cap / 4.0;
  std::vector<ZeroIdx> all(zp);
  all.insert(all.end(), zm.begin(), zm.end());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = kTwoPi;
      for (ZeroIdx z : all) d = std::min(d, periodic_dist_to_node(n, i, j, z));
      double theta = d;
      if (d >= 4.0 * r0) {
        theta = data.theta_cap;
      } else if (d > 2.0 * r0) {
        const double chi = 1.0 - smootherstep(d / (2.0 * r0) - 1.0);
        theta = chi * d + (1.0 - chi) * data.theta_cap;
      }
      data.theta_dist[static_cast<size_t>(i) * n + j] = theta;
    }
  }
  return data;
}

TorusData swap_sides(const TorusData& data) {
  TorusData out = data;
  out.w_plus_sq = data.w_minus_sq;
  out.w_minus_sq = data.w_plus_sq;
  out.zeros_plus = data.zeros_minus;
  out.zeros_minus = data.zeros_plus;
  for (double& v : out.mu_diamond) v = -v;
  return out;
}

void torus_residual(const TorusData& data, double r, const std::vector<double>& mu,
                    std::vector<double>& residual, std::vector<double>& jac_diag,
                    bool parallel) {
  const int n = data.n;
  const double inv_h2 = 1.0 / (data.h() * data.h());
  residual.resize(mu.size());
  jac_diag.resize(mu.size());
  const double r2 = r * r;
  auto row = [&](int i) {
    const int up = wrap(i - 1, n) * n, dn = wrap(i + 1, n) * n, c = i * n;
    for (int j = 0; j < n; ++j) {
      const int jl = wrap(j - 1, n), jr = wrap(j + 1, n);
      const double lap =
          (4.0 * mu[c + j] - mu[up + j] - mu[dn + j] - mu[c + jl] - mu[c + jr]) * inv_h2;
      const double ep = std::exp(2.0 * mu[c + j]) * data.w_plus_sq[c + j];
      const double em = std::exp(-2.0 * mu[c + j]) * data.w_minus_sq[c + j];
      residual[c + j] = lap + 0.5 * r2 * (ep - em);
      jac_diag[c + j] = r2 * (ep + em);
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) row(i);
  } else {
    for (int i = 0; i < n; ++i) row(i);
  }
}

void torus_apply_jacobian(int n, double h, const std::vector<double>& jac_diag,
                          const std::vector<double>& x, std::vector<double>& out,
                          bool parallel) {
  const double inv_h2 = 1.0 / (h * h);
  out.resize(x.size());
  auto row = [&](int i) {
    const int up = wrap(i - 1, n) * n, dn = wrap(i + 1, n) * n, c = i * n;
    for (int j = 0; j < n; ++j) {
      const int jl = wrap(j - 1, n), jr = wrap(j + 1, n);
      out[c + j] =
          (4.0 * x[c + j] - x[up + j] - x[dn + j] - x[c + jl] - x[c + jr]) * inv_h2 +
          jac_diag[c + j] * x[c + j];
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) row(i);
  } else {
    for (int i = 0; i < n; ++i) row(i);
  }
}

double torus_energy(const TorusData& data, double r, const std::vector<double>& mu,
                    bool parallel) {
  const int n = data.n;
  const double w = 0.25 * r * r * data.h() * data.h();
  // per-row partials summed in row order afterwards, so the parallel path
  // reproduces the serial result bitwise
  std::vector<double> partial(n);
  auto row = [&](int i) {
    const int up = wrap(i - 1, n) * n, c = i * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const int jl = wrap(j - 1, n);
      const double gx = mu[c + j] - mu[up + j];
      const double gy = mu[c + j] - mu[c + jl];
      acc += 0.5 * (gx * gx + gy * gy) +
             w * (std::exp(2.0 * mu[c + j]) * data.w_plus_sq[c + j] +
                  std::exp(-2.0 * mu[c + j]) * data.w_minus_sq[c + j]);
    }
    partial[i] = acc;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) row(i);
  } else {
    for (int i = 0; i < n; ++i) row(i);
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += partial[i];
  return total;
}

std::vector<double> clamped_diamond_init(const TorusData& data, double r) {
  const double bound = std::log(r) / 3.0;
  std::vector<double> init(data.mu_diamond.size());
  for (size_t i = 0; i < init.size(); ++i)
    init[i] = std::clamp(data.mu_diamond[i], -bound, bound);
  return init;
}

TorusField solve_mu(const TorusData& data, double r, const std::vector<double>& init,
                    double tol) {
  const size_t nn = static_cast<size_t>(data.n) * data.n;
  if (r < 2.0) throw BadParams("solve_mu: r below 2");
  if (tol <= 0.0) throw BadParams("solve_mu: tolerance must be positive");
  if (init.size() != nn) throw BadParams("solve_mu: init does not match the grid");
  for (double v : init)
    if (!std::isfinite(v)) throw BadParams("solve_mu: init not finite");

  TorusField field;
  field.data = &data;
  field.r = r;
  field.tol = tol;
  field.mu = init;

  const int n = data.n;
  const double h = data.h();
  std::vector<double> F, jd, F_trial, jd_trial;
  std::vector<double> b(nn), x(nn), rr(nn), z(nn), p(nn), Ap(nn), trial(nn);
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (size_t i = 0; i < nn; ++i) s += a[i] * c[i];
    return s;
  };

  double energy = torus_energy(data, r, field.mu, true);
  field.energy_history.push_back(energy);
  double res_prev = 0.0;
  const int max_newton = 60;
  for (int it = 0;; ++it) {
    torus_residual(data, r, field.mu, F, jd, true);
    double res = 0.0;
    for (double v : F) res = std::max(res, std::abs(v));
    if (!std::isfinite(res)) throw NewtonDiverged("solve_mu: residual overflow");
    field.residual_max = res;
    field.newton_iters = it;
    if (res <= tol) break;
    if (it >= max_newton) throw NewtonDiverged("solve_mu: iteration budget exhausted");

    // forcing tolerance slaved to the Newton residual: loose first solve,
    // then tightened by the observed contraction
    const double eta =
        it == 0 ? 0.1
                : std::clamp(0.9 * std::pow(res / res_prev, 1.5), 1e-5, 0.5);
    for (size_t i = 0; i < nn; ++i) {
      b[i] = -F[i];
      x[i] = 0.0;
      rr[i] = b[i];
      z[i] = rr[i] / (4.0 / (h * h) + jd[i]);
      p[i] = z[i];
    }
    const double nb = std::sqrt(dot(b, b));
    double rz = dot(rr, z);
    const int max_pcg = 20 * n;
    int cg = 0;
    for (; cg < max_pcg; ++cg) {
      torus_apply_jacobian(n, h, jd, p, Ap, true);
      const double pap = dot(p, Ap);
      if (!(pap > 0.0))
        throw SingularJacobian("solve_mu: nonpositive curvature in the inner solve");
      const double alpha = rz / pap;
      for (size_t i = 0; i < nn; ++i) {
        x[i] += alpha * p[i];
        rr[i] -= alpha * Ap[i];
      }
      if (std::sqrt(dot(rr, rr)) <= eta * nb) break;
      for (size_t i = 0; i < nn; ++i) z[i] = rr[i] / (4.0 / (h * h) + jd[i]);
      const double rz_next = dot(rr, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (size_t i = 0; i < nn; ++i) p[i] = z[i] + beta * p[i];
    }
    field.pcg_iters += cg + 1;
    if (cg >= max_pcg) throw NewtonDiverged("solve_mu: inner solve stalled");

    // full step first: in the Newton endgame it contracts the residual while
    // the matching energy decrease falls below double rounding, so an energy
    // test alone would stall just above the tolerance
    bool accepted = false;
    for (size_t i = 0; i < nn; ++i) trial[i] = field.mu[i] + x[i];
    torus_residual(data, r, trial, F_trial, jd_trial, true);
    double res_trial = 0.0;
    for (double v : F_trial) res_trial = std::max(res_trial, std::abs(v));
    if (std::isfinite(res_trial) && res_trial <= 0.5 * res) {
      field.mu.swap(trial);
      energy = torus_energy(data, r, field.mu, true);
      accepted = true;
    }

    if (!accepted) {
      // energy descent line search; x is a descent direction for any number
      // of CG iterations, so only overflow or a wrong Jacobian can get here
      const double slope = h * h * dot(F, x);
      if (!(slope < 0.0)) throw NewtonDiverged("solve_mu: search direction not descending");
      double lambda = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        for (size_t i = 0; i < nn; ++i) trial[i] = field.mu[i] + lambda * x[i];
        const double e_trial = torus_energy(data, r, trial, true);
        if (e_trial <= energy + 1e-4 * lambda * slope) {
          field.mu.swap(trial);
          energy = e_trial;
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
    }
    if (!accepted) throw NewtonDiverged("solve_mu: line search failed");
    field.energy_history.push_back(energy);
    res_prev = res;
  }
  field.energy = energy;
  return field;
}

TwoRegimeReport two_regime_report(const TorusField& field) {
  if (field.data == nullptr || field.mu.empty())
    throw BadParams("two_regime_report: field is not a converged solve");
  const TorusData& data = *field.data;
  const int n = data.n;
  const double r = field.r;
  const double lo = 3.0 * std::pow(r, -2.0 / 3.0);
  const double hi = data.theta_cap / 2.0;

  std::vector<double> xs, ys;
  for (size_t i = 0; i < field.mu.size(); ++i) {
    const double th = data.theta_dist[i];
    if (th < lo || th > hi) continue;
    const double d = std::abs(field.mu[i] - data.mu_diamond[i]);
    if (d < 1e-13) continue;  // decayed to roundoff; log would fit noise
    xs.push_back(r * th * std::sqrt(th));
    ys.push_back(std::log(d));
  }
  if (xs.size() < 16)
    throw InsufficientNodes("two_regime_report: fit window holds fewer than 16 nodes");

  TwoRegimeReport rep;
  rep.fit_nodes = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double m = static_cast<double>(xs.size());
  rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.intercept = (sy - rep.slope * sx) / m;
  rep.r_squared = fit_r_squared(xs, ys, rep.slope, rep.intercept);

  const double h = data.h();
  for (int i = 0; i < n; ++i) {
    const int up = wrap(i - 1, n) * n, dn = wrap(i + 1, n) * n, c = i * n;
    for (int j = 0; j < n; ++j) {
      const int jl = wrap(j - 1, n), jr = wrap(j + 1, n);
      const double gx = (field.mu[dn + j] - field.mu[up + j]) / (2.0 * h);
      const double gy = (field.mu[c + jr] - field.mu[c + jl]) / (2.0 * h);
      const double dxx = (field.mu[dn + j] + field.mu[up + j] - 2.0 * field.mu[c + j]) / (h * h);
      const double dyy = (field.mu[c + jr] + field.mu[c + jl] - 2.0 * field.mu[c + j]) / (h * h);
      const double dxy = (field.mu[dn + jr] - field.mu[dn + jl] - field.mu[up + jr] +
                          field.mu[up + jl]) /
                         (4.0 * h * h);
      rep.grad_scale = std::max(rep.grad_scale, std::hypot(gx, gy));
      rep.hess_scale =
          std::max(rep.hess_scale, std::sqrt(dxx * dxx + dyy * dyy + 2.0 * dxy * dxy));
    }
  }
  rep.grad_scale *= std::pow(r, -2.0 / 3.0);
  rep.hess_scale *= std::pow(r, -4.0 / 3.0);

  auto add_zero = [&](const std::array<double, 2>& pos, int side) {
    const ZeroIdx z = snap(pos, n);
    TorusZeroReport zr;
    zr.pos = pos;
    zr.side = side;
    zr.near_value = side * field.mu[static_cast<size_t>(z.i) * n + z.j] - std::log(r) / 3.0;
    zr.alpha1_local = annulus_mean(
        n, z, [&](size_t idx, double d) { return std::abs(data.q1[idx]) / d; });
    rep.zeros.push_back(zr);
  };
  for (const auto& pos : data.zeros_plus) add_zero(pos, +1);
  for (const auto& pos : data.zeros_minus) add_zero(pos, -1);
  return rep;
}

double swap_symmetry_check(const TorusData& data, double r, double tol) {
  const std::vector<double> zero(static_cast<size_t>(data.n) * data.n, 0.0);
  const TorusField a = solve_mu(data, r, zero, tol);
  const TorusData swapped = swap_sides(data);
  const TorusField b = solve_mu(swapped, r, zero, tol);
  double sup = 0.0;
  for (size_t i = 0; i < a.mu.size(); ++i)
    sup = std::max(sup, std::abs(a.mu[i] + b.mu[i]));
  return sup;
}

void export_field_csv(const TorusField& field, const std::string& path) {
  if (field.data == nullptr) throw BadParams("export_field_csv: empty field");
  std::ofstream out(path);
  if (!out) throw IoFailure("export_field_csv: cannot open " + path);
  const TorusData& data = *field.data;
  auto zeros_line = [&](const std::vector<std::array<double, 2>>& zs) {
    std::string s;
    for (size_t k = 0; k < zs.size(); ++k) {
      if (k) s += ";";
      s += "(";
      append_num(s, zs[k][0]);
      s += ",";
      append_num(s, zs[k][1]);
      s += ")";
    }
    return s;
  };
  out << "# torus field export\n";
  char head[96];
  std::snprintf(head, sizeof(head), "# n=%d r=%.17g tol=%.17g\n", data.n, field.r, field.tol);
  out << head;
  out << "# zeros_plus=" << zeros_line(data.zeros_plus) << "\n";
  out << "# zeros_minus=" << zeros_line(data.zeros_minus) << "\n";
  out << "i,j,x,y,mu,mu_diamond,theta_dist\n";
  const double h = data.h();
  char row[256];
  for (int i = 0; i < data.n; ++i) {
    for (int j = 0; j < data.n; ++j) {
      const size_t idx = static_cast<size_t>(i) * data.n + j;
      std::snprintf(row, sizeof(row), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, j, i * h,
                    j * h, field.mu[idx], data.mu_diamond[idx], data.theta_dist[idx]);
      out << row;
    }
  }
  if (!out.good()) throw IoFailure("export_field_csv: write failed for " + path);
}

std::string two_regime_report_json(const TwoRegimeReport& report) {
  std::string s = "{\n  \"slope\": ";
  append_num(s, report.slope);
  s += ",\n  \"intercept\": ";
  append_num(s, report.intercept);
  s += ",\n  \"r_squared\": ";
  append_num(s, report.r_squared);
  s += ",\n  \"fit_nodes\": " + std::to_string(report.fit_nodes);
  s += ",\n  \"grad_scale\": ";
  append_num(s, report.grad_scale);
  s += ",\n  \"hess_scale\": ";
  append_num(s, report.hess_scale);
  s += ",\n  \"zeros\": [";
  for (size_t k = 0; k < report.zeros.size(); ++k) {
    const TorusZeroReport& z = report.zeros[k];
    s += k ? ",\n    {" : "\n    {";
    s += "\"x\": ";
    append_num(s, z.pos[0]);
    s += ", \"y\": ";
    append_num(s, z.pos[1]);
    s += ", \"side\": " + std::to_string(z.side);
    s += ", \"near_value\": ";
    append_num(s, z.near_value);
    s += ", \"alpha1_local\": ";
    append_num(s, z.alpha1_local);
    s += "}";
  }
  s += "\n  ]\n}\n";
  return s;
}

}  // namespace lab
