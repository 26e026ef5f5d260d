#include "lab/xi.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double convention(SignConvention sign) {
  return sign == SignConvention::theta_plus ? -1.0 : 1.0;
}

void require_theta_plus(const XiProfile& xi, const char* op) {
  if (xi.sign != SignConvention::theta_plus)
    throw BadParams(std::string(op) + " is defined for the theta_plus convention");
}

// quadrature with the Richardson gate; tol is relative to the value with an
// absolute floor so near-zero integrals do not trip on roundoff
double gated_integral(const RadialGrid& g, const std::vector<double>& y, const char* what) {
  double est = 0.0;
  const double val = integrate_with_error(g.s, y, &est);
  if (!(std::fabs(est) <= 1e-6 * std::max(std::fabs(val), 1e-9))) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s: quadrature error estimate %.3e", what, est);
    throw QuadratureUnconverged(buf);
  }
  return val;
}

}  // namespace

XiProfile xi_from_f(const FiducialSolution& sol, SignConvention sign) {
  const int n = sol.grid.n();
  const double sgn = convention(sign);

  XiProfile out;
  out.grid = sol.grid;
  out.sign = sign;
  out.alpha = sol.alpha;
  out.source = sol;
  out.xi.assign(n + 1, 0.0);
  out.xi_prime.assign(n + 1, 0.0);

  out.xi[0] = sgn / 3.0;  // s u' -> 1/2 at the origin
  out.xi_prime[0] = 0.0;  // flux alpha s^2 sinh(2u) vanishes like s
  for (int i = 1; i <= n; ++i) {
    const double s = sol.grid.s[i];
    out.xi[i] = sgn * (2.0 / 3.0) * s * sol.u_prime[i];
    out.xi_prime[i] = sgn * (2.0 / 3.0) * sol.alpha * s * s * std::sinh(2.0 * sol.u[i]);
  }
  out.xi[n] = 0.0;  // u' is 0 at the truncation node, keep the pair exact
  return out;
}

ModelDensities model_densities(const XiProfile& xi) {
  require_theta_plus(xi, "model_densities");
  const FiducialSolution& sol = xi.source;
  const int n = xi.grid.n();

  ModelDensities out;
  out.grid = xi.grid;
  out.phi_sq.assign(n + 1, 0.0);
  out.bracket.assign(n + 1, 0.0);

  // s = 0: the e^{-2v} parts survive, v(0) = f(0)
  const double e0 = std::exp(-2.0 * sol.f0);
  out.phi_sq[0] = 0.25 * xi.alpha * e0;
  out.bracket[0] = -0.5 * xi.alpha * e0;
  for (int i = 1; i <= n; ++i) {
    const double s = xi.grid.s[i];
    out.phi_sq[i] = 0.5 * xi.alpha * s * std::cosh(2.0 * sol.u[i]);
    out.bracket[i] = xi.alpha * s * std::sinh(2.0 * sol.u[i]);
  }
  return out;
}

Lemma73Report lemma73_report(const XiProfile& xi) {
  require_theta_plus(xi, "lemma73_report");
  const double core = std::pow(xi.alpha, -1.0 / 3.0);
  if (xi.grid.s_max < 15.0 * core)
    throw BadParams("lemma73_report needs s_max >= 15 core lengths");
  const ModelDensities dens = model_densities(xi);
  const int n = xi.grid.n();

  std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double s = xi.grid.s[i];
    a[i] = xi.xi_prime[i] * xi.xi_prime[i] * s;
    b[i] = dens.phi_sq[i] * xi.xi[i] * xi.xi[i] * s;
  }

  Lemma73Report rep;
  rep.xi0 = xi.xi[0];
  rep.I_dxi = kTwoPi * gated_integral(xi.grid, a, "I_dxi");
  rep.I_phixi = kTwoPi * gated_integral(xi.grid, b, "I_phixi");
  return rep;
}

double pairing_integral_k0(const XiProfile& xi) {
  require_theta_plus(xi, "pairing_integral_k0");
  const ModelDensities dens = model_densities(xi);
  const int n = xi.grid.n();

  std::vector<double> w(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double s = xi.grid.s[i];
    const double x = xi.xi[i], xp = xi.xi_prime[i];
    w[i] = (-0.5 * (x + x * x * x) * dens.bracket[i] + 2.0 * dens.phi_sq[i] * x * x +
            0.25 * xp * xp) *
           s;
  }
  return kTwoPi * gated_integral(xi.grid, w, "pairing_k0");
}

double pairing_integral_km1(const XiProfile& xi) {
  require_theta_plus(xi, "pairing_integral_km1");
  const FiducialSolution& sol = xi.source;
  const ModelDensities dens = model_densities(xi);
  const int n = xi.grid.n();

  // every term is O(s) once 1 + 3 Xi is written as -2 s v'; the i = 0 limit
  // is 0 and the raw form is never touched near the origin
  std::vector<double> w(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    const double s = xi.grid.s[i];
    const double x = xi.xi[i], xp = xi.xi_prime[i];
    const double one_plus_3xi = -2.0 * s * sol.f_prime[i];
    const double sum_density = xi.alpha * s * std::exp(2.0 * sol.u[i]);  // 2 phi_sq + bracket
    w[i] = -0.5 * x * one_plus_3xi * one_plus_3xi * dens.bracket[i] / s +
           3.0 * sum_density * x * x / s + 2.25 * xp * xp / s;
  }
  return kTwoPi * gated_integral(xi.grid, w, "pairing_km1");
}

double telescoping_check(const XiProfile& xi, const CutoffSpec& cutoff) {
  const int n = xi.grid.n();
  std::vector<double> w(n + 1, 0.0);
  bool any = false;
  for (int i = 0; i <= n; ++i) {
    const double s = xi.grid.s[i];
    const double cp = cutoff.chi_prime(s);
    if (cp != 0.0) {
      const double sxp = s * xi.xi_prime[i];
      w[i] = cp * sxp * sxp;
      any = true;
    }
  }
  if (!any) return 0.0;  // constant cutoff telescopes away exactly
  return (kTwoPi / 24.0) * integrate(xi.grid.s, w);
}

}  // namespace lab
