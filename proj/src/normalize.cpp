#include "lab/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lab {

namespace {

using cvec = std::vector<std::complex<double>>;

// Dense truncated series including the constant term: a[k] multiplies u^k.
cvec with_one(const SeriesPoly& p, int n) {
  cvec a(n + 1, 0.0);
  a[0] = 1.0;
  for (int k = 0; k < p.order() && k < n; ++k) a[k + 1] = p.coeffs[k];
  return a;
}

cvec mul(const cvec& a, const cvec& b) {
  const int n = static_cast<int>(a.size()) - 1;
  cvec c(n + 1, 0.0);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Principal square root of a series with a[0] = 1.
cvec sqrt_series(const cvec& a) {
  const int n = static_cast<int>(a.size()) - 1;
  cvec q(n + 1, 0.0);
  q[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    std::complex<double> conv = 0.0;
    for (int j = 1; j < k; ++j) conv += q[j] * q[k - j];
    q[k] = (a[k] - conv) / 2.0;
  }
  return q;
}

// Reciprocal of a series with a[0] = 1.
cvec inv_series(const cvec& a) {
  const int n = static_cast<int>(a.size()) - 1;
  cvec r(n + 1, 0.0);
  r[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += a[j] * r[k - j];
    r[k] = -acc;
  }
  return r;
}

// c-series of the averaging map, with constant term dropped:
// c = (1+theta)^{1/2} (1+beta)^{-1/2} - 1.
cvec c_series(const SeriesPoly& beta, const SeriesPoly& theta, int n) {
  const cvec lhs = sqrt_series(with_one(theta, n));
  const cvec rhs = inv_series(sqrt_series(with_one(beta, n)));
  cvec c = mul(lhs, rhs);
  c[0] = 0.0;  // the two square roots share constant term 1
  return c;
}

}  // namespace

double SeriesPoly::norm() const {
  double acc = 0.0, p = radius;
  for (const auto& b : coeffs) {
    acc += std::abs(b) * p;
    p *= radius;
  }
  return acc;
}

std::complex<double> SeriesPoly::eval(std::complex<double> u) const {
  // Horner on b_1 + b_2 u + ... , then one extra factor of u.
  std::complex<double> acc = 0.0;
  for (int k = order() - 1; k >= 0; --k) acc = acc * u + coeffs[k];
  return acc * u;
}

std::complex<double> SeriesPoly::eval_deriv(std::complex<double> u) const {
  std::complex<double> acc = 0.0;
  for (int k = order() - 1; k >= 0; --k) acc = acc * u + double(k + 1) * coeffs[k];
  return acc;
}

SeriesPoly SeriesPoly::zero(int n_coeffs, double radius) {
  if (n_coeffs < 1 || n_coeffs > kMaxSeriesOrder)
    throw TruncationOverflow("series order outside [1, " + std::to_string(kMaxSeriesOrder) + "]");
  if (!(radius > 0.0)) throw BadParams("series radius must be positive");
  SeriesPoly p;
  p.coeffs.assign(static_cast<std::size_t>(n_coeffs), 0.0);
  p.radius = radius;
  return p;
}

SeriesPoly contraction_step(const SeriesPoly& beta, const SeriesPoly& theta_hol) {
  const int n = std::max(beta.order(), theta_hol.order());
  if (n < 1 || n > kMaxSeriesOrder) throw TruncationOverflow("series order exceeds configured max");
  if (!(theta_hol.radius > 0.0)) throw BadParams("series radius must be positive");

  const cvec c = c_series(beta, theta_hol, n);
  SeriesPoly out = SeriesPoly::zero(n, theta_hol.radius);
  // coefficient n of int_0^1 c(x u) dx is c_n/(n+1)
  for (int k = 1; k <= n; ++k) out.coeffs[k - 1] = c[k] / double(k + 1);
  return out;
}

NormalizeReport normalize_coordinate(const SeriesPoly& theta_hol, double tol) {
  NormalizeReport rep;
  rep.beta = SeriesPoly::zero(std::max(theta_hol.order(), 1), theta_hol.radius);

  const int max_iter = 500;
  double prev_step = -1.0;
  int growth_streak = 0;
  for (int it = 1; it <= max_iter; ++it) {
    SeriesPoly next = contraction_step(rep.beta, theta_hol);
    double step = 0.0, p = theta_hol.radius;
    for (int k = 0; k < next.order(); ++k) {
      step += std::abs(next.coeffs[k] - rep.beta.coeffs[k]) * p;
      p *= theta_hol.radius;
    }
    rep.beta = std::move(next);
    rep.iterations = it;
    rep.step_norms.push_back(step);

    if (rep.beta.norm() > 1e6) throw NotContracting("iterates blow up");
    if (prev_step > 1e-12 && step > 1e-12) {
      const double ratio = step / prev_step;
      rep.contraction_factor = std::max(rep.contraction_factor, ratio);
      growth_streak = ratio > 1.0 ? growth_streak + 1 : 0;
      if (growth_streak >= 3) throw NotContracting("successive step norms grow");
    }
    prev_step = step;
    if (step <= tol * std::max(1.0, rep.beta.norm())) break;
  }
  if (!rep.step_norms.empty() && rep.step_norms.back() > tol * std::max(1.0, rep.beta.norm()))
    throw NoConvergence("fixed-point iteration did not reach tolerance");

  // coefficient form of the defining ODE: (n+1) b_n = c_n at the fixed point
  const int n = rep.beta.order();
  const cvec c = c_series(rep.beta, theta_hol, n);
  for (int k = 1; k <= n; ++k)
    rep.recursion_residual =
        std::max(rep.recursion_residual, std::abs(double(k + 1) * rep.beta.coeffs[k - 1] - c[k]));

  // direct substitution: z = u(1+beta) must satisfy z (dz/du)^2 = u (1+theta)
  const double rho = theta_hol.radius / 2.0;
  for (int j = 0; j < 64; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / 64.0;
    const std::complex<double> u = rho * std::exp(std::complex<double>(0.0, phi));
    const std::complex<double> z = u * (1.0 + rep.beta.eval(u));
    // dz/du = 1 + beta + u * beta'
    const std::complex<double> dz = 1.0 + rep.beta.eval(u) + u * rep.beta.eval_deriv(u);
    const std::complex<double> res = z * dz * dz - u * (1.0 + theta_hol.eval(u));
    rep.ode_residual = std::max(rep.ode_residual, std::abs(res));
  }
  return rep;
}

PhaseNormalization alpha_phase_normalize(std::complex<double> alpha) {
  if (alpha == std::complex<double>(0.0, 0.0)) throw ZeroAlpha("alpha must be nonzero");
  constexpr double third_pi = std::numbers::pi / 3.0;
  double omega = -std::arg(alpha) / 3.0;
  // reduce mod 2pi/3 into the principal window (-pi/3, pi/3]
  while (omega > third_pi) omega -= 2.0 * third_pi;
  while (omega <= -third_pi) omega += 2.0 * third_pi;
  PhaseNormalization out;
  out.alpha_positive = std::abs(alpha);
  out.omega = omega;
  out.rotation = std::exp(std::complex<double>(0.0, omega));
  return out;
}

}  // namespace lab
