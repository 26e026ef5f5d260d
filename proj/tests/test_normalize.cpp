#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "lab/normalize.hpp"

using namespace lab;
using cplx = std::complex<double>;

static SeriesPoly linear_theta(double eps, int n = 32, double radius = 0.5) {
  SeriesPoly th = SeriesPoly::zero(n, radius);
  th.coeffs[0] = eps;
  return th;
}

TEST_CASE("averaging map fixes the trivial problem and halves+averages a linear input") {
  SeriesPoly zero = SeriesPoly::zero(32, 0.5);
  SeriesPoly out = contraction_step(zero, zero);
  for (const auto& b : out.coeffs) CHECK(std::abs(b) == 0.0);

  // theta = eps*u, beta = 0: c_1 = eps/2, output coefficient c_1/2 = eps/4
  const double eps = 1e-3;
  out = contraction_step(zero, linear_theta(eps));
  CHECK(out.coeffs[0].real() == doctest::Approx(eps / 4.0).epsilon(1e-12));
  CHECK(std::abs(out.coeffs[0].imag()) < 1e-18);
}

TEST_CASE("fixed point of the linear problem lands on the coefficient recursion value") {
  // (n+1) b_n = c_n at order one reads 2 b_1 = eps/2 - b_1/2, so b_1 = eps/5
  const double eps = 1e-2;
  NormalizeReport rep = normalize_coordinate(linear_theta(eps));
  CHECK(rep.beta.coeffs[0].real() == doctest::Approx(eps / 5.0).epsilon(1e-10));
  CHECK(rep.recursion_residual < 1e-13);
}

TEST_CASE("zero input returns beta = 0 exactly") {
  NormalizeReport rep = normalize_coordinate(SeriesPoly::zero(32, 0.5));
  for (const auto& b : rep.beta.coeffs) CHECK(std::abs(b) == 0.0);
  CHECK(rep.ode_residual == 0.0);
  CHECK(rep.recursion_residual == 0.0);
}

TEST_CASE("measured contraction factor stays under 3/4 in the small regime") {
  // norm eps*radius = 0.01 exactly at the regime boundary
  NormalizeReport rep = normalize_coordinate(linear_theta(0.02));
  CHECK(rep.beta.norm() <= 0.02);
  CHECK(rep.contraction_factor <= 0.75);

  // a full-tail analytic theta at the same norm
  SeriesPoly th = SeriesPoly::zero(32, 0.5);
  double scale = 0.0, p = 0.5;
  for (int k = 0; k < 32; ++k) {
    th.coeffs[k] = std::pow(0.7, k);
    scale += std::pow(0.7, k) * p;
    p *= 0.5;
  }
  for (auto& b : th.coeffs) b *= 0.01 / scale;  // norm exactly 0.01
  rep = normalize_coordinate(th);
  CHECK(rep.contraction_factor <= 0.75);
}

TEST_CASE("substituting z = u(1+beta) back into the defining relation leaves no residual") {
  SeriesPoly th = SeriesPoly::zero(32, 0.5);
  for (int k = 0; k < 32; ++k) th.coeffs[k] = 0.008 * std::pow(0.6, k) * cplx(std::cos(0.3 * k), std::sin(0.3 * k));
  NormalizeReport rep = normalize_coordinate(th);
  CHECK(rep.ode_residual <= 1e-10);  // 64 samples on |u| = radius/2
  CHECK(rep.recursion_residual <= 1e-13);
}

TEST_CASE("truncation order is inert for the leading coefficients") {
  auto make = [](int n) {
    SeriesPoly th = SeriesPoly::zero(n, 0.5);
    for (int k = 0; k < n; ++k) th.coeffs[k] = 0.005 * std::pow(0.9, k);
    return normalize_coordinate(th).beta;
  };
  SeriesPoly b16 = make(16), b32 = make(32);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(b16.coeffs[k] - b32.coeffs[k]) < 1e-12);
}

TEST_CASE("out-of-regime data is reported rather than iterated forever") {
  CHECK_THROWS_AS(normalize_coordinate(linear_theta(100.0)), NotContracting);
  CHECK_THROWS_AS(SeriesPoly::zero(kMaxSeriesOrder + 1, 0.5), TruncationOverflow);
  CHECK_THROWS_AS(SeriesPoly::zero(8, -1.0), BadParams);
}

TEST_CASE("phase normalization lands in the principal cube-root window") {
  PhaseNormalization pn = alpha_phase_normalize(cplx(-1.0, 0.0));
  CHECK(pn.alpha_positive == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pn.omega == doctest::Approx(std::numbers::pi / 3.0).epsilon(1e-15));
  // the rotation cubed times alpha is positive real
  cplx restored = std::pow(pn.rotation, 3) * cplx(-1.0, 0.0);
  CHECK(restored.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(restored.imag()) < 1e-14);

  pn = alpha_phase_normalize(cplx(4.0, 0.0));
  CHECK(pn.omega == 0.0);
  CHECK(pn.rotation == cplx(1.0, 0.0));
  CHECK(pn.alpha_positive == 4.0);

  for (double a : {0.3, 1.7, 2.9, -2.9}) {
    cplx alpha = 2.5 * std::exp(cplx(0.0, a));
    pn = alpha_phase_normalize(alpha);
    CHECK(pn.alpha_positive == doctest::Approx(std::abs(alpha)).epsilon(1e-15));
    CHECK(pn.omega > -std::numbers::pi / 3.0);
    CHECK(pn.omega <= std::numbers::pi / 3.0);
    cplx val = std::pow(pn.rotation, 3) * alpha;
    CHECK(val.real() > 0.0);
    CHECK(std::abs(val.imag()) < 1e-13 * std::abs(alpha));
  }

  CHECK_THROWS_AS(alpha_phase_normalize(cplx(0.0, 0.0)), ZeroAlpha);
}
