#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "haarpush/integrate.hpp"

using namespace haarpush;

namespace {

Box box1(double lo, double hi) { return Box{{Interval{lo, hi}}}; }

Box box2(double lo0, double hi0, double lo1, double hi1) {
  return Box{{Interval{lo0, hi0}, Interval{lo1, hi1}}};
}

Integrator gauss(int order, int panels = 1) {
  Integrator g;
  g.kind = IntegratorKind::GaussTensor;
  g.order = order;
  g.panels = panels;
  return g;
}

Integrator mc(long samples, uint64_t seed) {
  Integrator m;
  m.kind = IntegratorKind::MonteCarlo;
  m.mc_samples = samples;
  m.seed = seed;
  return m;
}

}  // namespace

TEST_CASE("Gauss-Legendre nodes and weights") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  REQUIRE(x.size() == 5);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));  // integrates 1 over [-1,1]
  // symmetry of the rule
  CHECK(x[2] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(x[0] == doctest::Approx(-x[4]).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(w[4]).epsilon(1e-14));
  // classical 2-point rule: nodes at +-1/sqrt(3), weights 1
  gauss_legendre(2, x, w);
  CHECK(x[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constant integrand over the unit square") {
  auto one = [](const double*) { return 1.0; };
  const auto r = integrate_box(std::function<double(const double*)>(one), box2(0, 1, 0, 1),
                               gauss(4));
  CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.value.imag() == 0.0);
  CHECK(r.error_estimate <= 1e-14);
}

TEST_CASE("polynomial bump normalization: integral of (1-t^2)^3 over [-1,1] is 32/35") {
  auto f = [](const double* x) {
    const double u = 1.0 - x[0] * x[0];
    return u * u * u;
  };
  const auto r = integrate_box(std::function<double(const double*)>(f), box1(-1, 1), gauss(6));
  CHECK(r.value.real() == doctest::Approx(32.0 / 35.0).epsilon(1e-13));
}

TEST_CASE("Gauss order n is exact for degree 2n-1") {
  for (int n : {2, 3, 5, 8}) {
    const int deg = 2 * n - 1;
    auto f = [deg](const double* x) { return std::pow(x[0], deg); };
    const auto r = integrate_box(std::function<double(const double*)>(f), box1(0, 1), gauss(n));
    CHECK(r.value.real() == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-12));
  }
}

TEST_CASE("2D monomial over a rectangle") {
  // integral of x^2 y^3 over [0,2]x[0,1] = (8/3)*(1/4) = 2/3
  auto f = [](const double* x) { return x[0] * x[0] * x[1] * x[1] * x[1]; };
  const auto r = integrate_box(std::function<double(const double*)>(f), box2(0, 2, 0, 1),
                               gauss(4));
  CHECK(r.value.real() == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("smooth non-polynomial integrand converges and reports a usable error estimate") {
  auto f = [](const double* x) { return std::exp(x[0]); };
  const auto r = integrate_box(std::function<double(const double*)>(f), box1(0, 1), gauss(8));
  const double truth = std::exp(1.0) - 1.0;
  CHECK(std::fabs(r.value.real() - truth) <= 1e-12);
  CHECK(std::fabs(r.value.real() - truth) <= std::max(r.error_estimate * 10.0, 1e-13));
}

TEST_CASE("complex-valued integrand") {
  // integral of exp(i x) over [0,1] = sin(1) + i (1 - cos(1))
  auto f = [](const double* x) { return std::exp(Cmplx(0.0, x[0])); };
  const auto r = integrate_box(BoxFn(f), box1(0, 1), gauss(10));
  CHECK(r.value.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
  CHECK(r.value.imag() == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-13));
}

TEST_CASE("zero-dimensional box is a point evaluation") {
  auto f = [](const double*) { return Cmplx(3.5, -1.0); };
  const auto r = integrate_box(BoxFn(f), Box{}, gauss(12));
  CHECK(r.value == Cmplx(3.5, -1.0));
  CHECK(r.evaluations == 1);
  CHECK(r.error_estimate == 0.0);
}

TEST_CASE("empty box integrates to exactly zero without evaluations") {
  auto f = [](const double*) { return 1.0; };
  const auto r = integrate_box(std::function<double(const double*)>(f), box1(2, 1), gauss(4));
  CHECK(r.value == Cmplx(0.0, 0.0));
  CHECK(r.evaluations == 0);
}

TEST_CASE("panel subdivision recovers accuracy at an interior kink") {
  auto f = [](const double* x) { return std::fabs(x[0]); };  // kink at 0
  const auto split = integrate_box(std::function<double(const double*)>(f), box1(-1, 1),
                                   gauss(8, 2));
  // with the kink on a panel boundary each panel sees a polynomial
  CHECK(std::fabs(split.value.real() - 1.0) <= 1e-14);
  const auto whole = integrate_box(std::function<double(const double*)>(f), box1(-1, 1),
                                   gauss(8, 1));
  CHECK(std::fabs(whole.value.real() - 1.0) > 1e-6);  // kink inside a panel hurts
}

TEST_CASE("error paths: unbounded box and non-finite integrand") {
  auto f = [](const double* x) { return x[0]; };
  CHECK_THROWS_WITH_AS(
      integrate_box(std::function<double(const double*)>(f), box1(0, kInf), gauss(4)),
      doctest::Contains("bounded"), Error);
  auto bad = [](const double* x) { return x[0] > 0.5 ? std::nan("") : 0.0; };
  CHECK_THROWS_WITH_AS(
      integrate_box(std::function<double(const double*)>(bad), box1(0, 1), gauss(4)),
      doctest::Contains("not finite"), Error);
}

TEST_CASE("Monte Carlo: determinism, accuracy, and sample scaling") {
  auto f = [](const double* x) { return x[0]; };
  const auto a = integrate_box(std::function<double(const double*)>(f), box1(0, 1),
                               mc(20000, 42));
  const auto b = integrate_box(std::function<double(const double*)>(f), box1(0, 1),
                               mc(20000, 42));
  CHECK(a.value.real() == b.value.real());  // bitwise reproducible
  CHECK(a.error_estimate == b.error_estimate);

  const auto c = integrate_box(std::function<double(const double*)>(f), box1(0, 1),
                               mc(20000, 43));
  CHECK(a.value.real() != c.value.real());  // seed matters

  CHECK(std::fabs(a.value.real() - 0.5) <= 5.0 * a.error_estimate);

  const auto big = integrate_box(std::function<double(const double*)>(f), box1(0, 1),
                                 mc(20000 * 16, 42));
  const double ratio = a.error_estimate / big.error_estimate;
  CHECK(ratio > 2.5);  // 16x samples should shrink sigma roughly 4x
  CHECK(ratio < 6.5);
}

TEST_CASE("Monte Carlo of a 2D integrand stays within error bars") {
  auto f = [](const double* x) { return x[0] * x[0] + x[1]; };  // exact: 1/3 + 1/2
  const auto r = integrate_box(std::function<double(const double*)>(f), box2(0, 1, 0, 1),
                               mc(50000, 7));
  CHECK(std::fabs(r.value.real() - (1.0 / 3.0 + 0.5)) <= 5.0 * r.error_estimate);
}
