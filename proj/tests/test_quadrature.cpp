#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bslab/quadrature.hpp"
#include "doctest.h"

using namespace bslab;

TEST_CASE("two-point rule on [0,1] has the textbook nodes and weights") {
  Quadrature q = build_quadrature(1.0, 2);
  double s3 = 1.0 / std::sqrt(3.0);
  CHECK(q.nodes[0] == doctest::Approx((1.0 - s3) / 2.0).epsilon(1e-15));
  CHECK(q.nodes[1] == doctest::Approx((1.0 + s3) / 2.0).epsilon(1e-15));
  CHECK(q.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("n=2 integrates r^2 exactly") {
  for (double R : {1.0, 3.7}) {
    Quadrature q = build_quadrature(R, 2);
    double s = 0.0;
    for (int i = 0; i < 2; ++i) s += q.weights[i] * q.nodes[i] * q.nodes[i];
    CHECK(s == doctest::Approx(R * R * R / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("n=20 rule nails a smooth integral") {
  Quadrature q = build_quadrature(1.0, 20);
  double s = 0.0;
  for (int i = 0; i < 20; ++i) s += q.weights[i] * std::exp(-q.nodes[i]);
  CHECK(std::abs(s - (1.0 - std::exp(-1.0))) < 1e-15);
}

TEST_CASE("nodes increase, weights positive, interior") {
  Quadrature q = build_quadrature(2.5, 97);
  for (int i = 0; i < q.order; ++i) {
    CHECK(q.weights[i] > 0.0);
    CHECK(q.nodes[i] > 0.0);
    CHECK(q.nodes[i] < 2.5);
    if (i) CHECK(q.nodes[i] > q.nodes[i - 1]);
  }
}

TEST_CASE("exactness to degree 2n-1") {
  int n = 7;
  Quadrature q = build_quadrature(1.0, n);
  for (int d = 0; d <= 2 * n - 1; ++d) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.nodes[i], d);
    CHECK(s == doctest::Approx(1.0 / (d + 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("order below 2 is rejected") {
  CHECK_THROWS_AS(build_quadrature(1.0, 1), std::invalid_argument);
}

TEST_CASE("panel integration splits at breakpoints") {
  // |r - 1| has a kink at 1; the split makes it exact
  auto f = [](double r) { return Complex(std::abs(r - 1.0), 0.0); };
  Complex I = panel_integrate(f, 0.0, 2.0, {1.0}, 16);
  CHECK(std::abs(I.real() - 1.0) < 1e-14);
}

TEST_CASE("adaptive integration reaches the requested tolerance") {
  auto f = [](double r) { return Complex(std::cos(20.0 * r) * std::exp(-r), 0.0); };
  Complex I = adaptive_integrate(f, 0.0, 5.0, 1e-12);
  double exact = (1.0 - std::exp(-5.0) * (std::cos(100.0) - 20.0 * std::sin(100.0))) / 401.0;
  CHECK(std::abs(I.real() - exact) < 1e-11);
}
