#include <cmath>
#include <complex>
#include <stdexcept>

#include <doctest.h>

#include "qls/grid.hpp"
#include "qls/units.hpp"

using qls::FrequencyGrid;

TEST_CASE("grid constructor rejects degenerate windows") {
  CHECK_THROWS_AS(FrequencyGrid(-1.0, 100.0, 11), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(0.0, 100.0, 11), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(200.0, 100.0, 11), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(100.0, 100.0, 11), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(100.0, 200.0, 1), std::invalid_argument);
}

TEST_CASE("grid points include both endpoints") {
  const FrequencyGrid g(9000.0, 13000.0, 161);
  CHECK(g.point(0) == 9000.0);
  CHECK(g.point(160) == doctest::Approx(13000.0).epsilon(1e-14));
  CHECK(g.spacing() == doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("refined grid keeps the original nodes") {
  const FrequencyGrid g(9000.0, 13000.0, 161);
  const FrequencyGrid r = g.refined();
  CHECK(r.n_points == 321);
  CHECK(r.omega_min == g.omega_min);
  CHECK(r.omega_max == g.omega_max);
  for (int i = 0; i < g.n_points; ++i) {
    CHECK(r.point(2 * i) == doctest::Approx(g.point(i)).epsilon(1e-13));
  }
}

TEST_CASE("trapezoid weights sum to the window span") {
  const FrequencyGrid g(7000.0, 15000.0, 3201);
  double total = 0.0;
  for (int i = 0; i < g.n_points; ++i) total += qls::trapezoid_weight(g, i);
  CHECK(total == doctest::Approx(8000.0).epsilon(1e-13));
  CHECK(qls::trapezoid_weight(g, 0) == doctest::Approx(0.5 * g.spacing()));
  CHECK(qls::trapezoid_weight(g, g.n_points - 1) == doctest::Approx(0.5 * g.spacing()));
  CHECK(qls::trapezoid_weight(g, 1) == doctest::Approx(g.spacing()));
}

TEST_CASE("trapezoid rule is exact for affine integrands") {
  const FrequencyGrid g(100.0, 500.0, 41);
  const double got = qls::trapezoid(g, [](double w) { return 3.0 + 0.25 * w; });
  // int_100^500 (3 + w/4) dw = 1200 + 30000
  CHECK(got == doctest::Approx(31200.0).epsilon(1e-13));
}

TEST_CASE("trapezoid works on complex integrands") {
  const FrequencyGrid g(100.0, 200.0, 2001);
  const qls::cplx got = qls::trapezoid(g, [](double w) {
    return qls::cplx(std::cos(w / 100.0), std::sin(w / 100.0));
  });
  const double re = 100.0 * (std::sin(2.0) - std::sin(1.0));
  const double im = 100.0 * (std::cos(1.0) - std::cos(2.0));
  CHECK(got.real() == doctest::Approx(re).epsilon(1e-7));
  CHECK(got.imag() == doctest::Approx(im).epsilon(1e-7));
}
