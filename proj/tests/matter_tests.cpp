#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "qls/matter_response.hpp"
#include "qls/units.hpp"

using namespace qls;

namespace {

MatterParams reference_matter() { return MatterParams(11000.0, 200.0, 120.0, 100.0, 20.0); }

void check_close(const cplx& got, const cplx& want, double rel) {
  const double scale = std::abs(want);
  CHECK(std::abs(got - want) <= rel * scale);
}

}  // namespace

TEST_CASE("matter parameter validation") {
  CHECK_THROWS_AS(MatterParams(11000.0, 200.0, 120.0, 0.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(MatterParams(11000.0, 200.0, -1.0, 100.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(MatterParams(11000.0, 200.0, 120.0, 100.0, -1.0), std::invalid_argument);
  CHECK_NOTHROW(MatterParams(11000.0, 200.0, 0.0, 100.0, 0.0));
}

TEST_CASE("jump frequencies straddle the mean") {
  const auto [wp, wm] = peak_frequencies(reference_matter());
  CHECK(wp == 11200.0);
  CHECK(wm == 10800.0);
  const auto [p0, m0] = peak_frequencies(MatterParams(11000.0, 0.0, 120.0, 100.0, 20.0));
  CHECK(p0 == m0);
}

TEST_CASE("frequency-domain response at reference points") {
  const MatterParams m = reference_matter();
  // extended-precision evaluations of the closed form
  check_close(f_tilde(m, 11000.0, 11000.0, 0.0),
              cplx(0.00038122124242111872, -0.00018067959254434876), 1e-12);
  check_close(f_tilde(m, 10900.0, 11150.0, 30.0),
              cplx(0.00018200268536548577, 3.9826180262730171e-05), 1e-12);
  check_close(f_tilde(m, 11210.0, 10790.0, 77.5),
              cplx(2.5040501056978023e-05, -7.8695983024701938e-05), 1e-12);
  check_close(f_tilde(m, 10800.0, 11200.0, 150.0),
              cplx(-0.00010040775773643887, -7.0550151012435725e-06), 1e-12);
}

TEST_CASE("real part at the undelayed peak is absorptive") {
  // -Re[f_tilde] < 0 would mean gain; the diagonal response must absorb.
  const MatterParams m = reference_matter();
  CHECK(f_tilde(m, 11200.0, 11200.0, 0.0).real() > 0.0);
  CHECK(f_tilde(m, 10800.0, 10800.0, 0.0).real() > 0.0);
}

TEST_CASE("delay enters as a pure phase") {
  const MatterParams m = reference_matter();
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> omega(9000.0, 13000.0);
  std::uniform_real_distribution<double> delay(-200.0, 200.0);
  for (int i = 0; i < 500; ++i) {
    const double wq = omega(rng);
    const double w = omega(rng);
    const double t0 = delay(rng);
    const cplx undelayed = f_tilde(m, wq, w, 0.0);
    // the factorization is exact, not merely approximate
    const cplx expected = std::polar(1.0, -(w - wq) * angular_time(t0)) * undelayed;
    CHECK(f_tilde(m, wq, w, t0) == expected);
    // and therefore the magnitude is delay-independent
    CHECK(std::abs(f_tilde(m, wq, w, t0)) ==
          doctest::Approx(std::abs(undelayed)).epsilon(1e-12));
  }
}

TEST_CASE("without population transfer the response collapses to one resonance") {
  const MatterParams m(11000.0, 200.0, 0.0, 100.0, 20.0);
  const cplx i(0.0, 1.0);
  std::mt19937 rng(778);
  std::uniform_real_distribution<double> omega(9000.0, 13000.0);
  std::uniform_real_distribution<double> delay(-200.0, 200.0);
  for (int n = 0; n < 500; ++n) {
    const double wq = omega(rng);
    const double w = omega(rng);
    const double t0 = delay(rng);
    const cplx phase = std::polar(1.0, -(w - wq) * angular_time(t0));
    const cplx expected =
        phase * (-m.scale) / ((w - wq + i * m.gamma) * (w - 10800.0 + 2.0 * i * m.gamma));
    check_close(f_tilde(m, wq, w, t0), expected, 1e-12);
  }
}

TEST_CASE("without transfer and splitting only the mean resonance remains") {
  const MatterParams m(11000.0, 0.0, 0.0, 100.0, 20.0);
  const cplx i(0.0, 1.0);
  const double wq = 10950.0;
  const double w = 11120.0;
  const cplx expected = -m.scale / ((w - wq + i * m.gamma) * (w - 11000.0 + 2.0 * i * m.gamma));
  check_close(f_tilde(m, wq, w, 0.0), expected, 1e-13);
}

TEST_CASE("response is linear in the strength parameter") {
  const MatterParams base = reference_matter();
  const MatterParams doubled(11000.0, 200.0, 120.0, 100.0, 40.0);
  const MatterParams off(11000.0, 200.0, 120.0, 100.0, 0.0);
  std::mt19937 rng(779);
  std::uniform_real_distribution<double> omega(9000.0, 13000.0);
  for (int n = 0; n < 200; ++n) {
    const double wq = omega(rng);
    const double w = omega(rng);
    // doubling is an exact binary scaling
    CHECK(f_tilde(doubled, wq, w, 12.5) == 2.0 * f_tilde(base, wq, w, 12.5));
    CHECK(f_tilde(off, wq, w, 12.5) == cplx(0.0, 0.0));
  }
}

TEST_CASE("response stays finite on the omega = omega' diagonal") {
  const MatterParams m = reference_matter();
  for (double w : {9000.0, 10800.0, 11000.0, 11200.0, 13000.0}) {
    const cplx v = f_tilde(m, w, w, 40.0);
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
  }
}
