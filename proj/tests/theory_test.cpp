#include <cmath>
#include <random>

#include <doctest.h>

#include "ckx/errors.hpp"
#include "ckx/theory.hpp"

using namespace ckx;

TEST_CASE("loop amplification of an inverting pair") {
  CHECK(theory::loop_amplification(-3.0, 3.0) == doctest::Approx(9.0));
  CHECK(theory::loop_amplification(3.0, -3.0) == doctest::Approx(9.0));
  CHECK(theory::loop_amplification(-1.0, 1.0) == doctest::Approx(1.0));
  CHECK(theory::loop_amplification(-0.5, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(theory::loop_amplification(2.0, 2.0), domain_error);
  CHECK_THROWS_AS(theory::loop_amplification(0.0, 2.0), domain_error);
}

TEST_CASE("feedback divides resistance and temperature") {
  CHECK(theory::cold_effective_resistance(1000.0, 9.0) ==
        doctest::Approx(100.0));
  CHECK(theory::cold_effective_resistance(1000.0, 0.0) ==
        doctest::Approx(1000.0));
  CHECK(theory::cold_effective_temperature(300.0, 9.0) ==
        doctest::Approx(30.0));
  CHECK_THROWS_AS(theory::cold_effective_resistance(-1.0, 9.0), domain_error);
  CHECK_THROWS_AS(theory::cold_effective_temperature(300.0, -1.0),
                  domain_error);
}

TEST_CASE("cold resistor keeps the johnson ratio S over R") {
  // Dividing both T and R by (1 + A) divides S = 4kTR by (1 + A)^2, so the
  // cold element is indistinguishable from a genuinely cold physical R_eff.
  const double t = 300.0, r0 = 1000.0, a = 9.0;
  const double r_eff = theory::cold_effective_resistance(r0, a);
  const double t_eff = theory::cold_effective_temperature(t, a);
  CHECK(theory::johnson_spectrum(t_eff, r_eff) ==
        doctest::Approx(theory::johnson_spectrum(t, r0) /
                        ((1.0 + a) * (1.0 + a)))
            .epsilon(1e-12));
}

TEST_CASE("johnson spectrum closed form") {
  CHECK(theory::johnson_spectrum(300.0, 100.0) ==
        doctest::Approx(4.0 * theory::boltzmann_k * 3.0e4).epsilon(1e-15));
  CHECK(theory::johnson_spectrum(600.0, 100.0) ==
        doctest::Approx(2.0 * theory::johnson_spectrum(300.0, 100.0))
            .epsilon(1e-15));
  CHECK_THROWS_AS(theory::johnson_spectrum(0.0, 100.0), domain_error);
  CHECK_THROWS_AS(theory::johnson_spectrum(-1.0, 100.0), domain_error);
  CHECK_THROWS_AS(theory::johnson_spectrum(300.0, 0.0), domain_error);
}

TEST_CASE("effective temperature inverts the spectrum") {
  const double s = theory::johnson_spectrum(123.0, 456.0);
  CHECK(theory::effective_temperature(s, 456.0) ==
        doctest::Approx(123.0).epsilon(1e-12));
  CHECK_THROWS_AS(theory::effective_temperature(1.0, 0.0), domain_error);
}

TEST_CASE("parallel resistance of the selected pair") {
  CHECK(theory::kljn_parallel(100.0, 500.0) ==
        doctest::Approx(500.0 / 6.0).epsilon(1e-12));
  CHECK(theory::kljn_parallel(200.0, 200.0) == doctest::Approx(100.0));
  CHECK(theory::kljn_parallel(100.0, 500.0) ==
        doctest::Approx(theory::kljn_parallel(500.0, 100.0)).epsilon(1e-15));
  CHECK_THROWS_AS(theory::kljn_parallel(0.0, 500.0), domain_error);
}

TEST_CASE("wire voltage power from the parallel pair") {
  const double df = 5000.0;
  const double m_ll = theory::kljn_wire_msq(
      300.0, theory::kljn_parallel(100.0, 100.0), df);
  const double m_lh = theory::kljn_wire_msq(
      300.0, theory::kljn_parallel(100.0, 500.0), df);
  const double m_hl = theory::kljn_wire_msq(
      300.0, theory::kljn_parallel(500.0, 100.0), df);
  const double m_hh = theory::kljn_wire_msq(
      300.0, theory::kljn_parallel(500.0, 500.0), df);
  CHECK(m_lh == doctest::Approx(m_hl).epsilon(1e-15));
  CHECK(m_ll < m_lh);
  CHECK(m_lh < m_hh);
  CHECK_THROWS_AS(theory::kljn_wire_msq(300.0, 100.0, 0.0), domain_error);
}

TEST_CASE("steady moments closed form") {
  // Opposite-sign gains with |a1| = |a2| = 5 and unit injected power:
  // denominator (1 - a1 a2)^2 = 676, numerator 1 + 25 = 26.
  const auto m = theory::steady_moments(-5.0, 5.0, 1.0);
  CHECK(m.msq_a == doctest::Approx(26.0 / 676.0).epsilon(1e-12));
  CHECK(m.msq_b == doctest::Approx(26.0 / 676.0).epsilon(1e-12));
  CHECK(m.cross == doctest::Approx(0.0));
  CHECK_FALSE(m.unreachable);

  const auto neg = theory::steady_moments(-0.5, -0.5, 1.0);
  CHECK(neg.cross == doctest::Approx(-1.0 / 0.5625).epsilon(1e-12));
  CHECK(neg.msq_a == doctest::Approx(1.25 / 0.5625).epsilon(1e-12));
  CHECK_FALSE(neg.unreachable);

  const auto latch = theory::steady_moments(5.0, 5.0, 1.0);
  CHECK(latch.unreachable);
  CHECK(latch.cross > 0.0);

  CHECK_THROWS_AS(theory::steady_moments(1.0, 1.0, 1.0), domain_error);
  CHECK_THROWS_AS(theory::steady_moments(2.0, 0.5, 1.0), domain_error);
}

TEST_CASE("steady moment identities hold over random gains") {
  std::mt19937_64 rng(0x7E0);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double a1 = u(rng), a2 = u(rng), s = scale(rng);
    const auto m = theory::steady_moments(a1, a2, s);
    const auto sw = theory::steady_moments(a2, a1, s);
    // Swapping the parties swaps the wire powers and keeps the cross term.
    CHECK(m.msq_a == doctest::Approx(sw.msq_b).epsilon(1e-12));
    CHECK(m.msq_b == doctest::Approx(sw.msq_a).epsilon(1e-12));
    CHECK(m.cross == doctest::Approx(sw.cross).epsilon(1e-12));
    // Injected power scales everything linearly.
    const auto m2 = theory::steady_moments(a1, a2, 2.0 * s);
    CHECK(m2.msq_a == doctest::Approx(2.0 * m.msq_a).epsilon(1e-12));
    CHECK(m2.cross == doctest::Approx(2.0 * m.cross).epsilon(1e-12));
    // Cauchy-Schwarz for a genuine pair of second moments.
    CHECK(m.cross * m.cross <= m.msq_a * m.msq_b * (1.0 + 1e-12));
    CHECK(m.msq_a > 0.0);
  }
}

TEST_CASE("cross correlation sign tracks the gain sum") {
  CHECK(theory::expected_sign(-0.5, -0.5) == theory::Sign::negative);
  CHECK(theory::expected_sign(0.5, 0.5) == theory::Sign::positive);
  CHECK(theory::expected_sign(-5.0, 5.0) == theory::Sign::zero);
  CHECK(theory::expected_sign(5.0, -5.0) == theory::Sign::zero);
}
