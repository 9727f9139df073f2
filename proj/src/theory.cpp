#include "ckx/theory.hpp"

#include <cmath>

#include "ckx/errors.hpp"

namespace ckx::theory {

double loop_amplification(double a1, double a2) {
  const double p = a1 * a2;
  if (p >= 0.0)
    throw domain_error("loop_amplification: gain product must be negative");
  return -p;
}

double cold_effective_resistance(double r0, double a_loop) {
  if (r0 <= 0.0) throw domain_error("cold_effective_resistance: r0 > 0");
  if (a_loop < 0.0)
    throw domain_error("cold_effective_resistance: a_loop >= 0");
  return r0 / (1.0 + a_loop);
}

double cold_effective_temperature(double t_ambient, double a_loop) {
  if (t_ambient <= 0.0)
    throw domain_error("cold_effective_temperature: t_ambient > 0");
  if (a_loop < 0.0)
    throw domain_error("cold_effective_temperature: a_loop >= 0");
  return t_ambient / (1.0 + a_loop);
}

double johnson_spectrum(double t_kelvin, double r_ohm) {
  if (t_kelvin <= 0.0 || r_ohm <= 0.0)
    throw domain_error("johnson_spectrum: T, R > 0");
  return 4.0 * boltzmann_k * t_kelvin * r_ohm;
}

double effective_temperature(double s_u, double r_ohm) {
  if (s_u <= 0.0 || r_ohm <= 0.0)
    throw domain_error("effective_temperature: S, R > 0");
  return s_u / (4.0 * boltzmann_k * r_ohm);
}

double kljn_parallel(double r_a, double r_b) {
  if (r_a <= 0.0 || r_b <= 0.0) throw domain_error("kljn_parallel: R > 0");
  return r_a * r_b / (r_a + r_b);
}

double kljn_wire_msq(double t_eff, double r_p, double bandwidth_hz) {
  if (t_eff <= 0.0 || r_p <= 0.0 || bandwidth_hz <= 0.0)
    throw domain_error("kljn_wire_msq: all arguments > 0");
  return 4.0 * boltzmann_k * t_eff * r_p * bandwidth_hz;
}

SteadyMoments steady_moments(double a1, double a2, double sigma_sq) {
  if (sigma_sq < 0.0) throw domain_error("steady_moments: sigma_sq >= 0");
  const double p = a1 * a2;
  if (p == 1.0) throw domain_error("steady_moments: gain product 1 is singular");
  const double d = (1.0 - p) * (1.0 - p);
  SteadyMoments m;
  m.msq_a = sigma_sq * (1.0 + a1 * a1) / d;
  m.msq_b = sigma_sq * (1.0 + a2 * a2) / d;
  m.cross = sigma_sq * (a1 + a2) / d;
  m.unreachable = p > 1.0;
  return m;
}

Sign expected_sign(double a1, double a2) {
  const double s = a1 + a2;
  if (s < 0.0) return Sign::negative;
  if (s > 0.0) return Sign::positive;
  return Sign::zero;
}

}  // namespace ckx::theory
