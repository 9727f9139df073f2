#pragma once

namespace ckx::theory {

// SI-exact Boltzmann constant, J/K.
inline constexpr double boltzmann_k = 1.380649e-23;

struct SteadyMoments {
  double msq_a = 0.0;   // <v_a^2>, V^2
  double msq_b = 0.0;   // <v_b^2>, V^2
  double cross = 0.0;   // <v_a v_b>, V^2
  bool unreachable = false;  // gain product > 1: formula valid, dynamics latch
};

enum class Sign { negative, zero, positive };

// Magnitude of the negative loop gain product. Requires a1*a2 < 0.
double loop_amplification(double a1, double a2);

// Series resistance divided down by the feedback loop.
double cold_effective_resistance(double r0, double a_loop);

// Noise temperature divided down by the feedback loop.
double cold_effective_temperature(double t_ambient, double a_loop);

// Thermal noise voltage density S = 4 k T R, V^2/Hz.
double johnson_spectrum(double t_kelvin, double r_ohm);

// Inverse of johnson_spectrum in T: temperature that produces density s_u
// across resistance r.
double effective_temperature(double s_u, double r_ohm);

// Parallel resistance of the two parties' selections.
double kljn_parallel(double r_a, double r_b);

// Mean-square wire voltage 4 k T_eff R_p df, V^2.
double kljn_wire_msq(double t_eff, double r_p, double bandwidth_hz);

// Long-run second moments of the two wire voltages for constant gains and
// equal injected noise power sigma_sq on both sides.
SteadyMoments steady_moments(double a1, double a2, double sigma_sq);

// Sign of the steady cross-correlation, i.e. of (a1 + a2).
Sign expected_sign(double a1, double a2);

}  // namespace ckx::theory
