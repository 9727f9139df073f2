#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ckx::noise {

struct NoiseSpec {
  double sample_rate_hz = 250000.0;
  double cutoff_hz = 5000.0;
  int filter_order = 4;
  double target_rms_volts = 0.96;
  std::uint64_t seed = 0;

  void validate() const;  // throws config_error
};

// One biquad of the cutoff filter, transposed direct form II.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double s0 = 0.0, s1 = 0.0;

  double step(double x) {
    const double y = b0 * x + s0;
    s0 = b1 * x - a1 * y + s1;
    s1 = b2 * x - a2 * y;
    return y;
  }
  void reset() { s0 = s1 = 0.0; }
};

// Butterworth pole placement mapped with the bilinear transform; odd orders
// get a trailing first-order section folded into a biquad (b2 = a2 = 0).
std::vector<Biquad> butterworth_lowpass(double cutoff_hz, double sample_rate_hz,
                                        int order);

// Magnitude response of a section cascade at frequency f.
double cascade_gain(const std::vector<Biquad>& sections, double f_hz,
                    double sample_rate_hz);

// RMS a generator must target to emulate a resistor R at temperature T_eff
// over the given bandwidth: sqrt(4 k T_eff R df).
double external_noise_scale(double t_eff_kelvin, double r_ohm,
                            double bandwidth_hz);

class NoiseSource {
 public:
  explicit NoiseSource(const NoiseSpec& spec);

  // Next unit-variance Gaussian deviate of the seeded stream.
  double white_gaussian();

  // One step of the band-limiting filter.
  double lowpass_step(double x);

  // Next calibrated band-limited sample.
  double next_noise() { return calibration_gain_ * lowpass_step(white_gaussian()); }

  const NoiseSpec& spec() const { return spec_; }
  double calibration_gain() const { return calibration_gain_; }

 private:
  NoiseSpec spec_;
  std::mt19937_64 rng_;
  std::vector<Biquad> sections_;
  double calibration_gain_ = 0.0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ckx::noise
