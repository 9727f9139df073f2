#include "ckx/noise.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <tuple>

#include "ckx/errors.hpp"
#include "ckx/theory.hpp"

namespace ckx::noise {

namespace {

constexpr double pi = 3.14159265358979323846;

// Seed of the internal RMS-calibration stream. Fixed so that the calibration
// gain depends only on (sample_rate, cutoff, order), never on session seeds.
constexpr std::uint64_t calibration_seed = 0x5DEECE66Dull;

double uniform_open(std::mt19937_64& rng) {
  // (0, 1]: never feeds 0 to log().
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

double gaussian(std::mt19937_64& rng, double& spare, bool& have_spare) {
  if (have_spare) {
    have_spare = false;
    return spare;
  }
  const double u1 = uniform_open(rng);
  const double u2 = uniform_open(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * pi * u2;
  spare = r * std::sin(t);
  have_spare = true;
  return r * std::cos(t);
}

std::size_t warmup_samples(const NoiseSpec& spec) {
  return static_cast<std::size_t>(
      std::ceil(10.0 * spec.sample_rate_hz / spec.cutoff_hz));
}

// RMS of the unit-variance-input filtered stream, measured once per filter
// shape on a fixed seed and memoized.
double filtered_unit_rms(double cutoff_hz, double sample_rate_hz, int order) {
  static std::map<std::tuple<double, double, int>, double> cache;
  static std::mutex mtx;
  const auto key = std::make_tuple(cutoff_hz, sample_rate_hz, order);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto sections = butterworth_lowpass(cutoff_hz, sample_rate_hz, order);
  std::mt19937_64 rng(calibration_seed);
  double spare = 0.0;
  bool have_spare = false;
  const std::size_t n_warm = static_cast<std::size_t>(
      std::ceil(10.0 * sample_rate_hz / cutoff_hz));
  for (std::size_t i = 0; i < n_warm; ++i) {
    double v = gaussian(rng, spare, have_spare);
    for (auto& s : sections) v = s.step(v);
  }
  const std::size_t n = 1u << 20;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = gaussian(rng, spare, have_spare);
    for (auto& s : sections) v = s.step(v);
    ss += v * v;
  }
  const double rms = std::sqrt(ss / static_cast<double>(n));
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(key, rms);
  return rms;
}

}  // namespace

void NoiseSpec::validate() const {
  if (sample_rate_hz <= 0.0)
    throw config_error("noise.sample_rate_hz must be positive");
  if (cutoff_hz <= 0.0) throw config_error("noise.cutoff_hz must be positive");
  if (cutoff_hz >= sample_rate_hz / 2.0)
    throw config_error("noise.cutoff_hz must be below sample_rate_hz / 2");
  if (filter_order < 1) throw config_error("noise.filter_order must be >= 1");
  if (target_rms_volts < 0.0)
    throw config_error("noise.target_rms_volts must be >= 0");
}

std::vector<Biquad> butterworth_lowpass(double cutoff_hz,
                                        double sample_rate_hz, int order) {
  if (order < 1) throw config_error("filter order must be >= 1");
  if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate_hz / 2.0)
    throw config_error("cutoff must lie in (0, sample_rate/2)");
  const double k = std::tan(pi * cutoff_hz / sample_rate_hz);
  std::vector<Biquad> sections;
  for (int i = 0; i < order / 2; ++i) {
    const double theta = (2.0 * i + 1.0) * pi / (2.0 * order);
    const double q = 2.0 * std::sin(theta);
    const double d = 1.0 + q * k + k * k;
    Biquad s;
    s.b0 = k * k / d;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = (2.0 * k * k - 2.0) / d;
    s.a2 = (1.0 - q * k + k * k) / d;
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double d = 1.0 + k;
    Biquad s;
    s.b0 = k / d;
    s.b1 = k / d;
    s.b2 = 0.0;
    s.a1 = (k - 1.0) / d;
    s.a2 = 0.0;
    sections.push_back(s);
  }
  return sections;
}

double cascade_gain(const std::vector<Biquad>& sections, double f_hz,
                    double sample_rate_hz) {
  const std::complex<double> z =
      std::polar(1.0, -2.0 * pi * f_hz / sample_rate_hz);
  double g = 1.0;
  for (const auto& s : sections) {
    const auto num = s.b0 + z * (s.b1 + z * s.b2);
    const auto den = 1.0 + z * (s.a1 + z * s.a2);
    g *= std::abs(num / den);
  }
  return g;
}

double external_noise_scale(double t_eff_kelvin, double r_ohm,
                            double bandwidth_hz) {
  if (t_eff_kelvin < 0.0 || r_ohm <= 0.0 || bandwidth_hz <= 0.0)
    throw domain_error("external_noise_scale: T >= 0, R > 0, bandwidth > 0");
  return std::sqrt(4.0 * theory::boltzmann_k * t_eff_kelvin * r_ohm *
                   bandwidth_hz);
}

NoiseSource::NoiseSource(const NoiseSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec_.validate();
  sections_ = butterworth_lowpass(spec_.cutoff_hz, spec_.sample_rate_hz,
                                  spec_.filter_order);
  if (spec_.target_rms_volts > 0.0) {
    calibration_gain_ =
        spec_.target_rms_volts /
        filtered_unit_rms(spec_.cutoff_hz, spec_.sample_rate_hz,
                          spec_.filter_order);
  }
  const std::size_t n_warm = warmup_samples(spec_);
  for (std::size_t i = 0; i < n_warm; ++i) next_noise();
}

double NoiseSource::white_gaussian() {
  return gaussian(rng_, spare_, have_spare_);
}

double NoiseSource::lowpass_step(double x) {
  for (auto& s : sections_) x = s.step(x);
  return x;
}

}  // namespace ckx::noise
