#include "ckx/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>

#include "ckx/errors.hpp"
#include "ckx/stats.hpp"

namespace ckx::protocol {

namespace {

// Base seed of the threshold-calibration streams; fixed so the threshold is
// a property of the configuration, not of any session's randomness.
constexpr std::uint64_t calibration_seed_base = 0x5DEECE66Dull;

}  // namespace

BitSituation make_situation(Choice alice, Choice bob) {
  if (alice == Choice::L)
    return bob == Choice::L ? BitSituation::LL : BitSituation::LH;
  return bob == Choice::L ? BitSituation::HL : BitSituation::HH;
}

Choice alice_of(BitSituation s) {
  return (s == BitSituation::LL || s == BitSituation::LH) ? Choice::L
                                                          : Choice::H;
}

Choice bob_of(BitSituation s) {
  return (s == BitSituation::LL || s == BitSituation::HL) ? Choice::L
                                                          : Choice::H;
}

const char* to_string(BitSituation s) {
  switch (s) {
    case BitSituation::LL: return "LL";
    case BitSituation::LH: return "LH";
    case BitSituation::HL: return "HL";
    case BitSituation::HH: return "HH";
  }
  return "??";
}

char to_char(Choice c) { return c == Choice::L ? 'L' : 'H'; }

BitSituation mirrored(BitSituation s) {
  switch (s) {
    case BitSituation::LH: return BitSituation::HL;
    case BitSituation::HL: return BitSituation::LH;
    default: return s;
  }
}

void TruthTable::validate() const {
  if (!((lh == 0 && hl == 1) || (lh == 1 && hl == 0)))
    throw config_error(
        "protocol.truth_table must map {LH, HL} onto {0, 1} bijectively");
}

std::optional<int> extract_bit(BitSituation s, const TruthTable& table) {
  if (s == BitSituation::LH) return table.lh;
  if (s == BitSituation::HL) return table.hl;
  return std::nullopt;
}

void ProtocolConfig::validate() const {
  if (bep_duration_s <= 0.0)
    throw config_error("protocol.bep_duration_s must be positive");
  if (measurement_rate_hz <= 0.0)
    throw config_error("protocol.measurement_rate_hz must be positive");
  if (guard_fraction < 0.0 || guard_fraction >= 0.5)
    throw config_error("protocol.guard_fraction must lie in [0, 0.5)");
  if (!auto_threshold && threshold_volts_sq <= 0.0)
    throw config_error("protocol.threshold_volts_sq must be positive");
  if (calibration_beps < 100)
    throw config_error("protocol.calibration_beps must be >= 100");
  if (n_bep < 0) throw config_error("protocol.n_bep must be >= 0");
  truth_table.validate();
  if (samples_per_bep() < 2)
    throw config_error(
        "protocol.bep_duration_s too short: fewer than 2 measurement samples");
}

std::int64_t ProtocolConfig::samples_per_bep() const {
  return static_cast<std::int64_t>(
      std::floor(bep_duration_s * measurement_rate_hz));
}

std::pair<Choice, Choice> choose_gains(std::mt19937_64& rng_alice,
                                       std::mt19937_64& rng_bob) {
  const Choice a = (rng_alice() & 1u) ? Choice::H : Choice::L;
  const Choice b = (rng_bob() & 1u) ? Choice::H : Choice::L;
  return {a, b};
}

double estimate_correlation(const circuit::WireTrace& trace,
                            double guard_fraction) {
  const std::int64_t n = static_cast<std::int64_t>(trace.size());
  const std::int64_t n_guard =
      std::llround(static_cast<double>(n) * guard_fraction);
  if (n - n_guard <= 0)
    throw config_error("estimate_correlation: empty averaging window");
  double s = 0.0;
  for (std::int64_t i = n_guard; i < n; ++i) s += trace.v_a[i] * trace.v_b[i];
  return s / static_cast<double>(n - n_guard);
}

BitSituation classify(double correlation, Choice own, double threshold) {
  if (threshold <= 0.0) throw config_error("classify: threshold must be > 0");
  if (own == Choice::L)
    return correlation < -threshold ? BitSituation::LL : BitSituation::LH;
  return correlation > threshold ? BitSituation::HH : BitSituation::HL;
}

namespace {

circuit::GainPair gains_for(BitSituation s, double magnitude) {
  const double a = alice_of(s) == Choice::L ? -magnitude : magnitude;
  const double b = bob_of(s) == Choice::L ? -magnitude : magnitude;
  return {a, b};
}

// Correlation estimates of a session pinned to one situation, using noise
// seeds independent of every caller-visible seed.
std::vector<double> pinned_estimates(const circuit::CircuitParams& cp,
                                     const noise::NoiseSpec& ns,
                                     const ProtocolConfig& pc,
                                     int calibration_beps, BitSituation pin,
                                     std::uint64_t seed1,
                                     std::uint64_t seed2) {
  noise::NoiseSpec s1 = ns, s2 = ns;
  s1.seed = seed1;
  s2.seed = seed2;
  noise::NoiseSource src1(s1), src2(s2);
  circuit::Simulator sim(cp, pc.measurement_rate_hz);
  circuit::CircuitState st =
      sim.initial_state(gains_for(pin, cp.gain_magnitude));
  const std::int64_t p = pc.samples_per_bep();
  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(calibration_beps));
  for (int i = 0; i < calibration_beps; ++i) {
    circuit::WireTrace dec;
    sim.run_periods(st, src1, src2, p, &dec, nullptr);
    estimates.push_back(estimate_correlation(dec, pc.guard_fraction));
  }
  return estimates;
}

std::string threshold_cache_key(const circuit::CircuitParams& cp,
                                const noise::NoiseSpec& ns,
                                const ProtocolConfig& pc,
                                int calibration_beps) {
  char buf[360];
  std::snprintf(buf, sizeof buf,
                "%.17g|%.17g|%.17g|%d|%d|%.17g|%.17g|%d|%.17g|%.17g|%.17g|%d",
                cp.gain_magnitude, cp.amp_time_constant_s,
                cp.saturation_volts, cp.internal_oversample,
                static_cast<int>(cp.switching.kind),
                cp.switching.ramp_duration_s, ns.sample_rate_hz,
                ns.filter_order, ns.cutoff_hz, ns.target_rms_volts,
                pc.guard_fraction, calibration_beps);
  char buf2[64];
  std::snprintf(buf2, sizeof buf2, "|%lld",
                static_cast<long long>(pc.samples_per_bep()));
  return std::string(buf) + buf2;
}

}  // namespace

double auto_threshold(const circuit::CircuitParams& circuit_params,
                      const noise::NoiseSpec& noise_spec,
                      const ProtocolConfig& protocol_config,
                      int calibration_beps) {
  if (calibration_beps < 100)
    throw config_error("auto_threshold: calibration_beps must be >= 100");
  static std::map<std::string, double> cache;
  static std::mutex mtx;
  const std::string key = threshold_cache_key(circuit_params, noise_spec,
                                              protocol_config,
                                              calibration_beps);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const auto lh = pinned_estimates(circuit_params, noise_spec, protocol_config,
                                   calibration_beps, BitSituation::LH,
                                   calibration_seed_base + 6,
                                   calibration_seed_base + 7);
  const auto ll = pinned_estimates(circuit_params, noise_spec, protocol_config,
                                   calibration_beps, BitSituation::LL,
                                   calibration_seed_base + 8,
                                   calibration_seed_base + 9);
  const auto hh = pinned_estimates(circuit_params, noise_spec, protocol_config,
                                   calibration_beps, BitSituation::HH,
                                   calibration_seed_base + 10,
                                   calibration_seed_base + 11);
  double min_saturated = std::numeric_limits<double>::infinity();
  for (double e : ll) min_saturated = std::min(min_saturated, std::fabs(e));
  for (double e : hh) min_saturated = std::min(min_saturated, std::fabs(e));
  for (double e : lh) {
    if (std::fabs(e) > 0.5 * min_saturated)
      throw config_error(
          "auto_threshold: calibration failure, LH estimates overlap the "
          "saturated LL/HH band");
  }
  const double threshold = 6.0 * stats::stddev(lh);
  if (!(threshold > 0.0))
    throw config_error("auto_threshold: calibration produced a zero spread");
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(key, threshold);
  return threshold;
}

KeySession run_session(const ProtocolConfig& protocol_config,
                       const circuit::CircuitParams& circuit_params,
                       const noise::NoiseSpec& noise1,
                       const noise::NoiseSpec& noise2,
                       int window_samples) {
  protocol_config.validate();
  noise1.validate();
  noise2.validate();
  circuit_params.validate(protocol_config.measurement_rate_hz,
                          noise1.cutoff_hz);
  if (noise1.sample_rate_hz != protocol_config.measurement_rate_hz ||
      noise2.sample_rate_hz != protocol_config.measurement_rate_hz)
    throw config_error(
        "noise.sample_rate_hz must equal protocol.measurement_rate_hz");
  if (window_samples < 1)
    throw config_error("run_session: window_samples must be >= 1");

  KeySession session;
  session.config = protocol_config;
  session.threshold_volts_sq =
      protocol_config.auto_threshold
          ? auto_threshold(circuit_params, noise1, protocol_config,
                           protocol_config.calibration_beps)
          : protocol_config.threshold_volts_sq;

  noise::NoiseSource src1(noise1), src2(noise2);
  std::mt19937_64 rng_alice(protocol_config.alice_seed);
  std::mt19937_64 rng_bob(protocol_config.bob_seed);
  circuit::Simulator sim(circuit_params, protocol_config.measurement_rate_hz);
  circuit::CircuitState state = sim.initial_state({0.0, 0.0});

  const std::int64_t p = protocol_config.samples_per_bep();
  const std::int64_t n_bep = protocol_config.n_bep;
  session.records.reserve(static_cast<std::size_t>(n_bep));
  session.windows.reserve(static_cast<std::size_t>(n_bep));

  BitSituation previous = BitSituation::LL;
  for (std::int64_t i = 0; i < n_bep; ++i) {
    const auto [ca, cb] = choose_gains(rng_alice, rng_bob);
    const BitSituation truth = make_situation(ca, cb);

    circuit::WireTrace window;
    window.decimated = false;
    window.sample_period_s = sim.dt();
    window.start_time_s = state.time_s;
    window.push(state.v_a(), state.v_b());

    if (i == 0) {
      state.gains = gains_for(truth, circuit_params.gain_magnitude);
    } else {
      sim.begin_switch(state, gains_for(truth, circuit_params.gain_magnitude));
    }

    circuit::WireTrace dec;
    sim.run_periods(state, src1, src2, p, &dec, &window, window_samples);

    BEPRecord rec;
    rec.index = i;
    rec.alice_choice = ca;
    rec.bob_choice = cb;
    rec.correlation_estimate =
        estimate_correlation(dec, protocol_config.guard_fraction);
    rec.alice_inferred =
        classify(rec.correlation_estimate, ca, session.threshold_volts_sq);
    rec.bob_inferred = mirrored(
        classify(rec.correlation_estimate, cb, session.threshold_volts_sq));
    rec.secure = is_secure(truth);
    if (i > 0) rec.transition_from_previous = std::make_pair(previous, truth);

    const auto alice_bit =
        extract_bit(rec.alice_inferred, protocol_config.truth_table);
    const auto bob_bit =
        extract_bit(rec.bob_inferred, protocol_config.truth_table);
    if (rec.secure && rec.alice_inferred == truth && rec.bob_inferred == truth)
      rec.bit = extract_bit(truth, protocol_config.truth_table);

    if (alice_bit) session.alice_key.push_back(char('0' + *alice_bit));
    if (bob_bit) session.bob_key.push_back(char('0' + *bob_bit));
    if (alice_bit.has_value() != bob_bit.has_value() ||
        (alice_bit && bob_bit && *alice_bit != *bob_bit))
      ++session.summary.bit_errors;
    if (rec.alice_inferred != rec.bob_inferred) ++session.summary.disagreements;

    ++session.summary.situation_counts[static_cast<int>(truth)];
    if (rec.secure) ++session.summary.n_secure;
    session.records.push_back(rec);
    session.windows.push_back(std::move(window));
    previous = truth;
  }
  session.summary.n_bep = n_bep;
  session.summary.secure_yield =
      n_bep > 0 ? static_cast<double>(session.summary.n_secure) /
                      static_cast<double>(n_bep)
                : 0.0;
  return session;
}

}  // namespace ckx::protocol
