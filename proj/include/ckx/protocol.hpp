#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ckx/circuit.hpp"
#include "ckx/noise.hpp"

namespace ckx::protocol {

enum class Choice { L, H };

// First letter Alice, second letter Bob.
enum class BitSituation { LL, LH, HL, HH };

BitSituation make_situation(Choice alice, Choice bob);
Choice alice_of(BitSituation s);
Choice bob_of(BitSituation s);
const char* to_string(BitSituation s);
char to_char(Choice c);
inline bool is_secure(BitSituation s) {
  return s == BitSituation::LH || s == BitSituation::HL;
}

// Party swap: LH <-> HL, LL and HH fixed.
BitSituation mirrored(BitSituation s);

// Public mapping of the two secure situations to bit values.
struct TruthTable {
  int lh = 0;
  int hl = 1;

  void validate() const;  // must be a bijection onto {0,1}
};

// LH / HL carry a bit; LL / HH are discarded.
std::optional<int> extract_bit(BitSituation s, const TruthTable& table);

struct ProtocolConfig {
  double bep_duration_s = 1.25e-3;
  double measurement_rate_hz = 250000.0;
  double guard_fraction = 0.1;
  bool auto_threshold = true;
  double threshold_volts_sq = 0.0;  // used when auto_threshold is false
  int calibration_beps = 200;
  TruthTable truth_table{};
  std::int64_t n_bep = 1000;
  std::uint64_t alice_seed = 0;
  std::uint64_t bob_seed = 0;

  void validate() const;
  std::int64_t samples_per_bep() const;  // floor(duration * rate)
};

struct BEPRecord {
  std::int64_t index = 0;
  Choice alice_choice = Choice::L;
  Choice bob_choice = Choice::L;
  double correlation_estimate = 0.0;  // V^2
  BitSituation alice_inferred = BitSituation::LL;
  BitSituation bob_inferred = BitSituation::LL;  // already in Alice-first order
  bool secure = false;
  std::optional<int> bit;  // present iff secure and both sides classified right
  std::optional<std::pair<BitSituation, BitSituation>> transition_from_previous;
};

struct SessionSummary {
  std::int64_t n_bep = 0;
  std::int64_t n_secure = 0;
  double secure_yield = 0.0;
  std::int64_t disagreements = 0;  // alice_inferred != bob_inferred
  std::int64_t bit_errors = 0;     // index-aligned kept-bit mismatches
  std::array<std::int64_t, 4> situation_counts{};  // LL, LH, HL, HH
};

struct KeySession {
  ProtocolConfig config;
  double threshold_volts_sq = 0.0;  // resolved value actually used
  std::vector<BEPRecord> records;
  std::string alice_key;  // '0'/'1' characters, Alice's kept bits in order
  std::string bob_key;
  SessionSummary summary;
  // Entry window into each BEP at full internal rate; windows[i].v_a[0] is
  // the wire state at the boundary where BEP i's gains were applied.
  std::vector<circuit::WireTrace> windows;
};

// One uniform {L,H} draw per party from independent seeded streams.
std::pair<Choice, Choice> choose_gains(std::mt19937_64& rng_alice,
                                       std::mt19937_64& rng_bob);

// Mean of v_a * v_b over the trailing (1 - guard_fraction) of a
// measurement-rate BEP trace.
double estimate_correlation(const circuit::WireTrace& trace,
                            double guard_fraction);

// Two-candidate decision from one party's view; the returned situation is in
// own-first letter order (the caller's own choice is the first letter).
BitSituation classify(double correlation, Choice own, double threshold);

// 6x the empirical std of the LH correlation estimator, measured on
// calibration sessions with fixed internal seeds. Fails if the LH estimates
// overlap half the smallest saturated LL/HH magnitude.
double auto_threshold(const circuit::CircuitParams& circuit_params,
                      const noise::NoiseSpec& noise_spec,
                      const ProtocolConfig& protocol_config,
                      int calibration_beps);

// Full session: per-BEP gain choice, switch at the boundary, simulate,
// estimate, classify from both sides, extract bits, archive entry windows.
KeySession run_session(const ProtocolConfig& protocol_config,
                       const circuit::CircuitParams& circuit_params,
                       const noise::NoiseSpec& noise1,
                       const noise::NoiseSpec& noise2,
                       int window_samples = 16);

}  // namespace ckx::protocol
