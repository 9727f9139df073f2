#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ckx/circuit.hpp"
#include "ckx/protocol.hpp"
#include "ckx/stats.hpp"

namespace ckx::attack {

using protocol::BitSituation;

// Initial-condition coverage: one fine patch around the origin for entries
// from the zero-centered secure situations, and patches around the four
// saturated rail pairs for entries from LL / HH.
struct GridSpec {
  double secure_half_range_v = 0.0;
  double secure_spacing_v = 0.0;
  double rail_half_range_v = 0.0;
  double rail_spacing_v = 0.0;

  void validate() const;
};

// Grid sized from the steady-state statistics of the configuration:
// secure patch ±3x steady LH wire RMS at 0.1x RMS spacing, rail patches
// ±3x noise RMS at rail_spacing_factor x RMS spacing.
GridSpec default_grid(const circuit::CircuitParams& params,
                      const noise::NoiseSpec& noise_spec,
                      double rail_spacing_factor = 0.5);

struct Patch {
  double a_min = 0.0, b_min = 0.0;
  double spacing = 0.0;
  int na = 0, nb = 0;
  bool triangular = false;  // only ib <= ia stored (mirror-redundant half)

  std::int64_t stored_points() const;
  std::int64_t stored_index(int ia, int ib) const;
  bool contains(double a, double b, double margin) const;
};

struct PatchTemplates {
  Patch patch;
  std::vector<double> data;  // [stored point][sample][wire a, wire b]
};

struct StoredTransition {
  BitSituation from = BitSituation::LL;
  BitSituation to = BitSituation::LL;
  bool flagged_discarded = false;  // LL->HH and HH->LL: kept, never key bits
  std::vector<PatchTemplates> patches;
};

struct TransientDatabase {
  std::uint64_t fingerprint = 0;
  double sample_rate_hz = 0.0;
  int k_samples = 0;
  GridSpec grid;
  std::vector<StoredTransition> stored;  // canonical transitions only

  std::int64_t total_templates() const;
  const StoredTransition* find_stored(BitSituation from, BitSituation to) const;
};

// Hash of every circuit parameter plus the measurement rate; a database only
// answers queries for the exact configuration it was built for.
std::uint64_t circuit_fingerprint(const circuit::CircuitParams& params,
                                  double sample_rate_hz);

// Mirror image of an ordered transition: both endpoints party-swapped.
std::pair<BitSituation, BitSituation> mirrored_transition(
    std::pair<BitSituation, BitSituation> t);

// All twelve ordered pairs of distinct situations.
std::vector<std::pair<BitSituation, BitSituation>> all_transitions();

// One deterministic switching trajectory per (canonical transition, stored
// grid point); the mirror-symmetric half is answered by wire swap.
TransientDatabase build_database(const circuit::CircuitParams& params,
                                 double sample_rate_hz, const GridSpec& grid,
                                 int k_samples);

void save_database(const TransientDatabase& db, const std::string& path);
TransientDatabase load_database(const std::string& path);
void export_database_csv(const TransientDatabase& db, std::ostream& os);

struct MatchResult {
  bool valid = false;
  BitSituation from = BitSituation::LL;
  BitSituation to = BitSituation::LL;
  double distance = 0.0;  // summed squared difference, V^2 * samples
};

// Nearest-template classification of a switch-aligned full-rate window over
// all twelve transitions (mirrored candidates included).
MatchResult match_transient(const circuit::WireTrace& observed,
                            const TransientDatabase& db, int decimation = 1);

struct SteadyGuess {
  std::optional<BitSituation> situation;  // pinned LL / HH by threshold
  std::optional<int> bit;                 // seeded coin flip otherwise
};

// The no-better-than-chance observer: identifies insecure situations by the
// correlation magnitude, guesses secure bits at random.
std::vector<SteadyGuess> steady_eve(
    const std::vector<protocol::BEPRecord>& records, double threshold,
    std::uint64_t eve_seed);

struct AttackParams {
  int k_samples = 16;
  int eve_decimation = 1;        // match every n-th window sample
  double abstention_factor = 10.0;  // ceiling = factor x median distance
  std::uint64_t eve_seed = 5;
};

struct BoundaryGuess {
  std::int64_t index = 0;
  BitSituation from = BitSituation::LL;  // chained previous situation
  BitSituation to = BitSituation::LL;    // inferred situation of this BEP
  double distance = 0.0;
  bool matched = false;    // template matching used (not pinned by threshold)
  bool abstained = false;  // distance above ceiling; bit replaced by a coin
  std::optional<int> bit_guess;
};

struct AttackReport {
  std::vector<BoundaryGuess> guesses;  // one per BEP
  std::int64_t abstentions = 0;
  // Filled by evaluate_against:
  std::int64_t n_evaluated = 0;
  std::int64_t n_correct = 0;
  double accuracy = 0.0;
  stats::Interval wilson95{};
  double p_value_vs_half = 1.0;
  // situation-pair counts indexed 4*from + to, [true][guessed]
  std::array<std::array<std::int64_t, 16>, 16> transition_confusion{};
};

// Template attack over a session's archived entry windows. Boundaries whose
// correlation magnitude exceeds the threshold are pinned to LL / HH; the
// remaining ones are matched against {previous -> LH, previous -> HL,
// previous -> LL, previous -> HH, no change} with the chained previous
// situation, no-change being a synthetic flat-at-initial-point candidate.
AttackReport transient_attack(const std::vector<circuit::WireTrace>& windows,
                              const std::vector<double>& correlations,
                              double threshold,
                              const protocol::TruthTable& table,
                              const TransientDatabase& db,
                              const AttackParams& params,
                              std::uint64_t expected_fingerprint);

struct EvalSummary {
  std::int64_t n = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
  stats::Interval wilson95{};
  double p_value_vs_half = 1.0;
};

// Bitwise scoring of aligned guess / truth vectors.
EvalSummary evaluate(const std::vector<int>& guess_bits,
                     const std::vector<int>& truth_bits);

// Scores a report against the session ground truth over the bits the
// legitimate parties kept; fills the report's summary fields and confusion
// matrix.
EvalSummary evaluate_against(AttackReport& report,
                             const protocol::KeySession& session);

// Same scoring for the steady observer.
EvalSummary evaluate_steady(const std::vector<SteadyGuess>& guesses,
                            const protocol::KeySession& session);

}  // namespace ckx::attack
