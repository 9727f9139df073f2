#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckx/attack.hpp"
#include "ckx/circuit.hpp"
#include "ckx/protocol.hpp"

namespace ckx::session_io {

// Header `index,alice_choice,bob_choice,correlation_v2,secure,bit,
// alice_inferred,bob_inferred`; the bit column is empty on discarded rounds.
void write_session_csv(const protocol::KeySession& s, std::ostream& os);

// Inverse of write_session_csv, recovering the per-round records (enough
// ground truth to score an attack); throws config_error on malformed input.
protocol::KeySession read_session_csv(std::istream& is);

// One '0'/'1' character per kept bit, trailing newline.
void write_key(const std::string& key, const std::string& path);

void write_summary(const protocol::KeySession& s, std::ostream& os);

// Compact binary archive of the per-round entry windows plus the round
// correlations and the resolved threshold; everything the attack needs
// without re-simulating.
void write_windows(const protocol::KeySession& s, std::uint64_t fingerprint,
                   const std::string& path);

struct WindowsFile {
  std::uint64_t fingerprint = 0;
  double threshold_volts_sq = 0.0;
  std::vector<double> correlations;
  std::vector<circuit::WireTrace> windows;
};

WindowsFile load_windows(const std::string& path);

void write_attack_report(const attack::AttackReport& r, std::ostream& os);

// Header `index,from,to,distance,matched,abstained,bit_guess`.
void write_attack_guesses_csv(const attack::AttackReport& r, std::ostream& os);

// 16x16 counts over consecutive situation pairs, `true_pair` rows against
// guessed-pair columns.
void write_confusion_csv(const attack::AttackReport& r, std::ostream& os);

// Writes session.csv, alice_key.txt, bob_key.txt, summary.txt, windows.bin
// and transitions/transition_<index>.csv under dir (created if needed).
void save_session(const protocol::KeySession& s, std::uint64_t fingerprint,
                  const std::string& dir);

}  // namespace ckx::session_io
