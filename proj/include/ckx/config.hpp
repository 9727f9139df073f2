#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckx/attack.hpp"
#include "ckx/circuit.hpp"
#include "ckx/noise.hpp"
#include "ckx/protocol.hpp"

namespace ckx::config {

// Per-role seed offsets applied to the master seed; changing one role's
// randomness never perturbs another's.
inline constexpr std::uint64_t seed_offset_noise1 = 1;
inline constexpr std::uint64_t seed_offset_noise2 = 2;
inline constexpr std::uint64_t seed_offset_alice = 3;
inline constexpr std::uint64_t seed_offset_bob = 4;
inline constexpr std::uint64_t seed_offset_eve = 5;

struct AttackSettings {
  attack::AttackParams params{};
  double rail_spacing_factor = 0.5;  // rail patch spacing in steady-RMS units
};

struct RunConfig {
  noise::NoiseSpec noise{};  // seed fields are derived from master_seed
  circuit::CircuitParams circuit{};
  protocol::ProtocolConfig protocol{};
  AttackSettings attack{};
  std::string output_dir = "out";
  std::uint64_t master_seed = 1;

  // Overwrites every per-role seed with master_seed + its fixed offset.
  void apply_seeds();

  // Throws config_error naming the offending field; returns soft warnings.
  std::vector<std::string> validate() const;

  noise::NoiseSpec noise1_spec() const;
  noise::NoiseSpec noise2_spec() const;
};

RunConfig default_config();

// Strict parse: every present key must be a known field name; absent keys
// keep their defaults. protocol.threshold_volts_sq accepts a positive number
// or the string "auto".
RunConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

// Full reproduction record: tool version, invoked command, resolved config
// (derived seeds included).
nlohmann::json manifest(const RunConfig& c, const std::string& command);
void write_manifest(const RunConfig& c, const std::string& command,
                    const std::string& path);

}  // namespace ckx::config
