#include "ckx/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "ckx/errors.hpp"
#include "ckx/version.hpp"

namespace ckx::config {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw config_error(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known)
      throw config_error("unknown key \"" + item.key() + "\" in " + where);
  }
}

template <typename T>
void read_field(const json& j, const char* name, const std::string& where,
                T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const json::exception&) {
    throw config_error(where + "." + name + " has the wrong type");
  }
}

void read_noise(const json& j, noise::NoiseSpec& s) {
  const std::string where = "noise";
  check_keys(j, where,
             {"sample_rate_hz", "cutoff_hz", "filter_order",
              "target_rms_volts", "seed"});
  read_field(j, "sample_rate_hz", where, s.sample_rate_hz);
  read_field(j, "cutoff_hz", where, s.cutoff_hz);
  read_field(j, "filter_order", where, s.filter_order);
  read_field(j, "target_rms_volts", where, s.target_rms_volts);
  read_field(j, "seed", where, s.seed);
}

void read_switching(const json& j, circuit::SwitchingProfile& p) {
  const std::string where = "circuit.switching";
  check_keys(j, where, {"kind", "ramp_duration_s"});
  if (j.contains("kind")) {
    std::string kind;
    read_field(j, "kind", where, kind);
    if (kind == "step")
      p.kind = circuit::ProfileKind::step;
    else if (kind == "ramp")
      p.kind = circuit::ProfileKind::ramp;
    else
      throw config_error(where + ".kind must be \"step\" or \"ramp\"");
  }
  read_field(j, "ramp_duration_s", where, p.ramp_duration_s);
}

void read_circuit(const json& j, circuit::CircuitParams& p) {
  const std::string where = "circuit";
  check_keys(j, where,
             {"gain_magnitude", "amp_time_constant_s", "saturation_volts",
              "internal_oversample", "switching"});
  read_field(j, "gain_magnitude", where, p.gain_magnitude);
  read_field(j, "amp_time_constant_s", where, p.amp_time_constant_s);
  read_field(j, "saturation_volts", where, p.saturation_volts);
  read_field(j, "internal_oversample", where, p.internal_oversample);
  if (j.contains("switching")) read_switching(j.at("switching"), p.switching);
}

void read_truth_table(const json& j, protocol::TruthTable& t) {
  const std::string where = "protocol.truth_table";
  check_keys(j, where, {"lh", "hl"});
  read_field(j, "lh", where, t.lh);
  read_field(j, "hl", where, t.hl);
}

void read_protocol(const json& j, protocol::ProtocolConfig& p) {
  const std::string where = "protocol";
  check_keys(j, where,
             {"bep_duration_s", "measurement_rate_hz", "guard_fraction",
              "threshold_volts_sq", "calibration_beps", "truth_table", "n_bep",
              "alice_seed", "bob_seed"});
  read_field(j, "bep_duration_s", where, p.bep_duration_s);
  read_field(j, "measurement_rate_hz", where, p.measurement_rate_hz);
  read_field(j, "guard_fraction", where, p.guard_fraction);
  if (j.contains("threshold_volts_sq")) {
    const json& v = j.at("threshold_volts_sq");
    if (v.is_string()) {
      if (v.get<std::string>() != "auto")
        throw config_error(
            "protocol.threshold_volts_sq must be a number or \"auto\"");
      p.auto_threshold = true;
      p.threshold_volts_sq = 0.0;
    } else if (v.is_number()) {
      p.auto_threshold = false;
      p.threshold_volts_sq = v.get<double>();
    } else {
      throw config_error(
          "protocol.threshold_volts_sq must be a number or \"auto\"");
    }
  }
  read_field(j, "calibration_beps", where, p.calibration_beps);
  if (j.contains("truth_table")) read_truth_table(j.at("truth_table"), p.truth_table);
  read_field(j, "n_bep", where, p.n_bep);
  read_field(j, "alice_seed", where, p.alice_seed);
  read_field(j, "bob_seed", where, p.bob_seed);
}

void read_attack(const json& j, AttackSettings& a) {
  const std::string where = "attack";
  check_keys(j, where,
             {"k_samples", "eve_decimation", "abstention_factor",
              "rail_spacing_factor", "eve_seed"});
  read_field(j, "k_samples", where, a.params.k_samples);
  read_field(j, "eve_decimation", where, a.params.eve_decimation);
  read_field(j, "abstention_factor", where, a.params.abstention_factor);
  read_field(j, "rail_spacing_factor", where, a.rail_spacing_factor);
  read_field(j, "eve_seed", where, a.params.eve_seed);
}

}  // namespace

void RunConfig::apply_seeds() {
  noise.seed = master_seed + seed_offset_noise1;
  protocol.alice_seed = master_seed + seed_offset_alice;
  protocol.bob_seed = master_seed + seed_offset_bob;
  attack.params.eve_seed = master_seed + seed_offset_eve;
}

noise::NoiseSpec RunConfig::noise1_spec() const {
  noise::NoiseSpec s = noise;
  s.seed = master_seed + seed_offset_noise1;
  return s;
}

noise::NoiseSpec RunConfig::noise2_spec() const {
  noise::NoiseSpec s = noise;
  s.seed = master_seed + seed_offset_noise2;
  return s;
}

std::vector<std::string> RunConfig::validate() const {
  noise.validate();
  auto warnings = circuit.validate(noise.sample_rate_hz, noise.cutoff_hz);
  protocol.validate();
  if (protocol.measurement_rate_hz != noise.sample_rate_hz)
    throw config_error(
        "protocol.measurement_rate_hz must equal noise.sample_rate_hz");
  if (attack.params.k_samples < 2)
    throw config_error("attack.k_samples must be >= 2");
  if (attack.params.eve_decimation < 1)
    throw config_error("attack.eve_decimation must be >= 1");
  if (attack.params.abstention_factor <= 0.0)
    throw config_error("attack.abstention_factor must be > 0");
  if (attack.rail_spacing_factor <= 0.0)
    throw config_error("attack.rail_spacing_factor must be > 0");
  if (output_dir.empty())
    throw config_error("output_dir must not be empty");
  return warnings;
}

RunConfig default_config() {
  RunConfig c;
  c.apply_seeds();
  return c;
}

RunConfig from_json(const nlohmann::json& j) {
  check_keys(j, "config",
             {"noise", "circuit", "protocol", "attack", "output_dir",
              "master_seed"});
  RunConfig c;
  read_field(j, "master_seed", "config", c.master_seed);
  read_field(j, "output_dir", "config", c.output_dir);
  if (j.contains("noise")) read_noise(j.at("noise"), c.noise);
  if (j.contains("circuit")) read_circuit(j.at("circuit"), c.circuit);
  if (j.contains("protocol")) read_protocol(j.at("protocol"), c.protocol);
  if (j.contains("attack")) read_attack(j.at("attack"), c.attack);
  c.apply_seeds();
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["noise"] = {{"sample_rate_hz", c.noise.sample_rate_hz},
                {"cutoff_hz", c.noise.cutoff_hz},
                {"filter_order", c.noise.filter_order},
                {"target_rms_volts", c.noise.target_rms_volts},
                {"seed", c.noise.seed}};
  j["circuit"] = {
      {"gain_magnitude", c.circuit.gain_magnitude},
      {"amp_time_constant_s", c.circuit.amp_time_constant_s},
      {"saturation_volts", c.circuit.saturation_volts},
      {"internal_oversample", c.circuit.internal_oversample},
      {"switching",
       {{"kind", c.circuit.switching.kind == circuit::ProfileKind::step
                     ? "step"
                     : "ramp"},
        {"ramp_duration_s", c.circuit.switching.ramp_duration_s}}}};
  nlohmann::json p;
  p["bep_duration_s"] = c.protocol.bep_duration_s;
  p["measurement_rate_hz"] = c.protocol.measurement_rate_hz;
  p["guard_fraction"] = c.protocol.guard_fraction;
  if (c.protocol.auto_threshold)
    p["threshold_volts_sq"] = "auto";
  else
    p["threshold_volts_sq"] = c.protocol.threshold_volts_sq;
  p["calibration_beps"] = c.protocol.calibration_beps;
  p["truth_table"] = {{"lh", c.protocol.truth_table.lh},
                      {"hl", c.protocol.truth_table.hl}};
  p["n_bep"] = c.protocol.n_bep;
  p["alice_seed"] = c.protocol.alice_seed;
  p["bob_seed"] = c.protocol.bob_seed;
  j["protocol"] = p;
  j["attack"] = {{"k_samples", c.attack.params.k_samples},
                 {"eve_decimation", c.attack.params.eve_decimation},
                 {"abstention_factor", c.attack.params.abstention_factor},
                 {"rail_spacing_factor", c.attack.rail_spacing_factor},
                 {"eve_seed", c.attack.params.eve_seed}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file is not valid JSON: " +
                       std::string(e.what()));
  }
  // A manifest is accepted wherever a config is: reruns reproduce the run.
  if (j.is_object() && j.contains("version") && j.contains("config"))
    return from_json(j.at("config"));
  return from_json(j);
}

nlohmann::json manifest(const RunConfig& c, const std::string& command) {
  nlohmann::json m;
  m["version"] = version_string;
  m["command"] = command;
  m["config"] = to_json(c);
  return m;
}

void write_manifest(const RunConfig& c, const std::string& command,
                    const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw config_error("cannot write manifest: " + path);
  f << manifest(c, command).dump(2) << "\n";
}

}  // namespace ckx::config
