#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ckx/acceptance.hpp"
#include "ckx/attack.hpp"
#include "ckx/config.hpp"
#include "ckx/errors.hpp"
#include "ckx/protocol.hpp"
#include "ckx/session_io.hpp"
#include "ckx/theory.hpp"
#include "ckx/version.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t master_seed = 0;
  CLI::Option* config_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  c.config_opt = sub->add_option("--config", c.config_path,
                                 "JSON config or manifest file");
  c.seed_opt =
      sub->add_option("--seed", c.master_seed, "master seed override");
  c.out_opt = sub->add_option("--out", c.out_dir, "output directory");
}

ckx::config::RunConfig resolve_config(const CommonOpts& c) {
  ckx::config::RunConfig cfg = c.config_opt->count() > 0
                                   ? ckx::config::load_config(c.config_path)
                                   : ckx::config::default_config();
  if (c.seed_opt->count() > 0) {
    cfg.master_seed = c.master_seed;
    cfg.apply_seeds();
  }
  if (c.out_opt->count() > 0) cfg.output_dir = c.out_dir;
  return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ckx::config_error("cannot create output directory: " + dir);
}

int cmd_theory(const ckx::config::RunConfig& cfg, double r0, double t_ambient,
               double r_low, double r_high) {
  print_warnings(cfg.validate());
  namespace th = ckx::theory;
  const double mag = cfg.circuit.gain_magnitude;
  const double a_loop = th::loop_amplification(-mag, mag);
  const double bw = cfg.noise.cutoff_hz;
  const double t_eff = th::cold_effective_temperature(t_ambient, a_loop);
  const double r_eff = th::cold_effective_resistance(r0, a_loop);
  std::cout << "# boltzmann_k_j_per_k=" << g17(th::boltzmann_k) << "\n"
            << "# r0_ohm=" << g17(r0) << " t_ambient_k=" << g17(t_ambient)
            << "\n"
            << "# loop_amplification=" << g17(a_loop) << "\n"
            << "# cold_r_eff_ohm=" << g17(r_eff) << "\n"
            << "# cold_t_eff_k=" << g17(t_eff) << "\n"
            << "# johnson_ambient_v2_per_hz="
            << g17(th::johnson_spectrum(t_ambient, r0)) << "\n"
            << "# johnson_cold_v2_per_hz="
            << g17(th::johnson_spectrum(t_eff, r_eff)) << "\n"
            << "# resistor_pair_low_ohm=" << g17(r_low)
            << " high_ohm=" << g17(r_high) << "\n"
            << "# resistor_pair_parallel_ohm="
            << g17(th::kljn_parallel(r_low, r_high)) << "\n"
            << "# resistor_pair_wire_msq_v2="
            << g17(th::kljn_wire_msq(
                   t_ambient, th::kljn_parallel(r_low, r_high), bw))
            << "\n";
  const double sigma_sq =
      cfg.noise.target_rms_volts * cfg.noise.target_rms_volts;
  std::cout << "situation,a1,a2,msq_a_v2,msq_b_v2,cross_v2,cross_sign,"
               "latching\n";
  for (int i = 0; i < 4; ++i) {
    const auto s = static_cast<ckx::protocol::BitSituation>(i);
    const double a1 =
        ckx::protocol::alice_of(s) == ckx::protocol::Choice::L ? -mag : mag;
    const double a2 =
        ckx::protocol::bob_of(s) == ckx::protocol::Choice::L ? -mag : mag;
    const auto m = th::steady_moments(a1, a2, sigma_sq);
    const auto sign = th::expected_sign(a1, a2);
    const char* sign_s = sign == th::Sign::negative
                             ? "negative"
                             : (sign == th::Sign::zero ? "zero" : "positive");
    std::cout << ckx::protocol::to_string(s) << ',' << g17(a1) << ','
              << g17(a2) << ',' << g17(m.msq_a) << ',' << g17(m.msq_b) << ','
              << g17(m.cross) << ',' << sign_s << ','
              << (m.unreachable ? 1 : 0) << "\n";
  }
  return 0;
}

int cmd_simulate(const ckx::config::RunConfig& cfg) {
  print_warnings(cfg.validate());
  make_out_dir(cfg.output_dir);
  ckx::config::write_manifest(cfg, "simulate",
                              cfg.output_dir + "/manifest.json");
  const auto session = ckx::protocol::run_session(
      cfg.protocol, cfg.circuit, cfg.noise1_spec(), cfg.noise2_spec(),
      cfg.attack.params.k_samples);
  const auto fp = ckx::attack::circuit_fingerprint(cfg.circuit,
                                                   cfg.noise.sample_rate_hz);
  ckx::session_io::save_session(session, fp, cfg.output_dir);
  ckx::session_io::write_summary(session, std::cout);
  std::cout << "artifacts: " << cfg.output_dir << "\n";
  return 0;
}

int cmd_build_db(const ckx::config::RunConfig& cfg, bool export_csv) {
  print_warnings(cfg.validate());
  make_out_dir(cfg.output_dir);
  ckx::config::write_manifest(cfg, "build-db",
                              cfg.output_dir + "/manifest.json");
  const auto grid = ckx::attack::default_grid(cfg.circuit, cfg.noise,
                                              cfg.attack.rail_spacing_factor);
  const auto db = ckx::attack::build_database(cfg.circuit,
                                              cfg.noise.sample_rate_hz, grid,
                                              cfg.attack.params.k_samples);
  const std::string path = cfg.output_dir + "/db.ckdb";
  ckx::attack::save_database(db, path);
  if (export_csv) {
    std::ofstream f(cfg.output_dir + "/db.csv", std::ios::trunc);
    if (!f)
      throw ckx::config_error("cannot write file: " + cfg.output_dir +
                              "/db.csv");
    ckx::attack::export_database_csv(db, f);
  }
  std::cout << "templates: " << db.total_templates() << "\n"
            << "window_samples: " << db.k_samples << "\n"
            << "fingerprint: " << db.fingerprint << "\n"
            << "database: " << path << "\n";
  return 0;
}

int cmd_attack(const ckx::config::RunConfig& cfg, std::string session_dir,
               std::string db_path) {
  print_warnings(cfg.validate());
  if (session_dir.empty()) session_dir = cfg.output_dir;
  if (db_path.empty()) db_path = session_dir + "/db.ckdb";
  const auto wf = ckx::session_io::load_windows(session_dir + "/windows.bin");
  const auto expected = ckx::attack::circuit_fingerprint(
      cfg.circuit, cfg.noise.sample_rate_hz);
  if (wf.fingerprint != expected)
    throw ckx::fingerprint_mismatch(
        "session windows were produced by different circuit parameters");
  const auto db = ckx::attack::load_database(db_path);
  auto report = ckx::attack::transient_attack(
      wf.windows, wf.correlations, wf.threshold_volts_sq,
      cfg.protocol.truth_table, db, cfg.attack.params, expected);

  bool scored = false;
  const std::string session_csv = session_dir + "/session.csv";
  if (fs::exists(session_csv)) {
    std::ifstream f(session_csv);
    const auto truth = ckx::session_io::read_session_csv(f);
    ckx::attack::evaluate_against(report, truth);
    scored = true;
  }
  make_out_dir(cfg.output_dir);
  {
    std::ofstream f(cfg.output_dir + "/attack_report.txt", std::ios::trunc);
    ckx::session_io::write_attack_report(report, f);
  }
  {
    std::ofstream f(cfg.output_dir + "/attack_guesses.csv", std::ios::trunc);
    ckx::session_io::write_attack_guesses_csv(report, f);
  }
  if (scored) {
    std::ofstream f(cfg.output_dir + "/confusion.csv", std::ios::trunc);
    ckx::session_io::write_confusion_csv(report, f);
  }
  ckx::session_io::write_attack_report(report, std::cout);
  if (!scored)
    std::cout << "note: no session.csv ground truth found; bit accuracy "
                 "fields are zero\n";
  return 0;
}

int cmd_attack_steady(const ckx::config::RunConfig& cfg,
                      std::string session_dir) {
  print_warnings(cfg.validate());
  if (session_dir.empty()) session_dir = cfg.output_dir;
  std::ifstream f(session_dir + "/session.csv");
  if (!f)
    throw ckx::config_error("cannot open session csv: " + session_dir +
                            "/session.csv");
  const auto truth = ckx::session_io::read_session_csv(f);
  const auto wf = ckx::session_io::load_windows(session_dir + "/windows.bin");
  const auto guesses = ckx::attack::steady_eve(
      truth.records, wf.threshold_volts_sq, cfg.attack.params.eve_seed);
  const auto s = ckx::attack::evaluate_steady(guesses, truth);
  make_out_dir(cfg.output_dir);
  std::ofstream out(cfg.output_dir + "/steady_report.txt", std::ios::trunc);
  for (std::ostream* os : {static_cast<std::ostream*>(&out),
                           static_cast<std::ostream*>(&std::cout)}) {
    *os << "mode: steady\n"
        << "evaluated_bits: " << s.n << "\n"
        << "correct_bits: " << s.correct << "\n"
        << "accuracy: " << g17(s.accuracy) << "\n"
        << "wilson95_low: " << g17(s.wilson95.lo) << "\n"
        << "wilson95_high: " << g17(s.wilson95.hi) << "\n"
        << "p_value_vs_half: " << g17(s.p_value_vs_half) << "\n";
  }
  return 0;
}

int cmd_validate(const ckx::config::RunConfig& cfg,
                 const std::string& self_path) {
  print_warnings(cfg.validate());
  ckx::acceptance::Options opt;
  opt.cli_path = self_path;
  opt.work_dir = cfg.output_dir + "/acceptance";
  make_out_dir(cfg.output_dir);
  const auto results = ckx::acceptance::run_all(opt, std::cout);
  {
    std::ofstream f(cfg.output_dir + "/acceptance_results.csv",
                    std::ios::trunc);
    f << "id,name,pass,seconds,detail\n";
    for (const auto& r : results)
      f << r.id << ',' << r.name << ',' << (r.pass ? 1 : 0) << ','
        << g17(r.seconds) << ",\"" << r.detail << "\"\n";
  }
  const bool ok = ckx::acceptance::all_pass(results);
  std::cout << (ok ? "ALL CRITERIA PASS" : "CRITERIA FAILED") << "\n";
  return ok ? 0 : 1;
}

std::string self_binary(const char* argv0) {
  std::error_code ec;
  const auto p = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) return p.string();
  return argv0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and analysis toolkit for a cold-resistor key "
               "exchange line"};
  app.set_version_flag("--version", ckx::version_string);
  app.require_subcommand(1);

  CommonOpts c_theory, c_sim, c_db, c_attack, c_validate;
  double r0 = 1000.0, t_ambient = 300.0, r_low = 100.0, r_high = 500.0;
  bool export_csv = false;
  std::string session_dir, db_path;

  auto* sub_theory = app.add_subcommand(
      "theory", "print closed-form steady-state and noise quantities");
  add_common(sub_theory, c_theory);
  sub_theory->add_option("--r0", r0, "series resistance, ohm");
  sub_theory->add_option("--t-ambient", t_ambient, "ambient temperature, K");
  sub_theory->add_option("--r-low", r_low,
                         "low resistor of the resistor-pair scheme, ohm");
  sub_theory->add_option("--r-high", r_high,
                         "high resistor of the resistor-pair scheme, ohm");

  auto* sub_sim = app.add_subcommand(
      "simulate", "run a key exchange session and archive its artifacts");
  add_common(sub_sim, c_sim);
  std::int64_t beps = 0;
  auto* beps_opt =
      sub_sim->add_option("--beps", beps, "number of bit exchange periods");

  auto* sub_db = app.add_subcommand(
      "build-db", "precompute the switching-transient template database");
  add_common(sub_db, c_db);
  sub_db->add_flag("--export-csv", export_csv,
                   "also write the templates as CSV");

  auto* sub_attack = app.add_subcommand(
      "attack", "run the template attack on archived session windows");
  add_common(sub_attack, c_attack);
  sub_attack->add_option("--session", session_dir,
                         "session directory (default: the output directory)");
  sub_attack->add_option("--db", db_path,
                         "database path (default: <session>/db.ckdb)");
  std::string attack_mode = "transient";
  sub_attack
      ->add_option("--mode", attack_mode,
                   "transient (template matching) or steady (correlation "
                   "thresholding only)")
      ->check(CLI::IsMember({"transient", "steady"}));

  auto* sub_validate = app.add_subcommand(
      "validate", "run the full release criteria suite");
  add_common(sub_validate, c_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sub_theory))
      return cmd_theory(resolve_config(c_theory), r0, t_ambient, r_low,
                        r_high);
    if (app.got_subcommand(sub_sim)) {
      auto cfg = resolve_config(c_sim);
      if (beps_opt->count() > 0) cfg.protocol.n_bep = beps;
      return cmd_simulate(cfg);
    }
    if (app.got_subcommand(sub_db))
      return cmd_build_db(resolve_config(c_db), export_csv);
    if (app.got_subcommand(sub_attack)) {
      const auto cfg = resolve_config(c_attack);
      return attack_mode == "steady"
                 ? cmd_attack_steady(cfg, session_dir)
                 : cmd_attack(cfg, session_dir, db_path);
    }
    if (app.got_subcommand(sub_validate))
      return cmd_validate(resolve_config(c_validate), self_binary(argv[0]));
  } catch (const ckx::fingerprint_mismatch& e) {
    std::cerr << "fingerprint mismatch: " << e.what() << "\n";
    return 4;
  } catch (const ckx::simulation_fault& e) {
    std::cerr << "simulation fault: " << e.what() << "\n";
    return 3;
  } catch (const ckx::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ckx::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
