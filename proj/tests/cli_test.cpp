#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

const std::string& cli_bin() {
  static const std::string b = CKX_CLI_BIN;
  return b;
}

const fs::path& work_root() {
  static const fs::path p = [] {
    fs::path r = fs::temp_directory_path() / "ckx_cli_tests";
    fs::remove_all(r);
    fs::create_directories(r);
    return r;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string tag = std::to_string(++counter);
  const fs::path out = work_root() / ("stdout_" + tag);
  const fs::path err = work_root() / ("stderr_" + tag);
  const std::string cmd = cli_bin() + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = work_root() / name;
  std::ofstream f(p, std::ios::trunc);
  f << body;
  return p;
}

// Small but complete run: a handful of exchanges, the minimum calibration
// length, and a coarse rail grid so database builds stay quick.
const char* fast_config = R"({
  "protocol": {"n_bep": 8, "calibration_beps": 100},
  "attack": {"rail_spacing_factor": 3.0}
})";

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("version and usage") {
  const auto v = run_cli("--version");
  CHECK(v.code == 0);
  CHECK_FALSE(v.out.empty());

  const auto h = run_cli("--help");
  CHECK(h.code == 0);
  CHECK(contains(h.out, "simulate"));

  CHECK(run_cli("").code == 2);
  CHECK(run_cli("--bogus-flag").code == 2);
  CHECK(run_cli("simulate --no-such-option").code == 2);
}

TEST_CASE("theory output") {
  const auto r = run_cli("theory");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "# loop_amplification=25\n"));
  CHECK(contains(r.out, "# cold_t_eff_k="));
  CHECK(contains(r.out,
                 "situation,a1,a2,msq_a_v2,msq_b_v2,cross_v2,cross_sign,"
                 "latching\n"));
  std::istringstream is(r.out);
  std::string line;
  bool saw_ll = false, saw_lh = false, saw_hh = false;
  while (std::getline(is, line)) {
    if (line.rfind("LL,", 0) == 0) {
      saw_ll = true;
      CHECK(contains(line, ",negative,"));
    }
    if (line.rfind("LH,", 0) == 0) {
      saw_lh = true;
      CHECK(contains(line, ",zero,0"));
    }
    if (line.rfind("HH,", 0) == 0) {
      saw_hh = true;
      CHECK(contains(line, ",positive,1"));
    }
  }
  CHECK(saw_ll);
  CHECK(saw_lh);
  CHECK(saw_hh);

  const auto custom = run_cli("theory --r0 1000 --t-ambient 300 "
                              "--r-low 100 --r-high 500");
  CHECK(custom.code == 0);
  CHECK(contains(custom.out, "# resistor_pair_parallel_ohm=83.33333333333"));
}

TEST_CASE("configuration errors exit with code 2") {
  const auto bad_json = write_config("bad.json", "{ not json");
  CHECK(run_cli("theory --config " + bad_json.string()).code == 2);

  const auto unknown = write_config("unknown.json", R"({"bogus": 1})");
  const auto r = run_cli("theory --config " + unknown.string());
  CHECK(r.code == 2);
  CHECK(contains(r.err, "unknown key"));

  CHECK(run_cli("theory --config /tmp/ckx_no_such_file.json").code == 2);

  const auto bad_guard = write_config(
      "bad_guard.json", R"({"protocol": {"guard_fraction": 0.9}})");
  CHECK(run_cli("simulate --config " + bad_guard.string() + " --out " +
                (work_root() / "never").string())
            .code == 2);

  const auto zero_thr = write_config(
      "zero_thr.json", R"({"protocol": {"threshold_volts_sq": 0.0}})");
  const auto tz = run_cli("simulate --config " + zero_thr.string() +
                          " --out " + (work_root() / "never2").string());
  CHECK(tz.code == 2);
  CHECK(contains(tz.err, "threshold"));
}

TEST_CASE("simulate is deterministic and writes the full artifact set") {
  const auto cfg = write_config("fast.json", fast_config);
  const auto d1 = (work_root() / "sim1").string();
  const auto d2 = (work_root() / "sim2").string();
  const auto r1 = run_cli("simulate --config " + cfg.string() +
                          " --seed 7 --out " + d1);
  const auto r2 = run_cli("simulate --config " + cfg.string() +
                          " --seed 7 --out " + d2);
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(contains(r1.out, "rounds: 8"));
  CHECK(contains(r1.out, "secure_yield:"));
  CHECK(contains(r1.out, "artifacts:"));

  for (const char* name :
       {"session.csv", "alice_key.txt", "bob_key.txt", "summary.txt",
        "windows.bin", "manifest.json"})
    CHECK(fs::exists(fs::path(d1) / name));
  for (int i = 0; i < 8; ++i)
    CHECK(fs::exists(fs::path(d1) / "transitions" /
                     ("transition_" + std::to_string(i) + ".csv")));

  for (const char* name : {"session.csv", "alice_key.txt", "bob_key.txt",
                           "summary.txt", "windows.bin"})
    CHECK(slurp(fs::path(d1) / name) == slurp(fs::path(d2) / name));

  const auto manifest = slurp(fs::path(d1) / "manifest.json");
  CHECK(contains(manifest, "\"command\": \"simulate\""));
  CHECK(contains(manifest, "\"master_seed\": 7"));

  const auto session = slurp(fs::path(d1) / "session.csv");
  CHECK(session.rfind("index,alice_choice,bob_choice,correlation_v2,secure,"
                      "bit,alice_inferred,bob_inferred\n",
                      0) == 0);

  // A different seed must change the wire data.
  const auto d3 = (work_root() / "sim3").string();
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 8 --out " +
                  d3)
              .code == 0);
  CHECK(slurp(fs::path(d1) / "windows.bin") !=
        slurp(fs::path(d3) / "windows.bin"));

  // Round-count override from the command line.
  const auto d4 = (work_root() / "sim4").string();
  REQUIRE(run_cli("simulate --config " + cfg.string() +
                  " --seed 7 --beps 5 --out " + d4)
              .code == 0);
  const auto short_session = slurp(fs::path(d4) / "session.csv");
  int rows = -1;
  for (char c : short_session)
    if (c == '\n') ++rows;
  CHECK(rows == 5);
}

TEST_CASE("database build and template attack round trip") {
  const auto cfg = write_config("attack.json", fast_config);
  const auto dir = (work_root() / "chain").string();
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 7 --out " +
                  dir)
              .code == 0);

  const auto b = run_cli("build-db --config " + cfg.string() +
                         " --seed 7 --out " + dir);
  REQUIRE(b.code == 0);
  CHECK(contains(b.out, "templates:"));
  CHECK(fs::exists(fs::path(dir) / "db.ckdb"));

  const auto a = run_cli("attack --config " + cfg.string() +
                         " --seed 7 --session " + dir + " --out " + dir);
  REQUIRE(a.code == 0);
  CHECK(contains(a.out, "accuracy"));
  CHECK(fs::exists(fs::path(dir) / "attack_report.txt"));
  CHECK(fs::exists(fs::path(dir) / "attack_guesses.csv"));
  CHECK(fs::exists(fs::path(dir) / "confusion.csv"));
  const auto guesses = slurp(fs::path(dir) / "attack_guesses.csv");
  CHECK(guesses.rfind("index,from,to,distance,matched,abstained,bit_guess\n",
                      0) == 0);

  const auto s = run_cli("attack --mode steady --config " + cfg.string() +
                         " --seed 7 --session " + dir + " --out " + dir);
  REQUIRE(s.code == 0);
  CHECK(contains(s.out, "mode: steady"));
  CHECK(contains(s.out, "evaluated_bits:"));
  CHECK(fs::exists(fs::path(dir) / "steady_report.txt"));

  CHECK(run_cli("attack --mode nonsense --config " + cfg.string() +
                " --session " + dir)
            .code == 2);
}

TEST_CASE("attack refuses mismatched configurations") {
  const auto cfg = write_config("fp_a.json", fast_config);
  const auto other = write_config("fp_b.json", R"({
    "circuit": {"gain_magnitude": 4.0},
    "protocol": {"n_bep": 8, "calibration_beps": 100},
    "attack": {"rail_spacing_factor": 3.0}
  })");
  const auto dir = (work_root() / "fp_session").string();
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 7 --out " +
                  dir)
              .code == 0);

  // No database next to the session.
  CHECK(run_cli("attack --config " + cfg.string() + " --session " + dir +
                " --out " + dir)
            .code == 2);

  // Windows from one circuit, analysis config for another.
  const auto r = run_cli("attack --config " + other.string() +
                         " --session " + dir + " --out " + dir);
  CHECK(r.code == 4);

  // Database built for a different circuit than the analysis config.
  const auto foreign = (work_root() / "fp_foreign").string();
  REQUIRE(run_cli("build-db --config " + other.string() + " --seed 7 --out " +
                  foreign)
              .code == 0);
  const auto m = run_cli("attack --config " + cfg.string() + " --session " +
                         dir + " --db " + foreign + "/db.ckdb --out " + dir);
  CHECK(m.code == 4);
}

TEST_CASE("slow amplifier configurations carry a warning") {
  const auto cfg = write_config("slow_amp.json", R"({
    "circuit": {"amp_time_constant_s": 5e-5},
    "protocol": {"n_bep": 4, "calibration_beps": 100},
    "attack": {"rail_spacing_factor": 3.0}
  })");
  const auto dir = (work_root() / "slow").string();
  const auto r = run_cli("simulate --config " + cfg.string() +
                         " --seed 7 --out " + dir);
  CHECK(r.code == 0);
  CHECK(contains(r.err, "timescale"));
}
