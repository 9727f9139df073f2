#include "ckx/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "ckx/attack.hpp"
#include "ckx/circuit.hpp"
#include "ckx/config.hpp"
#include "ckx/noise.hpp"
#include "ckx/protocol.hpp"
#include "ckx/stats.hpp"
#include "ckx/theory.hpp"

namespace ckx::acceptance {

namespace {

namespace fs = std::filesystem;
using protocol::BitSituation;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

circuit::GainPair situation_gains(BitSituation s, double mag) {
  const double a = protocol::alice_of(s) == protocol::Choice::L ? -mag : mag;
  const double b = protocol::bob_of(s) == protocol::Choice::L ? -mag : mag;
  return {a, b};
}

// Streaming batch-mean accumulator for the standard error of a correlated
// series without storing it.
struct BatchAcc {
  std::size_t batch_len;
  double acc = 0.0;
  std::size_t in_batch = 0;
  std::vector<double> means;

  explicit BatchAcc(std::size_t len) : batch_len(len) {}
  void add(double x) {
    acc += x;
    if (++in_batch == batch_len) {
      means.push_back(acc / static_cast<double>(batch_len));
      acc = 0.0;
      in_batch = 0;
    }
  }
  double mean() const { return stats::mean(means); }
  double se() const {
    return stats::stddev(means) / std::sqrt(static_cast<double>(means.size()));
  }
};

// Per-round correlation estimates with both gains pinned to one situation.
std::vector<double> pinned_estimates(const config::RunConfig& cfg,
                                     BitSituation s, std::int64_t n_rounds,
                                     std::uint64_t seed_base) {
  noise::NoiseSpec sp1 = cfg.noise, sp2 = cfg.noise;
  sp1.seed = seed_base + 1;
  sp2.seed = seed_base + 2;
  noise::NoiseSource n1(sp1), n2(sp2);
  circuit::Simulator sim(cfg.circuit, cfg.noise.sample_rate_hz);
  auto st = sim.initial_state(situation_gains(s, cfg.circuit.gain_magnitude));
  const std::int64_t p = cfg.protocol.samples_per_bep();
  sim.run_periods(st, n1, n2, 2 * p, nullptr, nullptr);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_rounds));
  for (std::int64_t i = 0; i < n_rounds; ++i) {
    circuit::WireTrace dec;
    dec.decimated = true;
    sim.run_periods(st, n1, n2, p, &dec, nullptr);
    out.push_back(
        protocol::estimate_correlation(dec, cfg.protocol.guard_fraction));
  }
  return out;
}

bool files_equal(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::string da((std::istreambuf_iterator<char>(fa)),
                 std::istreambuf_iterator<char>());
  std::string db((std::istreambuf_iterator<char>(fb)),
                 std::istreambuf_iterator<char>());
  return da == db;
}

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

CriterionResult c1_moment_agreement(const Options& opt) {
  CriterionResult r{1, "steady-moment-agreement", true, "", 0.0};
  const config::RunConfig cfg = config::default_config();
  const circuit::GainPair pairs[4] = {
      {-0.5, -0.5}, {0.5, 0.5}, {-5.0, 5.0}, {5.0, -5.0}};
  const std::int64_t n = 2'000'000;
  const std::size_t batch = 2000;
  std::ostringstream detail;
  double worst = 0.0;
  for (int pi = 0; pi < 4; ++pi) {
    noise::NoiseSpec sp1 = cfg.noise, sp2 = cfg.noise;
    sp1.seed = opt.master_seed + 10 * static_cast<std::uint64_t>(pi) + 1;
    sp2.seed = opt.master_seed + 10 * static_cast<std::uint64_t>(pi) + 2;
    noise::NoiseSource n1(sp1), n2(sp2);
    circuit::Simulator sim(cfg.circuit, cfg.noise.sample_rate_hz);
    auto st = sim.initial_state(pairs[pi]);
    const int m = sim.oversample();
    for (int w = 0; w < 2000; ++w) {
      st.u1 = n1.next_noise();
      st.u2 = n2.next_noise();
      for (int k = 0; k < m; ++k) sim.substep(st);
    }
    BatchAcc aa(batch), bb(batch), ab(batch);
    double u_power = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      st.u1 = n1.next_noise();
      st.u2 = n2.next_noise();
      for (int k = 0; k < m; ++k) sim.substep(st);
      const double va = st.v_a(), vb = st.v_b();
      aa.add(va * va);
      bb.add(vb * vb);
      ab.add(va * vb);
      u_power += st.u1 * st.u1 + st.u2 * st.u2;
    }
    const double sigma_sq = u_power / (2.0 * static_cast<double>(n));
    const auto th =
        theory::steady_moments(pairs[pi].a1, pairs[pi].a2, sigma_sq);
    const double dev[3] = {std::fabs(aa.mean() - th.msq_a) / aa.se(),
                           std::fabs(bb.mean() - th.msq_b) / bb.se(),
                           std::fabs(ab.mean() - th.cross) / ab.se()};
    for (double d : dev) {
      worst = std::max(worst, d);
      if (d > 3.0) r.pass = false;
    }
  }
  detail << "worst deviation " << fmt(worst) << " se (limit 3)";
  r.detail = detail.str();
  return r;
}

struct PinnedSets {
  std::vector<double> ll, lh, hl, hh;
};

PinnedSets pinned_sets(const Options& opt) {
  const config::RunConfig cfg = config::default_config();
  PinnedSets s;
  s.ll = pinned_estimates(cfg, BitSituation::LL, 1000, opt.master_seed + 100);
  s.lh = pinned_estimates(cfg, BitSituation::LH, 1000, opt.master_seed + 110);
  s.hl = pinned_estimates(cfg, BitSituation::HL, 1000, opt.master_seed + 120);
  s.hh = pinned_estimates(cfg, BitSituation::HH, 1000, opt.master_seed + 130);
  return s;
}

CriterionResult c2_sign_pattern(const PinnedSets& sets) {
  CriterionResult r{2, "correlation-sign-pattern", true, "", 0.0};
  std::int64_t ll_neg = 0, hh_pos = 0;
  for (double v : sets.ll) ll_neg += v < 0.0;
  for (double v : sets.hh) hh_pos += v > 0.0;
  const double z99 = 2.5758293035489004;
  const auto centered = [&](const std::vector<double>& xs) {
    const double se =
        stats::stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
    return std::fabs(stats::mean(xs)) <= z99 * se;
  };
  const bool lh_ok = centered(sets.lh);
  const bool hl_ok = centered(sets.hl);
  r.pass = ll_neg == static_cast<std::int64_t>(sets.ll.size()) &&
           hh_pos == static_cast<std::int64_t>(sets.hh.size()) && lh_ok &&
           hl_ok;
  std::ostringstream d;
  d << "LL neg " << ll_neg << "/" << sets.ll.size() << ", HH pos " << hh_pos
    << "/" << sets.hh.size() << ", LH mean zero " << (lh_ok ? "yes" : "no")
    << ", HL mean zero " << (hl_ok ? "yes" : "no");
  r.detail = d.str();
  return r;
}

CriterionResult c3_scatter_scale(const PinnedSets& sets) {
  CriterionResult r{3, "secure-scatter-scale", true, "", 0.0};
  std::vector<double> combined = sets.lh;
  combined.insert(combined.end(), sets.hl.begin(), sets.hl.end());
  const double three_sigma = 3.0 * stats::stddev(combined);
  r.pass = three_sigma >= 0.015 && three_sigma <= 0.06;
  r.detail = "3-sigma " + fmt(three_sigma) + " V^2, required [0.015, 0.06]";
  return r;
}

CriterionResult c4_yield_agreement(const Options& opt) {
  CriterionResult r{4, "protocol-yield-and-agreement", true, "", 0.0};
  config::RunConfig cfg = config::default_config();
  cfg.master_seed = opt.master_seed;
  cfg.apply_seeds();
  cfg.protocol.n_bep = 10000;
  const auto session = protocol::run_session(cfg.protocol, cfg.circuit,
                                             cfg.noise1_spec(),
                                             cfg.noise2_spec());
  const double y = session.summary.secure_yield;
  const bool keys_equal = session.alice_key == session.bob_key;
  r.pass = y >= 0.485 && y <= 0.515 && keys_equal;
  std::ostringstream d;
  d << "yield " << fmt(y) << " (required 0.5 +/- 0.015), keys "
    << (keys_equal ? "identical" : "differ");
  r.detail = d.str();
  return r;
}

CriterionResult c5_steady_security(const Options& opt) {
  CriterionResult r{5, "steady-observer-at-chance", true, "", 0.0};
  config::RunConfig cfg = config::default_config();
  cfg.master_seed = opt.master_seed + 1000;
  cfg.apply_seeds();
  cfg.protocol.n_bep = 21000;
  const auto session = protocol::run_session(cfg.protocol, cfg.circuit,
                                             cfg.noise1_spec(),
                                             cfg.noise2_spec());
  const auto guesses = attack::steady_eve(
      session.records, session.threshold_volts_sq, cfg.attack.params.eve_seed);
  const auto s = attack::evaluate_steady(guesses, session);
  r.pass = s.n >= 10000 && s.wilson95.contains(0.5);
  std::ostringstream d;
  d << "accuracy " << fmt(s.accuracy) << " on " << s.n << " bits, wilson95 ["
    << fmt(s.wilson95.lo) << ", " << fmt(s.wilson95.hi) << "]";
  r.detail = d.str();
  return r;
}

CriterionResult c6_indistinguishability(const PinnedSets& sets) {
  CriterionResult r{6, "secure-situation-indistinguishability", true, "", 0.0};
  const auto ks = stats::ks_two_sample(sets.lh, sets.hl);
  r.pass = ks.p_value > 0.01;
  r.detail = "KS statistic " + fmt(ks.statistic) + ", p " + fmt(ks.p_value) +
             " (reject below 0.01)";
  return r;
}

CriterionResult c7_transient_symmetry() {
  CriterionResult r{7, "transient-mirror-and-resolution", true, "", 0.0};
  config::RunConfig cfg = config::default_config();
  circuit::Simulator sim(cfg.circuit, cfg.noise.sample_rate_hz);
  circuit::CircuitParams fine = cfg.circuit;
  fine.internal_oversample *= 2;
  circuit::Simulator sim2(fine, cfg.noise.sample_rate_hz);
  std::mt19937_64 rng(0xC7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto transitions = attack::all_transitions();
  const double vsat = cfg.circuit.saturation_volts;
  const int k = 16;
  double worst_mirror = 0.0, worst_halving = 0.0;
  for (int c = 0; c < 100; ++c) {
    const auto t = transitions[rng() % transitions.size()];
    double va, vb;
    const double ja = (u01(rng) - 0.5), jb = (u01(rng) - 0.5);
    switch (t.first) {
      case BitSituation::LL:
        va = vsat + ja;
        vb = -vsat + jb;
        if (rng() & 1u) std::swap(va, vb);
        break;
      case BitSituation::HH:
        va = (rng() & 1u ? vsat : -vsat) + ja;
        vb = std::copysign(vsat, va) + jb;
        break;
      default:
        va = 1.2 * ja;
        vb = 1.2 * jb;
        break;
    }
    const auto pre = situation_gains(t.first, cfg.circuit.gain_magnitude);
    const auto post = situation_gains(t.second, cfg.circuit.gain_magnitude);
    const auto mt = attack::mirrored_transition(t);
    const auto mpre = situation_gains(mt.first, cfg.circuit.gain_magnitude);
    const auto mpost = situation_gains(mt.second, cfg.circuit.gain_magnitude);
    const auto tr = sim.frozen_transient(va, vb, pre, post, k);
    const auto mir = sim.frozen_transient(vb, va, mpre, mpost, k);
    const auto tr2 = sim2.frozen_transient(va, vb, pre, post, 2 * k - 1);
    double scale = 1e-30, dm = 0.0, dh = 0.0;
    for (int j = 0; j < k; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      scale = std::max({scale, std::fabs(tr.v_a[ju]), std::fabs(tr.v_b[ju])});
      dm = std::max({dm, std::fabs(tr.v_a[ju] - mir.v_b[ju]),
                     std::fabs(tr.v_b[ju] - mir.v_a[ju])});
      dh = std::max(
          {dh, std::fabs(tr.v_a[ju] - tr2.v_a[2 * ju]),
           std::fabs(tr.v_b[ju] - tr2.v_b[2 * ju])});
    }
    worst_mirror = std::max(worst_mirror, dm / scale);
    worst_halving = std::max(worst_halving, dh / scale);
  }
  r.pass = worst_mirror <= 1e-9 && worst_halving <= 0.005;
  r.detail = "mirror max rel " + fmt(worst_mirror) +
             " (limit 1e-9), dt-halving max rel " + fmt(worst_halving) +
             " (limit 0.005)";
  return r;
}

CriterionResult c8_transient_attack(const Options& opt) {
  CriterionResult r{8, "transient-attack-accuracy", true, "", 0.0};
  config::RunConfig cfg = config::default_config();
  cfg.master_seed = opt.master_seed + 2000;
  cfg.apply_seeds();
  cfg.protocol.n_bep = 1100;
  const auto grid = attack::default_grid(cfg.circuit, cfg.noise, 0.1);
  const auto db = attack::build_database(
      cfg.circuit, cfg.noise.sample_rate_hz, grid, cfg.attack.params.k_samples);
  auto session = protocol::run_session(cfg.protocol, cfg.circuit,
                                       cfg.noise1_spec(), cfg.noise2_spec(),
                                       cfg.attack.params.k_samples);
  std::vector<double> correlations;
  correlations.reserve(session.records.size());
  for (const auto& rec : session.records)
    correlations.push_back(rec.correlation_estimate);
  attack::AttackReport report = attack::transient_attack(
      session.windows, correlations, session.threshold_volts_sq,
      session.config.truth_table, db, cfg.attack.params, db.fingerprint);
  const auto s = attack::evaluate_against(report, session);
  r.pass = s.n >= 500 && s.accuracy >= 0.9 && s.p_value_vs_half < 1e-6;
  std::ostringstream d;
  d << "accuracy " << fmt(s.accuracy) << " on " << s.n << " bits, p "
    << fmt(s.p_value_vs_half) << ", abstentions " << report.abstentions
    << ", templates " << db.total_templates();
  r.detail = d.str();
  return r;
}

CriterionResult c9_algebra_properties() {
  CriterionResult r{9, "noise-algebra-identities", true, "", 0.0};
  std::mt19937_64 rng(0xC9);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double tol = 1e-12;
  double worst = 0.0;
  const auto rel = [](double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
  };
  for (int i = 0; i < 200; ++i) {
    const double t = 1.0 + 400.0 * u01(rng);
    const double res = std::exp(std::log(10.0) * (1.0 + 5.0 * u01(rng)));
    const double a_loop = 0.1 + 100.0 * u01(rng);
    const double df = 10.0 + 1e5 * u01(rng);
    const double ra = res, rb = std::exp(std::log(10.0) * (1.0 + 5.0 * u01(rng)));
    worst = std::max(
        worst, rel(theory::johnson_spectrum(2.0 * t, res),
                   2.0 * theory::johnson_spectrum(t, res)));
    worst = std::max(
        worst, rel(theory::johnson_spectrum(t, 2.0 * res),
                   2.0 * theory::johnson_spectrum(t, res)));
    worst = std::max(
        worst,
        rel(theory::effective_temperature(theory::johnson_spectrum(t, res),
                                          res),
            t));
    worst = std::max(
        worst,
        rel(theory::johnson_spectrum(
                theory::cold_effective_temperature(t, a_loop),
                theory::cold_effective_resistance(res, a_loop)),
            theory::johnson_spectrum(t, res) /
                ((1.0 + a_loop) * (1.0 + a_loop))));
    worst = std::max(worst, rel(theory::cold_effective_resistance(res, 0.0),
                                res));
    const double sc = noise::external_noise_scale(t, res, df);
    worst = std::max(
        worst, rel(sc * sc, 4.0 * theory::boltzmann_k * t * res * df));
    worst = std::max(worst, rel(theory::kljn_parallel(ra, ra), ra / 2.0));
    worst = std::max(
        worst, rel(theory::kljn_parallel(ra, rb) * (ra + rb), ra * rb));
    worst = std::max(
        worst, rel(theory::kljn_wire_msq(t, res, df),
                   theory::johnson_spectrum(t, res) * df));
  }
  r.pass = worst <= tol;
  r.detail = "worst relative error " + fmt(worst) + " (limit 1e-12)";
  return r;
}

CriterionResult c10_reproducibility(const Options& opt, const fs::path& work) {
  CriterionResult r{10, "manifest-reproducibility", true, "", 0.0};
  if (opt.cli_path.empty()) {
    r.pass = false;
    r.detail = "no command-line binary supplied";
    return r;
  }
  config::RunConfig cfg = config::default_config();
  cfg.master_seed = 777;
  cfg.apply_seeds();
  cfg.protocol.n_bep = 20;
  cfg.protocol.calibration_beps = 100;
  cfg.attack.rail_spacing_factor = 3.0;
  const fs::path cfg_path = work / "c10_config.json";
  {
    std::ofstream f(cfg_path);
    f << config::to_json(cfg).dump(2) << "\n";
  }
  const fs::path log = work / "c10_log.txt";
  const auto run = [&](const std::string& sub, const fs::path& config_file,
                       const fs::path& out) {
    const std::string cmd = opt.cli_path + " " + sub + " --config " +
                            config_file.string() + " --out " + out.string() +
                            " >> " + log.string() + " 2>&1";
    return run_cmd(cmd) == 0;
  };
  const fs::path s1 = work / "c10_sim1", s2 = work / "c10_sim2";
  const fs::path d1 = work / "c10_db1", d2 = work / "c10_db2";
  if (!run("simulate", cfg_path, s1) ||
      !run("simulate", s1 / "manifest.json", s2) ||
      !run("build-db", cfg_path, d1) ||
      !run("build-db", d1 / "manifest.json", d2)) {
    r.pass = false;
    r.detail = "command failed, see " + log.string();
    return r;
  }
  std::vector<std::string> mismatches;
  const char* session_files[] = {"session.csv", "windows.bin",
                                 "alice_key.txt", "bob_key.txt",
                                 "summary.txt"};
  for (const char* f : session_files)
    if (!files_equal(s1 / f, s2 / f)) mismatches.push_back(f);
  for (int i = 0; i < 20; ++i) {
    const std::string f = "transitions/transition_" + std::to_string(i) +
                          ".csv";
    if (!files_equal(s1 / f, s2 / f)) mismatches.push_back(f);
  }
  if (!files_equal(d1 / "db.ckdb", d2 / "db.ckdb"))
    mismatches.push_back("db.ckdb");
  r.pass = mismatches.empty();
  if (r.pass) {
    r.detail = "simulate and build-db reruns byte-identical";
  } else {
    std::ostringstream d;
    d << "differing artifacts:";
    for (const auto& m : mismatches) d << " " << m;
    r.detail = d.str();
  }
  return r;
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& opt,
                                     std::ostream& progress) {
  fs::path work = opt.work_dir.empty()
                      ? fs::temp_directory_path() / "ckx-acceptance"
                      : fs::path(opt.work_dir);
  std::error_code ec;
  fs::create_directories(work, ec);

  std::vector<CriterionResult> results;
  PinnedSets sets;
  // budget_s: runtime limits that are part of a criterion.
  const auto timed = [&](double budget_s, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r = fn();
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (budget_s > 0.0 && r.seconds > budget_s) {
      r.pass = false;
      r.detail += "; over the " + fmt(budget_s) + " s budget";
    }
    results.push_back(r);
    progress << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name
             << " [" << fmt(r.seconds) << " s] " << r.detail << "\n";
    progress.flush();
  };

  timed(60.0, [&] { return c1_moment_agreement(opt); });
  // Criteria 2, 3 and 6 share the pinned per-situation estimate sets.
  {
    const auto t0 = std::chrono::steady_clock::now();
    sets = pinned_sets(opt);
    const auto t1 = std::chrono::steady_clock::now();
    const double prep = std::chrono::duration<double>(t1 - t0).count();
    timed(0.0, [&] {
      auto r = c2_sign_pattern(sets);
      r.detail += " (shared prep " + fmt(prep) + " s)";
      return r;
    });
  }
  timed(0.0, [&] { return c3_scatter_scale(sets); });
  timed(0.0, [&] { return c4_yield_agreement(opt); });
  timed(0.0, [&] { return c5_steady_security(opt); });
  timed(0.0, [&] { return c6_indistinguishability(sets); });
  timed(0.0, [&] { return c7_transient_symmetry(); });
  timed(300.0, [&] { return c8_transient_attack(opt); });
  timed(0.0, [&] { return c9_algebra_properties(); });
  timed(0.0, [&] { return c10_reproducibility(opt, work); });
  return results;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

}  // namespace ckx::acceptance
