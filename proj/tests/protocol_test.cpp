#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "ckx/circuit.hpp"
#include "ckx/errors.hpp"
#include "ckx/noise.hpp"
#include "ckx/protocol.hpp"
#include "ckx/stats.hpp"

using namespace ckx;
using protocol::BitSituation;
using protocol::Choice;

TEST_CASE("situation encoding round trips") {
  CHECK(protocol::make_situation(Choice::L, Choice::L) == BitSituation::LL);
  CHECK(protocol::make_situation(Choice::L, Choice::H) == BitSituation::LH);
  CHECK(protocol::make_situation(Choice::H, Choice::L) == BitSituation::HL);
  CHECK(protocol::make_situation(Choice::H, Choice::H) == BitSituation::HH);
  for (auto s : {BitSituation::LL, BitSituation::LH, BitSituation::HL,
                 BitSituation::HH}) {
    CHECK(protocol::make_situation(protocol::alice_of(s),
                                   protocol::bob_of(s)) == s);
  }
  CHECK(std::string(protocol::to_string(BitSituation::LH)) == "LH");
  CHECK(std::string(protocol::to_string(BitSituation::HH)) == "HH");
  CHECK(protocol::to_char(Choice::L) == 'L');
  CHECK(protocol::to_char(Choice::H) == 'H');
}

TEST_CASE("mirror swaps the parties") {
  CHECK(protocol::mirrored(BitSituation::LH) == BitSituation::HL);
  CHECK(protocol::mirrored(BitSituation::HL) == BitSituation::LH);
  CHECK(protocol::mirrored(BitSituation::LL) == BitSituation::LL);
  CHECK(protocol::mirrored(BitSituation::HH) == BitSituation::HH);
}

TEST_CASE("only mixed situations carry bits") {
  const protocol::TruthTable table;
  CHECK(protocol::extract_bit(BitSituation::LH, table) == 0);
  CHECK(protocol::extract_bit(BitSituation::HL, table) == 1);
  CHECK_FALSE(protocol::extract_bit(BitSituation::LL, table).has_value());
  CHECK_FALSE(protocol::extract_bit(BitSituation::HH, table).has_value());
  CHECK(protocol::is_secure(BitSituation::LH));
  CHECK(protocol::is_secure(BitSituation::HL));
  CHECK_FALSE(protocol::is_secure(BitSituation::LL));
  CHECK_FALSE(protocol::is_secure(BitSituation::HH));

  protocol::TruthTable swapped;
  swapped.lh = 1;
  swapped.hl = 0;
  swapped.validate();
  CHECK(protocol::extract_bit(BitSituation::LH, swapped) == 1);

  protocol::TruthTable broken;
  broken.lh = 1;
  broken.hl = 1;
  CHECK_THROWS_AS(broken.validate(), config_error);
  broken.lh = 2;
  broken.hl = 0;
  CHECK_THROWS_AS(broken.validate(), config_error);
}

TEST_CASE("classification from one party's view") {
  // Own choice is the first letter of the result.
  CHECK(protocol::classify(-10.0, Choice::L, 0.1) == BitSituation::LL);
  // An H chooser only decides between HL and HH.
  CHECK(protocol::classify(-10.0, Choice::H, 0.1) == BitSituation::HL);
  CHECK(protocol::classify(10.0, Choice::L, 0.1) == BitSituation::LH);
  CHECK(protocol::classify(10.0, Choice::H, 0.1) == BitSituation::HH);
  CHECK(protocol::classify(0.001, Choice::H, 0.1) == BitSituation::HL);
  CHECK(protocol::classify(0.001, Choice::L, 0.1) == BitSituation::LH);
  CHECK(protocol::classify(-0.0999, Choice::L, 0.1) == BitSituation::LH);
  CHECK_THROWS_AS(protocol::classify(1.0, Choice::L, 0.0), config_error);
  CHECK_THROWS_AS(protocol::classify(1.0, Choice::L, -0.1), config_error);
}

TEST_CASE("correlation estimator drops the guard region") {
  circuit::WireTrace tr;
  tr.decimated = true;
  // 10 samples, guard 0.1: the first llround(10 * 0.1) = 1 is skipped.
  for (int i = 0; i < 10; ++i) tr.push(i == 0 ? 100.0 : 2.0, i == 0 ? 100.0 : 0.5);
  CHECK(protocol::estimate_correlation(tr, 0.1) == doctest::Approx(1.0));
  CHECK(protocol::estimate_correlation(tr, 0.0) ==
        doctest::Approx((100.0 * 100.0 + 9.0) / 10.0));

  circuit::WireTrace anti;
  anti.decimated = true;
  for (int i = 0; i < 8; ++i) anti.push(1.5, -2.0);
  CHECK(protocol::estimate_correlation(anti, 0.25) == doctest::Approx(-3.0));

  circuit::WireTrace empty;
  empty.decimated = true;
  CHECK_THROWS_AS(protocol::estimate_correlation(empty, 0.1), config_error);
}

TEST_CASE("gain draws are uniform and per party deterministic") {
  std::mt19937_64 alice(1), bob(2);
  int counts[4] = {0, 0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = protocol::choose_gains(alice, bob);
    counts[static_cast<int>(protocol::make_situation(a, b))]++;
  }
  for (int c : counts)
    CHECK(static_cast<double>(c) / n == doctest::Approx(0.25).epsilon(0.04));

  // Alice's stream must not depend on Bob's seed.
  std::mt19937_64 a1(7), b1(100), a2(7), b2(200);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, u] = protocol::choose_gains(a1, b1);
    const auto [y, w] = protocol::choose_gains(a2, b2);
    CHECK(x == y);
  }
}

TEST_CASE("samples per bit exchange period") {
  protocol::ProtocolConfig cfg;
  CHECK(cfg.samples_per_bep() == 312);
  cfg.bep_duration_s = 1e-3;
  CHECK(cfg.samples_per_bep() == 250);
  cfg.bep_duration_s = 9.9e-6;  // floor(2.475)
  CHECK(cfg.samples_per_bep() == 2);
}

TEST_CASE("config validation") {
  protocol::ProtocolConfig cfg;
  cfg.validate();

  cfg.guard_fraction = 0.5;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = protocol::ProtocolConfig{};
  cfg.guard_fraction = -0.1;
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = protocol::ProtocolConfig{};
  cfg.auto_threshold = false;
  CHECK_THROWS_AS(cfg.validate(), config_error);  // zero manual threshold
  cfg.threshold_volts_sq = 0.05;
  cfg.validate();

  cfg = protocol::ProtocolConfig{};
  cfg.calibration_beps = 99;
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = protocol::ProtocolConfig{};
  cfg.n_bep = -1;
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = protocol::ProtocolConfig{};
  cfg.bep_duration_s = 4e-6;  // one measurement sample
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("auto threshold is stable and tracks the noise power") {
  const circuit::CircuitParams cp;
  noise::NoiseSpec ns;
  ns.target_rms_volts = 0.96;
  protocol::ProtocolConfig cfg;

  const double thr = protocol::auto_threshold(cp, ns, cfg, 200);
  CHECK(thr > 0.04);
  CHECK(thr < 0.07);
  CHECK(protocol::auto_threshold(cp, ns, cfg, 200) == thr);

  // Doubling the wire noise amplitude quadruples the power threshold.
  noise::NoiseSpec loud = ns;
  loud.target_rms_volts = 2.0 * ns.target_rms_volts;
  const double thr_loud = protocol::auto_threshold(cp, loud, cfg, 200);
  CHECK(thr_loud / thr > 3.5);
  CHECK(thr_loud / thr < 4.5);
}

TEST_CASE("session produces identical keys for both parties") {
  protocol::ProtocolConfig cfg;
  cfg.n_bep = 100;
  cfg.alice_seed = 11;
  cfg.bob_seed = 12;
  const circuit::CircuitParams cp;
  noise::NoiseSpec n1, n2;
  n1.seed = 21;
  n2.seed = 22;
  const auto session = protocol::run_session(cfg, cp, n1, n2);

  CHECK(session.records.size() == 100);
  CHECK(session.alice_key == session.bob_key);
  CHECK(session.summary.bit_errors == 0);
  CHECK(session.summary.disagreements == 0);
  CHECK(session.summary.n_bep == 100);
  CHECK(session.summary.n_secure > 20);
  CHECK(session.summary.secure_yield ==
        doctest::Approx(static_cast<double>(session.summary.n_secure) / 100.0));
  CHECK(session.alice_key.size() ==
        static_cast<std::size_t>(session.summary.n_secure));
  CHECK(session.threshold_volts_sq > 0.0);

  std::int64_t counted = 0;
  for (const auto c : session.summary.situation_counts) counted += c;
  CHECK(counted == 100);

  // Per-record coherence.
  for (const auto& r : session.records) {
    const auto truth =
        protocol::make_situation(r.alice_choice, r.bob_choice);
    CHECK(r.secure == protocol::is_secure(truth));
    if (r.secure) {
      CHECK(r.bit.has_value());
      CHECK(*r.bit == (truth == BitSituation::HL ? 1 : 0));
    } else {
      CHECK_FALSE(r.bit.has_value());
    }
    CHECK(r.alice_inferred == truth);
    CHECK(r.bob_inferred == truth);
  }

  // Transition bookkeeping: record i states (situation i-1, situation i).
  for (std::size_t i = 1; i < session.records.size(); ++i) {
    const auto& tr = session.records[i].transition_from_previous;
    REQUIRE(tr.has_value());
    CHECK(tr->first == protocol::make_situation(
                           session.records[i - 1].alice_choice,
                           session.records[i - 1].bob_choice));
    CHECK(tr->second == protocol::make_situation(
                            session.records[i].alice_choice,
                            session.records[i].bob_choice));
  }
  CHECK_FALSE(session.records[0].transition_from_previous.has_value());
}

TEST_CASE("session archives one entry window per exchange period") {
  protocol::ProtocolConfig cfg;
  cfg.n_bep = 30;
  cfg.alice_seed = 31;
  cfg.bob_seed = 32;
  const circuit::CircuitParams cp;
  noise::NoiseSpec n1, n2;
  n1.seed = 41;
  n2.seed = 42;
  const auto session = protocol::run_session(cfg, cp, n1, n2, 24);
  REQUIRE(session.windows.size() == 30);
  for (const auto& w : session.windows) {
    CHECK(w.size() == 24);
    CHECK_FALSE(w.decimated);
  }
}

TEST_CASE("sessions repeat bit for bit under identical seeds") {
  protocol::ProtocolConfig cfg;
  cfg.n_bep = 30;
  cfg.alice_seed = 51;
  cfg.bob_seed = 52;
  const circuit::CircuitParams cp;
  noise::NoiseSpec n1, n2;
  n1.seed = 61;
  n2.seed = 62;
  const auto s1 = protocol::run_session(cfg, cp, n1, n2);
  const auto s2 = protocol::run_session(cfg, cp, n1, n2);
  CHECK(s1.alice_key == s2.alice_key);
  REQUIRE(s1.records.size() == s2.records.size());
  for (std::size_t i = 0; i < s1.records.size(); ++i) {
    CHECK(s1.records[i].correlation_estimate ==
          s2.records[i].correlation_estimate);
  }
  for (std::size_t i = 0; i < s1.windows.size(); ++i) {
    for (std::size_t j = 0; j < s1.windows[i].size(); ++j) {
      CHECK(s1.windows[i].v_a[j] == s2.windows[i].v_a[j]);
      CHECK(s1.windows[i].v_b[j] == s2.windows[i].v_b[j]);
    }
  }
}

TEST_CASE("secure estimates straddle zero and saturated ones do not") {
  protocol::ProtocolConfig cfg;
  cfg.n_bep = 200;
  cfg.alice_seed = 71;
  cfg.bob_seed = 72;
  const circuit::CircuitParams cp;
  noise::NoiseSpec n1, n2;
  n1.seed = 81;
  n2.seed = 82;
  const auto session = protocol::run_session(cfg, cp, n1, n2);
  for (const auto& r : session.records) {
    const auto truth =
        protocol::make_situation(r.alice_choice, r.bob_choice);
    if (truth == BitSituation::LL)
      CHECK(r.correlation_estimate < -session.threshold_volts_sq);
    if (truth == BitSituation::HH)
      CHECK(r.correlation_estimate > session.threshold_volts_sq);
    if (protocol::is_secure(truth))
      CHECK(std::fabs(r.correlation_estimate) < session.threshold_volts_sq);
  }
}
