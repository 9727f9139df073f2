#include "ckx/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

#include "ckx/detail/bytes.hpp"
#include "ckx/errors.hpp"
#include "ckx/theory.hpp"

namespace ckx::attack {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

int situation_index(BitSituation s) { return static_cast<int>(s); }

int pair_index(std::pair<BitSituation, BitSituation> t) {
  return 4 * situation_index(t.first) + situation_index(t.second);
}

std::pair<BitSituation, BitSituation> canonical_transition(
    std::pair<BitSituation, BitSituation> t) {
  const auto m = mirrored_transition(t);
  return pair_index(m) < pair_index(t) ? m : t;
}

circuit::GainPair gains_for(BitSituation s, double magnitude) {
  const double a =
      protocol::alice_of(s) == protocol::Choice::L ? -magnitude : magnitude;
  const double b =
      protocol::bob_of(s) == protocol::Choice::L ? -magnitude : magnitude;
  return {a, b};
}

Patch make_patch(double center_a, double center_b, double half_range,
                 double spacing) {
  const int steps = static_cast<int>(std::floor(half_range / spacing + 1e-9));
  Patch p;
  p.spacing = spacing;
  p.na = 2 * steps + 1;
  p.nb = p.na;
  p.a_min = center_a - steps * spacing;
  p.b_min = center_b - steps * spacing;
  return p;
}

// Entry-state coverage of a situation: where the wires can sit after a full
// BEP spent in it.
std::vector<Patch> patches_for(BitSituation pre, const GridSpec& grid,
                               double vsat) {
  switch (pre) {
    case BitSituation::LH:
    case BitSituation::HL:
      return {make_patch(0.0, 0.0, grid.secure_half_range_v,
                         grid.secure_spacing_v)};
    case BitSituation::LL:
      return {make_patch(vsat, -vsat, grid.rail_half_range_v,
                         grid.rail_spacing_v),
              make_patch(-vsat, vsat, grid.rail_half_range_v,
                         grid.rail_spacing_v)};
    case BitSituation::HH:
      return {make_patch(vsat, vsat, grid.rail_half_range_v,
                         grid.rail_spacing_v),
              make_patch(-vsat, -vsat, grid.rail_half_range_v,
                         grid.rail_spacing_v)};
  }
  return {};
}

struct TemplateRef {
  const double* data = nullptr;
  bool swapped = false;
};

// Up to four grid neighbors of the query point within one patch; queries in
// the mirror-redundant half of a triangular patch fetch the transposed point
// wire-swapped.
void collect_from_patch(const PatchTemplates& pt, int k_samples, double qa,
                        double qb, bool swapped,
                        std::vector<TemplateRef>& out) {
  const Patch& p = pt.patch;
  const double margin = 3.0 * p.spacing;
  if (!p.contains(qa, qb, margin)) return;
  const auto clamp_idx = [](int i, int n) {
    return std::max(0, std::min(n - 1, i));
  };
  const int ia0 = clamp_idx(
      static_cast<int>(std::floor((qa - p.a_min) / p.spacing)), p.na);
  const int ib0 = clamp_idx(
      static_cast<int>(std::floor((qb - p.b_min) / p.spacing)), p.nb);
  const std::size_t stride = static_cast<std::size_t>(k_samples) * 2;
  int seen_n = 0;
  std::int64_t seen[4];
  for (int da = 0; da <= 1; ++da) {
    for (int db = 0; db <= 1; ++db) {
      int ia = clamp_idx(ia0 + da, p.na);
      int ib = clamp_idx(ib0 + db, p.nb);
      bool extra_swap = false;
      if (p.triangular && ib > ia) {
        std::swap(ia, ib);
        extra_swap = true;
      }
      const std::int64_t idx = p.stored_index(ia, ib);
      bool dup = false;
      for (int s = 0; s < seen_n; ++s) dup = dup || seen[s] == idx;
      if (dup) continue;
      seen[seen_n++] = idx;
      out.push_back({pt.data.data() + static_cast<std::size_t>(idx) * stride,
                     swapped != extra_swap});
    }
  }
}

void collect_candidates(const TransientDatabase& db, BitSituation from,
                        BitSituation to, double va0, double vb0,
                        std::vector<TemplateRef>& out) {
  const std::pair<BitSituation, BitSituation> t{from, to};
  const auto c = canonical_transition(t);
  const StoredTransition* st = db.find_stored(c.first, c.second);
  if (st == nullptr) return;
  if (t == c) {
    for (const auto& pt : st->patches)
      collect_from_patch(pt, db.k_samples, va0, vb0, false, out);
    if (mirrored_transition(t) == t) {
      for (const auto& pt : st->patches)
        collect_from_patch(pt, db.k_samples, vb0, va0, true, out);
    }
  } else {
    for (const auto& pt : st->patches)
      collect_from_patch(pt, db.k_samples, vb0, va0, true, out);
  }
}

double window_ssd(const circuit::WireTrace& w, const TemplateRef& ref,
                  int k_eff, int stride) {
  double s = 0.0;
  for (int j = 0; j < k_eff; j += stride) {
    const double ta = ref.swapped ? ref.data[2 * j + 1] : ref.data[2 * j];
    const double tb = ref.swapped ? ref.data[2 * j] : ref.data[2 * j + 1];
    const double da = w.v_a[static_cast<std::size_t>(j)] - ta;
    const double db = w.v_b[static_cast<std::size_t>(j)] - tb;
    s += da * da + db * db;
  }
  return s;
}

using detail::put_f64;
using detail::put_u32;
using detail::put_u64;
using detail::put_u8;

}  // namespace

void GridSpec::validate() const {
  if (secure_half_range_v <= 0.0 || secure_spacing_v <= 0.0 ||
      rail_half_range_v <= 0.0 || rail_spacing_v <= 0.0)
    throw config_error("attack.grid: all ranges and spacings must be positive");
  if (secure_spacing_v > secure_half_range_v ||
      rail_spacing_v > rail_half_range_v)
    throw config_error("attack.grid: spacing exceeds the patch half range");
}

GridSpec default_grid(const circuit::CircuitParams& params,
                      const noise::NoiseSpec& noise_spec,
                      double rail_spacing_factor) {
  const double a = params.gain_magnitude;
  const double sigma_sq = noise_spec.target_rms_volts *
                          noise_spec.target_rms_volts;
  const auto m = theory::steady_moments(-a, a, sigma_sq);
  const double rms = std::sqrt(m.msq_a);
  GridSpec g;
  g.secure_half_range_v = 3.0 * rms;
  g.secure_spacing_v = 0.1 * rms;
  g.rail_half_range_v = 3.0 * noise_spec.target_rms_volts;
  g.rail_spacing_v = rail_spacing_factor * rms;
  return g;
}

std::int64_t Patch::stored_points() const {
  if (triangular)
    return static_cast<std::int64_t>(na) * (na + 1) / 2;
  return static_cast<std::int64_t>(na) * nb;
}

std::int64_t Patch::stored_index(int ia, int ib) const {
  if (triangular)
    return static_cast<std::int64_t>(ia) * (ia + 1) / 2 + ib;
  return static_cast<std::int64_t>(ia) * nb + ib;
}

bool Patch::contains(double a, double b, double margin) const {
  const double a_max = a_min + (na - 1) * spacing;
  const double b_max = b_min + (nb - 1) * spacing;
  return a >= a_min - margin && a <= a_max + margin && b >= b_min - margin &&
         b <= b_max + margin;
}

std::int64_t TransientDatabase::total_templates() const {
  std::int64_t n = 0;
  for (const auto& st : stored)
    for (const auto& pt : st.patches) n += pt.patch.stored_points();
  return n;
}

const StoredTransition* TransientDatabase::find_stored(BitSituation from,
                                                       BitSituation to) const {
  for (const auto& st : stored)
    if (st.from == from && st.to == to) return &st;
  return nullptr;
}

std::uint64_t circuit_fingerprint(const circuit::CircuitParams& params,
                                  double sample_rate_hz) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g|%.17g|%.17g|%d|%d|%.17g|%.17g",
                params.gain_magnitude, params.amp_time_constant_s,
                params.saturation_volts, params.internal_oversample,
                static_cast<int>(params.switching.kind),
                params.switching.ramp_duration_s, sample_rate_hz);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* p = buf; *p != '\0'; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::pair<BitSituation, BitSituation> mirrored_transition(
    std::pair<BitSituation, BitSituation> t) {
  return {protocol::mirrored(t.first), protocol::mirrored(t.second)};
}

std::vector<std::pair<BitSituation, BitSituation>> all_transitions() {
  std::vector<std::pair<BitSituation, BitSituation>> out;
  for (int f = 0; f < 4; ++f) {
    for (int t = 0; t < 4; ++t) {
      if (f == t) continue;
      out.emplace_back(static_cast<BitSituation>(f),
                       static_cast<BitSituation>(t));
    }
  }
  return out;
}

TransientDatabase build_database(const circuit::CircuitParams& params,
                                 double sample_rate_hz, const GridSpec& grid,
                                 int k_samples) {
  grid.validate();
  if (k_samples < 2)
    throw config_error("build_database: k_samples must be >= 2");
  circuit::Simulator sim(params, sample_rate_hz);
  TransientDatabase db;
  db.fingerprint = circuit_fingerprint(params, sample_rate_hz);
  db.sample_rate_hz = sample_rate_hz;
  db.k_samples = k_samples;
  db.grid = grid;
  const double vsat = params.saturation_volts;
  const double mag = params.gain_magnitude;
  for (const auto& t : all_transitions()) {
    if (canonical_transition(t) != t) continue;
    StoredTransition st;
    st.from = t.first;
    st.to = t.second;
    st.flagged_discarded = !protocol::is_secure(t.first) &&
                           !protocol::is_secure(t.second);
    auto patches = patches_for(t.first, grid, vsat);
    const bool self_mirrored = mirrored_transition(t) == t;
    if (self_mirrored && t.first == BitSituation::LL) {
      // The two rail patches are each other's mirror images; keep one.
      patches.resize(1);
    }
    const bool triangular = self_mirrored && t.first == BitSituation::HH;
    const auto pre_gains = gains_for(t.first, mag);
    const auto post_gains = gains_for(t.second, mag);
    for (auto& patch : patches) {
      patch.triangular = triangular;
      PatchTemplates pt;
      pt.patch = patch;
      pt.data.reserve(static_cast<std::size_t>(patch.stored_points()) *
                      k_samples * 2);
      for (int ia = 0; ia < patch.na; ++ia) {
        const int ib_max = triangular ? ia : patch.nb - 1;
        for (int ib = 0; ib <= ib_max; ++ib) {
          const double va0 = patch.a_min + ia * patch.spacing;
          const double vb0 = patch.b_min + ib * patch.spacing;
          const auto trace =
              sim.frozen_transient(va0, vb0, pre_gains, post_gains, k_samples);
          for (int j = 0; j < k_samples; ++j) {
            pt.data.push_back(trace.v_a[static_cast<std::size_t>(j)]);
            pt.data.push_back(trace.v_b[static_cast<std::size_t>(j)]);
          }
        }
      }
      st.patches.push_back(std::move(pt));
    }
    db.stored.push_back(std::move(st));
  }
  return db;
}

void save_database(const TransientDatabase& db, const std::string& path) {
  std::string out;
  out.reserve(64 + static_cast<std::size_t>(db.total_templates()) *
                       db.k_samples * 16);
  out.append("CKDB1");
  put_u32(out, 1);  // format version
  put_u64(out, db.fingerprint);
  put_f64(out, db.sample_rate_hz);
  put_u32(out, static_cast<std::uint32_t>(db.k_samples));
  put_f64(out, db.grid.secure_half_range_v);
  put_f64(out, db.grid.secure_spacing_v);
  put_f64(out, db.grid.rail_half_range_v);
  put_f64(out, db.grid.rail_spacing_v);
  put_u32(out, static_cast<std::uint32_t>(db.stored.size()));
  for (const auto& st : db.stored) {
    put_u8(out, static_cast<std::uint8_t>(st.from));
    put_u8(out, static_cast<std::uint8_t>(st.to));
    put_u8(out, st.flagged_discarded ? 1 : 0);
    put_u32(out, static_cast<std::uint32_t>(st.patches.size()));
    for (const auto& pt : st.patches) {
      put_f64(out, pt.patch.a_min);
      put_f64(out, pt.patch.b_min);
      put_f64(out, pt.patch.spacing);
      put_u32(out, static_cast<std::uint32_t>(pt.patch.na));
      put_u32(out, static_cast<std::uint32_t>(pt.patch.nb));
      put_u8(out, pt.patch.triangular ? 1 : 0);
      put_u64(out, static_cast<std::uint64_t>(pt.data.size()));
      for (double v : pt.data) put_f64(out, v);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw config_error("cannot write database file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw config_error("short write to database file: " + path);
}

TransientDatabase load_database(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open database file: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 5 || buf.compare(0, 5, "CKDB1") != 0)
    throw config_error("not a transient database file: " + path);
  detail::ByteReader r{buf, 5, "database file"};
  const std::uint32_t version = r.u32();
  if (version != 1)
    throw config_error("unsupported database format version");
  TransientDatabase db;
  db.fingerprint = r.u64();
  db.sample_rate_hz = r.f64();
  db.k_samples = static_cast<int>(r.u32());
  db.grid.secure_half_range_v = r.f64();
  db.grid.secure_spacing_v = r.f64();
  db.grid.rail_half_range_v = r.f64();
  db.grid.rail_spacing_v = r.f64();
  const std::uint32_t n_transitions = r.u32();
  for (std::uint32_t i = 0; i < n_transitions; ++i) {
    StoredTransition st;
    st.from = static_cast<BitSituation>(r.u8());
    st.to = static_cast<BitSituation>(r.u8());
    st.flagged_discarded = r.u8() != 0;
    const std::uint32_t n_patches = r.u32();
    for (std::uint32_t j = 0; j < n_patches; ++j) {
      PatchTemplates pt;
      pt.patch.a_min = r.f64();
      pt.patch.b_min = r.f64();
      pt.patch.spacing = r.f64();
      pt.patch.na = static_cast<int>(r.u32());
      pt.patch.nb = static_cast<int>(r.u32());
      pt.patch.triangular = r.u8() != 0;
      const std::uint64_t n_doubles = r.u64();
      const std::uint64_t expected =
          static_cast<std::uint64_t>(pt.patch.stored_points()) *
          static_cast<std::uint64_t>(db.k_samples) * 2u;
      if (n_doubles != expected)
        throw config_error("database file inconsistent template payload");
      pt.data.resize(n_doubles);
      for (std::uint64_t d = 0; d < n_doubles; ++d) pt.data[d] = r.f64();
      st.patches.push_back(std::move(pt));
    }
    db.stored.push_back(std::move(st));
  }
  return db;
}

void export_database_csv(const TransientDatabase& db, std::ostream& os) {
  os << "from,to,patch,v_a0_volts,v_b0_volts,sample,v_a_volts,v_b_volts\n";
  char buf[160];
  for (const auto& st : db.stored) {
    for (std::size_t pi = 0; pi < st.patches.size(); ++pi) {
      const auto& pt = st.patches[pi];
      const Patch& p = pt.patch;
      for (int ia = 0; ia < p.na; ++ia) {
        const int ib_max = p.triangular ? ia : p.nb - 1;
        for (int ib = 0; ib <= ib_max; ++ib) {
          const double va0 = p.a_min + ia * p.spacing;
          const double vb0 = p.b_min + ib * p.spacing;
          const double* data =
              pt.data.data() +
              static_cast<std::size_t>(p.stored_index(ia, ib)) *
                  db.k_samples * 2;
          for (int j = 0; j < db.k_samples; ++j) {
            std::snprintf(buf, sizeof buf,
                          "%s,%s,%zu,%.17g,%.17g,%d,%.17g,%.17g\n",
                          protocol::to_string(st.from),
                          protocol::to_string(st.to), pi, va0, vb0, j,
                          data[2 * j], data[2 * j + 1]);
            os << buf;
          }
        }
      }
    }
  }
}

MatchResult match_transient(const circuit::WireTrace& observed,
                            const TransientDatabase& db, int decimation) {
  if (decimation < 1)
    throw config_error("match_transient: decimation must be >= 1");
  const int k_eff =
      std::min<int>(db.k_samples, static_cast<int>(observed.size()));
  MatchResult best;
  if (k_eff < 1) return best;
  const double va0 = observed.v_a[0];
  const double vb0 = observed.v_b[0];
  std::vector<TemplateRef> refs;
  for (const auto& t : all_transitions()) {
    refs.clear();
    collect_candidates(db, t.first, t.second, va0, vb0, refs);
    for (const auto& ref : refs) {
      const double d = window_ssd(observed, ref, k_eff, decimation);
      if (!best.valid || d < best.distance) {
        best.valid = true;
        best.from = t.first;
        best.to = t.second;
        best.distance = d;
      }
    }
  }
  return best;
}

std::vector<SteadyGuess> steady_eve(
    const std::vector<protocol::BEPRecord>& records, double threshold,
    std::uint64_t eve_seed) {
  if (threshold <= 0.0) throw config_error("steady_eve: threshold must be > 0");
  std::mt19937_64 rng(eve_seed);
  std::vector<SteadyGuess> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    SteadyGuess g;
    g.bit = static_cast<int>(rng() & 1u);
    if (std::fabs(rec.correlation_estimate) > threshold) {
      g.situation = rec.correlation_estimate < 0.0 ? BitSituation::LL
                                                   : BitSituation::HH;
      g.bit.reset();  // insecure situations carry no key bit
    }
    out.push_back(g);
  }
  return out;
}

AttackReport transient_attack(const std::vector<circuit::WireTrace>& windows,
                              const std::vector<double>& correlations,
                              double threshold,
                              const protocol::TruthTable& table,
                              const TransientDatabase& db,
                              const AttackParams& params,
                              std::uint64_t expected_fingerprint) {
  if (db.fingerprint != expected_fingerprint)
    throw fingerprint_mismatch(
        "transient database was built for different circuit parameters");
  if (windows.size() != correlations.size())
    throw config_error("transient_attack: windows/correlations size mismatch");
  if (threshold <= 0.0)
    throw config_error("transient_attack: threshold must be > 0");
  const std::size_t n = windows.size();
  AttackReport report;
  report.guesses.resize(n);
  if (n == 0) return report;

  std::mt19937_64 rng(params.eve_seed);
  std::vector<int> coins(n);
  for (auto& c : coins) c = static_cast<int>(rng() & 1u);

  std::vector<BitSituation> shat(n, BitSituation::LL);
  std::vector<bool> pinned(n, false), matched(n, false);
  std::vector<double> dist(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(correlations[i]) > threshold) {
      pinned[i] = true;
      shat[i] =
          correlations[i] < 0.0 ? BitSituation::LL : BitSituation::HH;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (pinned[i]) continue;
    if (i == 0 || windows[i].size() == 0) {
      // No usable predecessor information; seed the chain with a coin.
      shat[i] = coins[i] == table.lh ? BitSituation::LH : BitSituation::HL;
      continue;
    }
    const BitSituation prev = shat[i - 1];
    const auto& w = windows[i];
    const int k_eff = std::min<int>(db.k_samples, static_cast<int>(w.size()));
    const double va0 = w.v_a[0];
    const double vb0 = w.v_b[0];
    double best_d = inf;
    BitSituation best_to = prev;
    std::vector<TemplateRef> refs;
    for (int si = 0; si < 4; ++si) {
      const auto s = static_cast<BitSituation>(si);
      if (s == prev) continue;
      refs.clear();
      collect_candidates(db, prev, s, va0, vb0, refs);
      for (const auto& ref : refs) {
        const double d = window_ssd(w, ref, k_eff, params.eve_decimation);
        if (d < best_d) {
          best_d = d;
          best_to = s;
        }
      }
    }
    // Synthetic no-change candidate: the frozen dynamics hold the entry
    // point exactly when the gains do not move. Ties go to the stored
    // transitions.
    double flat = 0.0;
    for (int j = 0; j < k_eff; j += params.eve_decimation) {
      const double da = w.v_a[static_cast<std::size_t>(j)] - va0;
      const double db_ = w.v_b[static_cast<std::size_t>(j)] - vb0;
      flat += da * da + db_ * db_;
    }
    if (flat < best_d) {
      best_d = flat;
      best_to = prev;
    }
    shat[i] = best_to;
    dist[i] = best_d;
    matched[i] = true;
  }

  std::vector<double> matched_dists;
  for (std::size_t i = 0; i < n; ++i)
    if (matched[i]) matched_dists.push_back(dist[i]);
  double ceiling = inf;
  if (!matched_dists.empty()) {
    const std::size_t mid = matched_dists.size() / 2;
    std::nth_element(matched_dists.begin(), matched_dists.begin() + mid,
                     matched_dists.end());
    ceiling = params.abstention_factor * matched_dists[mid];
  }

  for (std::size_t i = 0; i < n; ++i) {
    BoundaryGuess& g = report.guesses[i];
    g.index = static_cast<std::int64_t>(i);
    g.from = i > 0 ? shat[i - 1] : shat[0];
    g.to = shat[i];
    g.distance = matched[i] ? dist[i] : 0.0;
    g.matched = matched[i];
    if (matched[i] && dist[i] > ceiling) {
      g.abstained = true;
      ++report.abstentions;
    }
    if (protocol::is_secure(shat[i]) && !g.abstained)
      g.bit_guess = extract_bit(shat[i], table);
    else
      g.bit_guess = coins[i];
  }
  return report;
}

EvalSummary evaluate(const std::vector<int>& guess_bits,
                     const std::vector<int>& truth_bits) {
  if (guess_bits.size() != truth_bits.size())
    throw domain_error("evaluate: guess/truth length mismatch");
  if (guess_bits.empty()) throw domain_error("evaluate: empty input");
  EvalSummary s;
  s.n = static_cast<std::int64_t>(guess_bits.size());
  for (std::size_t i = 0; i < guess_bits.size(); ++i)
    if (guess_bits[i] == truth_bits[i]) ++s.correct;
  s.accuracy = static_cast<double>(s.correct) / static_cast<double>(s.n);
  s.wilson95 = stats::wilson_interval(static_cast<std::uint64_t>(s.correct),
                                      static_cast<std::uint64_t>(s.n));
  s.p_value_vs_half = stats::binomial_test_greater(
      static_cast<std::uint64_t>(s.correct), static_cast<std::uint64_t>(s.n),
      0.5);
  return s;
}

EvalSummary evaluate_against(AttackReport& report,
                             const protocol::KeySession& session) {
  const auto& records = session.records;
  if (report.guesses.size() != records.size())
    throw domain_error("evaluate_against: report/session size mismatch");
  std::vector<int> guess_bits, truth_bits;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].bit) continue;
    truth_bits.push_back(*records[i].bit);
    guess_bits.push_back(report.guesses[i].bit_guess.value_or(0));
  }
  const EvalSummary s = evaluate(guess_bits, truth_bits);
  report.n_evaluated = s.n;
  report.n_correct = s.correct;
  report.accuracy = s.accuracy;
  report.wilson95 = s.wilson95;
  report.p_value_vs_half = s.p_value_vs_half;
  BitSituation prev_truth = BitSituation::LL;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const BitSituation truth = protocol::make_situation(
        records[i].alice_choice, records[i].bob_choice);
    if (i > 0) {
      const int ti = 4 * situation_index(prev_truth) + situation_index(truth);
      const int gi = 4 * situation_index(report.guesses[i].from) +
                     situation_index(report.guesses[i].to);
      ++report.transition_confusion[static_cast<std::size_t>(ti)]
                                   [static_cast<std::size_t>(gi)];
    }
    prev_truth = truth;
  }
  return s;
}

EvalSummary evaluate_steady(const std::vector<SteadyGuess>& guesses,
                            const protocol::KeySession& session) {
  const auto& records = session.records;
  if (guesses.size() != records.size())
    throw domain_error("evaluate_steady: guesses/session size mismatch");
  std::vector<int> guess_bits, truth_bits;
  std::mt19937_64 fallback(0x9e3779b97f4a7c15ull);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].bit) continue;
    truth_bits.push_back(*records[i].bit);
    guess_bits.push_back(guesses[i].bit ? *guesses[i].bit
                                        : static_cast<int>(fallback() & 1u));
  }
  return evaluate(guess_bits, truth_bits);
}

}  // namespace ckx::attack
