#include "ckx/session_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ckx/detail/bytes.hpp"
#include "ckx/errors.hpp"

namespace ckx::session_io {

namespace {

constexpr const char* windows_magic = "CKWN1";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode extra = {}) {
  std::ofstream f(path, std::ios::trunc | extra);
  if (!f) throw config_error("cannot write file: " + path);
  return f;
}

const char* pair_name(int idx) {
  static const char* names[16] = {
      "LL>LL", "LL>LH", "LL>HL", "LL>HH", "LH>LL", "LH>LH", "LH>HL", "LH>HH",
      "HL>LL", "HL>LH", "HL>HL", "HL>HH", "HH>LL", "HH>LH", "HH>HL", "HH>HH"};
  return names[idx];
}

}  // namespace

void write_session_csv(const protocol::KeySession& s, std::ostream& os) {
  os << "index,alice_choice,bob_choice,correlation_v2,secure,bit,"
        "alice_inferred,bob_inferred\n";
  for (const auto& r : s.records) {
    os << r.index << ',' << protocol::to_char(r.alice_choice) << ','
       << protocol::to_char(r.bob_choice) << ','
       << fmt(r.correlation_estimate) << ',' << (r.secure ? 1 : 0) << ',';
    if (r.bit) os << *r.bit;
    os << ',' << protocol::to_string(r.alice_inferred) << ','
       << protocol::to_string(r.bob_inferred) << '\n';
  }
}

protocol::KeySession read_session_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index,", 0) != 0)
    throw config_error("session csv: missing header");
  protocol::KeySession s;
  const auto parse_choice = [](const std::string& f) {
    if (f == "L") return protocol::Choice::L;
    if (f == "H") return protocol::Choice::H;
    throw config_error("session csv: bad choice field \"" + f + "\"");
  };
  const auto parse_situation = [](const std::string& f) {
    for (int i = 0; i < 4; ++i) {
      const auto v = static_cast<protocol::BitSituation>(i);
      if (f == protocol::to_string(v)) return v;
    }
    throw config_error("session csv: bad situation field \"" + f + "\"");
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 8)
      throw config_error("session csv: expected 8 fields per row");
    protocol::BEPRecord r;
    try {
      r.index = std::stoll(fields[0]);
      r.correlation_estimate = std::stod(fields[3]);
      r.secure = std::stoi(fields[4]) != 0;
      if (!fields[5].empty()) r.bit = std::stoi(fields[5]);
    } catch (const std::exception&) {
      throw config_error("session csv: bad numeric field in row " +
                         std::to_string(s.records.size()));
    }
    r.alice_choice = parse_choice(fields[1]);
    r.bob_choice = parse_choice(fields[2]);
    r.alice_inferred = parse_situation(fields[6]);
    r.bob_inferred = parse_situation(fields[7]);
    s.records.push_back(r);
  }
  s.summary.n_bep = static_cast<std::int64_t>(s.records.size());
  return s;
}

void write_key(const std::string& key, const std::string& path) {
  auto f = open_out(path);
  f << key << '\n';
}

void write_summary(const protocol::KeySession& s, std::ostream& os) {
  const auto& m = s.summary;
  os << "rounds: " << m.n_bep << '\n'
     << "secure_rounds: " << m.n_secure << '\n'
     << "secure_yield: " << fmt(m.secure_yield) << '\n'
     << "disagreements: " << m.disagreements << '\n'
     << "bit_errors: " << m.bit_errors << '\n'
     << "threshold_volts_sq: " << fmt(s.threshold_volts_sq) << '\n'
     << "counts: LL=" << m.situation_counts[0]
     << " LH=" << m.situation_counts[1] << " HL=" << m.situation_counts[2]
     << " HH=" << m.situation_counts[3] << '\n'
     << "alice_key_bits: " << s.alice_key.size() << '\n'
     << "bob_key_bits: " << s.bob_key.size() << '\n';
}

void write_windows(const protocol::KeySession& s, std::uint64_t fingerprint,
                   const std::string& path) {
  if (s.windows.size() != s.records.size())
    throw domain_error("session windows/records size mismatch");
  std::string out;
  out.append(windows_magic);
  detail::put_u32(out, 1);  // format version
  detail::put_u64(out, fingerprint);
  detail::put_f64(out, s.threshold_volts_sq);
  detail::put_u64(out, s.windows.size());
  for (std::size_t i = 0; i < s.windows.size(); ++i) {
    const auto& w = s.windows[i];
    detail::put_f64(out, s.records[i].correlation_estimate);
    detail::put_f64(out, w.start_time_s);
    detail::put_f64(out, w.sample_period_s);
    detail::put_u8(out, w.decimated ? 1 : 0);
    detail::put_u64(out, w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
      detail::put_f64(out, w.v_a[j]);
      detail::put_f64(out, w.v_b[j]);
    }
  }
  auto f = open_out(path, std::ios::binary);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw config_error("short write to windows file: " + path);
}

WindowsFile load_windows(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open windows file: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 5 || buf.compare(0, 5, windows_magic) != 0)
    throw config_error("not a windows archive: " + path);
  detail::ByteReader r{buf, 5, "windows file"};
  if (r.u32() != 1) throw config_error("unsupported windows format version");
  WindowsFile wf;
  wf.fingerprint = r.u64();
  wf.threshold_volts_sq = r.f64();
  const std::uint64_t n = r.u64();
  wf.correlations.reserve(n);
  wf.windows.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    wf.correlations.push_back(r.f64());
    circuit::WireTrace w;
    w.start_time_s = r.f64();
    w.sample_period_s = r.f64();
    w.decimated = r.u8() != 0;
    const std::uint64_t len = r.u64();
    w.v_a.reserve(len);
    w.v_b.reserve(len);
    for (std::uint64_t j = 0; j < len; ++j) {
      const double a = r.f64();
      const double b = r.f64();
      w.push(a, b);
    }
    wf.windows.push_back(std::move(w));
  }
  return wf;
}

void write_attack_report(const attack::AttackReport& r, std::ostream& os) {
  os << "rounds: " << r.guesses.size() << '\n'
     << "abstentions: " << r.abstentions << '\n'
     << "evaluated_bits: " << r.n_evaluated << '\n'
     << "correct_bits: " << r.n_correct << '\n'
     << "accuracy: " << fmt(r.accuracy) << '\n'
     << "wilson95_low: " << fmt(r.wilson95.lo) << '\n'
     << "wilson95_high: " << fmt(r.wilson95.hi) << '\n'
     << "p_value_vs_half: " << fmt(r.p_value_vs_half) << '\n';
}

void write_attack_guesses_csv(const attack::AttackReport& r,
                              std::ostream& os) {
  os << "index,from,to,distance,matched,abstained,bit_guess\n";
  for (const auto& g : r.guesses) {
    os << g.index << ',' << protocol::to_string(g.from) << ','
       << protocol::to_string(g.to) << ',' << fmt(g.distance) << ','
       << (g.matched ? 1 : 0) << ',' << (g.abstained ? 1 : 0) << ',';
    if (g.bit_guess) os << *g.bit_guess;
    os << '\n';
  }
}

void write_confusion_csv(const attack::AttackReport& r, std::ostream& os) {
  os << "true_pair";
  for (int c = 0; c < 16; ++c) os << ',' << pair_name(c);
  os << '\n';
  for (int t = 0; t < 16; ++t) {
    os << pair_name(t);
    for (int c = 0; c < 16; ++c)
      os << ','
         << r.transition_confusion[static_cast<std::size_t>(t)]
                                  [static_cast<std::size_t>(c)];
    os << '\n';
  }
}

void save_session(const protocol::KeySession& s, std::uint64_t fingerprint,
                  const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "transitions", ec);
  if (ec) throw config_error("cannot create output directory: " + dir);
  {
    auto f = open_out(dir + "/session.csv");
    write_session_csv(s, f);
  }
  write_key(s.alice_key, dir + "/alice_key.txt");
  write_key(s.bob_key, dir + "/bob_key.txt");
  {
    auto f = open_out(dir + "/summary.txt");
    write_summary(s, f);
  }
  write_windows(s, fingerprint, dir + "/windows.bin");
  for (std::size_t i = 0; i < s.windows.size(); ++i) {
    auto f = open_out(dir + "/transitions/transition_" + std::to_string(i) +
                      ".csv");
    circuit::write_csv(s.windows[i], f);
  }
}

}  // namespace ckx::session_io
