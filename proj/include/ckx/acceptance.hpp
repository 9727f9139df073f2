#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ckx::acceptance {

struct Options {
  // Binary invoked by the reproducibility criterion; empty fails it.
  std::string cli_path;
  // Scratch directory; empty picks one under the system temp directory.
  std::string work_dir;
  // Pinned: the statistically tight criteria are exact-seed checks by design.
  std::uint64_t master_seed = 20260815;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every release criterion in order, streaming one PASS/FAIL line per
// criterion to `progress`.
std::vector<CriterionResult> run_all(const Options& opt,
                                     std::ostream& progress);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace ckx::acceptance
