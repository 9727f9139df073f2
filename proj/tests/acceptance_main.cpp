#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "ckx/acceptance.hpp"

// Release gate: every criterion prints one PASS/FAIL line; nonzero exit on
// any failure.
int main() {
  ckx::acceptance::Options opt;
#ifdef CKX_CLI_BIN
  opt.cli_path = CKX_CLI_BIN;
#endif
  opt.work_dir = (std::filesystem::temp_directory_path() / "ckx-acceptance")
                     .string();
  const auto results = ckx::acceptance::run_all(opt, std::cout);
  const bool ok = ckx::acceptance::all_pass(results);
  std::cout << (ok ? "ALL CRITERIA PASS" : "CRITERIA FAILED") << std::endl;
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
