#pragma once

#include <stdexcept>
#include <string>

namespace ckx {

// Bad parameter values or inconsistent configuration. CLI exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematical domain violations (negative temperature, non-cold gain
// product, singular gain product and the like).
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical faults during simulation (non-finite state). CLI exit code 3.
struct simulation_fault : std::runtime_error {
  explicit simulation_fault(const std::string& msg) : std::runtime_error(msg) {}
};

// Attacking a session with a database built for different circuit
// parameters. CLI exit code 4.
struct fingerprint_mismatch : std::runtime_error {
  explicit fingerprint_mismatch(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace ckx
