#pragma once

// The twelve acceptance criteria, shared by the acceptance test binary and
// the `verify` command.

#include <cstdint>
#include <string>
#include <vector>

#include "indet/jacobi.hpp"

namespace indet {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;  ///< worst value of the primary quantity
  double tol = 0.0;
  std::size_t N = 0;      ///< truncation used (largest, when several)
  std::string detail;     ///< secondary measurements
};

struct AcceptanceConfig {
  JacobiCoefficients src = JacobiCoefficients::power_law(2.0);
  TruncationPolicy pol;
  std::uint64_t seed = 20240601;
};

inline constexpr int kCriteria = 12;

/// Runs criterion `id` (1..12). Exceptions are caught and reported as a
/// failure carrying the message.
CheckResult run_criterion(int id, const AcceptanceConfig& cfg);
std::vector<CheckResult> run_acceptance(const AcceptanceConfig& cfg);

/// "PASS  3 three-point ... measured=... tol=... N=..." on one line.
std::string format_check(const CheckResult& r);

}  // namespace indet
