#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "finito/theory.hpp"
#include "finito/types.hpp"

namespace finito::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDivergence = 2,
  kVerificationFailure = 3,
};

/// Entry point of the `finito` tool; argv[0] is the program name.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::string suite = "all";  // inequalities, lyapunov, rate, lowerbound, all
  std::optional<Index> n;     // per-suite default when unset
  std::optional<Index> d;
  double beta = 2.0;
  double alpha = 2.0;
  std::optional<long> draws;  // states, draws, seeds or trials depending on suite
  std::uint64_t seed = 1;
  bool diagnostics = false;
};

/// Runs the requested suites. Informational rows (term diagnostics) go to
/// `diagnostics` when it is non-null and never count as failures.
std::vector<theory::CheckReport> verify(const VerifyOptions& options,
                                        std::vector<theory::CheckReport>* diagnostics = nullptr);

inline constexpr std::string_view kReportHeader =
    "name,context,lhs,rhs,slack,tolerance,satisfied";

void write_reports(std::ostream& out, const std::vector<theory::CheckReport>& reports);

/// Median with +inf for missing cells; the mean of the two middle values for
/// an even count.
double median(std::vector<double> values);

}  // namespace finito::cli
