#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "report.hpp"
#include "suite.hpp"

namespace opnorm::cli {

enum ExitCode : int {
  kExitOk = 0,
  /// `verify` found a failing check.
  kExitChecksFailed = 1,
  kExitValidation = 2,
  kExitSolver = 3,
};

struct OutputOptions {
  bool json = false;
  /// Write the report here instead of `out`.
  std::optional<std::string> path;
};

int cmd_norm(const std::string& instance_path, const NormFlags& flags, const OutputOptions& output, std::ostream& out,
             std::ostream& err);

int cmd_verify(const VerifyConfig& config, const OutputOptions& output, std::ostream& out, std::ostream& err);

/// "3x2,4x3" -> {(3, 2), (4, 3)}; throws ValidationError on an empty or
/// malformed list.
std::vector<std::pair<int, int>> parse_sizes(const std::string& list);

int cmd_bench(const std::string& sizes, std::uint64_t seed, const OutputOptions& output, std::ostream& out,
              std::ostream& err);

/// Full command line, as `opnorm` sees it.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opnorm::cli
