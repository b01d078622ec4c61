#pragma once

// Reports for `opnorm norm`: one JSON document per instance, with every
// value next to the residuals of its certificate. Only the "timing" object
// varies between runs with the same instance, flags and seed.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "instance.hpp"

namespace opnorm::cli {

/// Command-line overrides; they take precedence over instance parameters.
struct NormFlags {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> K;
  std::optional<int> restarts;
};

struct NormOutcome {
  nlohmann::json report;
  /// Certificate residuals above their flagging thresholds.
  bool flagged = false;
};

/// Throws SolverFailure / NumericalError from the core modules unchanged.
NormOutcome compute_report(const Instance& inst, const NormFlags& flags);

std::string render_text(const nlohmann::json& report);

/// Copy without the "timing" objects, for byte comparisons.
nlohmann::json strip_timing(nlohmann::json report);

}  // namespace opnorm::cli
