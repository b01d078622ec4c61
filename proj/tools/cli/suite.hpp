#pragma once

// Seeded property corpus behind `opnorm verify` and the acceptance binary.
// Every random instance draws from SeededGenerator(seed).fork(check).fork(i),
// so results do not depend on thread count or scheduling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace opnorm::cli {

enum class Profile { quick, full };

std::string to_string(Profile p);
Profile profile_from_string(const std::string& s);

/// Deliberate defects for the negative-control harness.
enum class Regression {
  none,
  /// See-saw restricted to K = 1 with no escalation.
  seesaw_k1,
};

struct VerifyConfig {
  std::uint64_t seed = 42;
  Profile profile = Profile::full;
  /// Replaces the instance count of every randomized check.
  std::optional<int> instances;
  int threads = 1;
  Regression regression = Regression::none;
};

struct CheckResult {
  std::string id;
  /// Acceptance criterion number, 0 for module properties.
  int criterion = 0;
  std::string title;
  /// What `worst` measures, e.g. "max relative gap".
  std::string statistic;
  std::string tolerance;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;
  std::string first_failure;
  double seconds = 0.0;

  bool passed() const { return failures == 0 && instances > 0; }
};

struct SuiteReport {
  VerifyConfig config;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool all_passed() const;
  /// Checks belonging to one criterion.
  std::vector<const CheckResult*> criterion(int number) const;
};

SuiteReport run_suite(const VerifyConfig& config);

nlohmann::json suite_to_json(const SuiteReport& report, bool include_timing = true);
std::string render_table(const SuiteReport& report);

/// OPNORM_THREADS if set to a positive integer, else 1.
int default_thread_count();

}  // namespace opnorm::cli
