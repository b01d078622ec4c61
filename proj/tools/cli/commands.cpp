#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opnorm/cbminnorm.hpp"
#include "opnorm/random.hpp"
#include "opnorm/version.hpp"

namespace opnorm::cli {

namespace {

bool emit(const std::string& text, const OutputOptions& output, std::ostream& out, std::ostream& err) {
  if (!output.path) {
    out << text;
    return true;
  }
  std::ofstream f(*output.path);
  if (!f || !(f << text)) {
    err << "error: cannot write '" << *output.path << "'\n";
    return false;
  }
  return true;
}

}  // namespace

int cmd_norm(const std::string& instance_path, const NormFlags& flags, const OutputOptions& output, std::ostream& out,
             std::ostream& err) {
  Instance inst;
  try {
    inst = load_instance(instance_path);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }

  NormOutcome outcome;
  try {
    outcome = compute_report(inst, flags);
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }

  const std::string text = output.json ? outcome.report.dump(2) + "\n" : render_text(outcome.report);
  if (!emit(text, output, out, err)) return kExitValidation;
  if (outcome.flagged) {
    err << "solver failure: certificate residuals exceed 1e-5\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_verify(const VerifyConfig& config, const OutputOptions& output, std::ostream& out, std::ostream& err) {
  const SuiteReport report = run_suite(config);
  const std::string text = output.json ? suite_to_json(report).dump(2) + "\n" : render_table(report);
  if (!emit(text, output, out, err)) return kExitValidation;
  return report.all_passed() ? kExitOk : kExitChecksFailed;
}

std::vector<std::pair<int, int>> parse_sizes(const std::string& list) {
  std::vector<std::pair<int, int>> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int n = 0, d = 0;
    char x = 0, extra = 0;
    if (std::sscanf(item.c_str(), "%d%c%d%c", &n, &x, &d, &extra) != 3 || x != 'x' || n < 1 || d < 1 || n > 64 ||
        d > 64) {
      throw ValidationError("sizes: '" + item + "' is not of the form NxD with 1 <= N, D <= 64");
    }
    sizes.emplace_back(n, d);
  }
  if (sizes.empty()) throw ValidationError("sizes: empty size list");
  return sizes;
}

int cmd_bench(const std::string& sizes, std::uint64_t seed, const OutputOptions& output, std::ostream& out,
              std::ostream& err) {
  std::vector<std::pair<int, int>> grid;
  try {
    grid = parse_sizes(sizes);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  using Clock = std::chrono::steady_clock;
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream table;
  char line[256];
  std::snprintf(line, sizeof line, "%3s %3s %12s %6s %12s %8s %14s %14s\n", "n", "d", "sdp_seconds", "iters",
                "seesaw_sec", "sweeps", "upper", "lower");
  table << line;
  for (const auto& [n, d] : grid) {
    SeededGenerator g = SeededGenerator(seed).fork(static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(d));
    std::vector<ComplexMatrix> x;
    for (int j = 0; j < n; ++j) x.push_back(random_ginibre(g, d, d));
    std::vector<AlgebraElement> xe;
    for (const auto& m : x) xe.push_back(AlgebraElement::from_matrix(m));

    auto t0 = Clock::now();
    const DecCertificate c = dec_norm_linf(xe);
    const double sdp_s = std::chrono::duration<double>(Clock::now() - t0).count();
    SeeSawOptions so;
    so.seed = seed;
    t0 = Clock::now();
    const SeeSawResult s = seesaw_min_norm(x, so);
    const double ss_s = std::chrono::duration<double>(Clock::now() - t0).count();

    std::snprintf(line, sizeof line, "%3d %3d %12.4f %6d %12.4f %8d %14.10f %14.10f\n", n, d, sdp_s,
                  c.solver_iterations, ss_s, s.iterations, c.value, s.lower_bound);
    table << line;
    rows.push_back({{"n", n},
                    {"d", d},
                    {"upper", c.value},
                    {"lower", s.lower_bound},
                    {"sdp_iterations", c.solver_iterations},
                    {"seesaw_sweeps", s.iterations},
                    {"timing", {{"sdp_seconds", sdp_s}, {"seesaw_seconds", ss_s}}}});
  }
  nlohmann::json j = {{"toolkit", "opnorm"}, {"version", kVersionString}, {"command", "bench"}, {"seed", seed},
                      {"rows", rows}};
  const std::string text = output.json ? j.dump(2) + "\n" : table.str();
  return emit(text, output, out, err) ? kExitOk : kExitValidation;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decomposable and completely bounded norms of maps between finite-dimensional C*-algebras"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);

  std::string instance_path;
  NormFlags nflags;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int k = 0, restarts = 0;
  bool as_json = false, as_text = false;
  std::string out_path;
  auto* norm = app.add_subcommand("norm", "Compute the norm described by an instance file");
  norm->add_option("instance", instance_path, "Instance JSON file")->required();
  auto* o_tol = norm->add_option("--tol", tol, "Solver tolerance")->check(CLI::PositiveNumber);
  auto* o_seed = norm->add_option("--seed", seed, "See-saw / sampling seed");
  auto* o_k = norm->add_option("--K", k, "See-saw unitary dimension")->check(CLI::PositiveNumber);
  auto* o_r = norm->add_option("--restarts", restarts, "See-saw restarts")->check(CLI::PositiveNumber);
  auto* f_json = norm->add_flag("--json", as_json, "JSON report");
  norm->add_flag("--text", as_text, "Text report (default)")->excludes(f_json);
  norm->add_option("--out", out_path, "Write the report to this file");

  VerifyConfig vcfg;
  vcfg.threads = default_thread_count();
  std::string profile = "full";
  int instances = 0;
  bool v_json = false;
  std::string v_out, regression;
  auto* verify = app.add_subcommand("verify", "Run the seeded property and acceptance suite");
  verify->add_option("--seed", vcfg.seed, "Corpus seed")->capture_default_str();
  auto* o_inst = verify->add_option("--instances", instances, "Instances per randomized check")
                     ->check(CLI::NonNegativeNumber);
  verify->add_option("--profile", profile, "quick or full")->check(CLI::IsMember({"quick", "full"}))->capture_default_str();
  verify->add_option("--threads", vcfg.threads, "Worker threads (default: OPNORM_THREADS or 1)")
      ->check(CLI::Range(1, 256));
  verify->add_flag("--json", v_json, "JSON summary");
  verify->add_option("--out", v_out, "Write the summary to this file");
  verify->add_option("--inject-regression", regression)->check(CLI::IsMember({"seesaw-k1"}))->group("");

  std::string sizes;
  std::uint64_t b_seed = 0;
  bool b_json = false;
  std::string b_out;
  auto* bench = app.add_subcommand("bench", "Time the SDP and the see-saw on a seeded (n, d) grid");
  bench->add_option("--sizes", sizes, "Comma-separated NxD list, e.g. 3x2,4x3")->required();
  bench->add_option("--seed", b_seed, "Corpus seed");
  bench->add_flag("--json", b_json, "JSON table");
  bench->add_option("--out", b_out, "Write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (norm->parsed()) {
    if (*o_tol) nflags.tol = tol;
    if (*o_seed) nflags.seed = seed;
    if (*o_k) nflags.K = k;
    if (*o_r) nflags.restarts = restarts;
    OutputOptions output{as_json, out_path.empty() ? std::nullopt : std::optional<std::string>(out_path)};
    return cmd_norm(instance_path, nflags, output, out, err);
  }
  if (verify->parsed()) {
    vcfg.profile = profile_from_string(profile);
    if (*o_inst) vcfg.instances = instances;
    if (regression == "seesaw-k1") vcfg.regression = Regression::seesaw_k1;
    OutputOptions output{v_json, v_out.empty() ? std::nullopt : std::optional<std::string>(v_out)};
    return cmd_verify(vcfg, output, out, err);
  }
  OutputOptions output{b_json, b_out.empty() ? std::nullopt : std::optional<std::string>(b_out)};
  return cmd_bench(sizes, b_seed, output, out, err);
}

}  // namespace opnorm::cli
