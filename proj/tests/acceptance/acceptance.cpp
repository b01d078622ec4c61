// Acceptance criteria 1-10. Runs `opnorm verify --seed 42 --json` twice,
// reports criteria 1-9 from the first run and compares both runs (timing
// removed) for criterion 10. Exit status 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace {

using nlohmann::json;
using opnorm::cli::run_cli;
using opnorm::cli::strip_timing;

const std::map<int, std::string> kTitles = {
    {1, "dec = cb agreement (SDP upper vs see-saw lower)"},
    {2, "factorization certificates"},
    {3, "closed forms (scalar, unitary, trace norm)"},
    {4, "self-adjoint decomposition = dec"},
    {5, "inequality suite"},
    {6, "direct sums"},
    {7, "nuclearity gap on free tensors"},
    {8, "multiplicative domains"},
    {9, "conic solver validation"},
    {10, "determinism of verify --seed 42"},
};

struct VerifyRun {
  int code = 0;
  json report;
  double seconds = 0.0;
};

VerifyRun verify(const std::vector<std::string>& extra) {
  std::vector<std::string> args = {"opnorm", "verify", "--seed", "42", "--json"};
  args.insert(args.end(), extra.begin(), extra.end());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  VerifyRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!err.str().empty()) std::cerr << err.str();
  r.report = json::parse(out.str());
  return r;
}

void print_line(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %-48s %s\n", criterion, pass ? "PASS" : "FAIL", kTitles.at(criterion).c_str(),
              detail.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  // Extra arguments (e.g. --profile quick) are forwarded to verify.
  std::vector<std::string> extra(argv + 1, argv + argc);

  const VerifyRun first = verify(extra);
  const VerifyRun second = verify(extra);

  bool all = true;
  for (int c = 1; c <= 9; ++c) {
    int checks = 0, failed = 0, instances = 0;
    std::string first_failure;
    std::ostringstream worst;
    for (const auto& chk : first.report["checks"]) {
      if (chk["criterion"].get<int>() != c) continue;
      ++checks;
      instances += chk["instances"].get<int>();
      char buf[160];
      std::snprintf(buf, sizeof buf, " %s=%.2e (%s)", chk["id"].get<std::string>().c_str(), chk["worst"].get<double>(),
                    chk["tolerance"].get<std::string>().c_str());
      worst << buf;
      if (chk["verdict"] != "pass") {
        ++failed;
        if (first_failure.empty()) {
          first_failure = chk["id"].get<std::string>() + ": " + chk.value("first_failure", std::string("no instances"));
        }
      }
    }
    const bool pass = checks > 0 && failed == 0;
    all = all && pass;
    std::string detail = "[" + std::to_string(instances) + " obs]" + worst.str();
    if (!pass) detail += "  first failure: " + (checks ? first_failure : std::string("no checks ran"));
    print_line(c, pass, detail);
  }

  const std::string a = strip_timing(first.report).dump();
  const std::string b = strip_timing(second.report).dump();
  const bool same = a == b && first.code == second.code;
  all = all && same;
  char buf[128];
  std::snprintf(buf, sizeof buf, "[2 runs] identical verdicts and residuals: %s; run times %.1f s, %.1f s",
                same ? "yes" : "no", first.seconds, second.seconds);
  print_line(10, same, buf);

  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
