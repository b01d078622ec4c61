#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

namespace opnorm::cli {
namespace {

using nlohmann::json;

std::string data(const std::string& name) { return std::string(OPNORM_TEST_DATA_DIR) + "/" + name; }

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "opnorm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json base_instance() {
  return json::parse(R"({"version": "opnorm-instance/1", "kind": "dec_linf", "algebra": [1],
                         "elements": [[[[[1, 0]]]], [[[[0, 1]]]]]})");
}

TEST(Instance, ParsesAndDigestsCanonically) {
  const Instance a = parse_instance(base_instance());
  EXPECT_EQ(a.elements.size(), 2u);
  EXPECT_EQ(a.digest.rfind("fnv1a64:", 0), 0u);
  const Instance b = parse_instance(instance_to_json(a));
  EXPECT_EQ(a.digest, b.digest);
}

TEST(Instance, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Instance, RejectsUnknownKey) {
  json j = base_instance();
  j["extra"] = 1;
  try {
    parse_instance(j);
    FAIL() << "accepted an unknown key";
  } catch (const ValidationError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("extra", 0), 0u);
  }
}

TEST(Instance, RejectsBadVersionAndKind) {
  json j = base_instance();
  j["version"] = "opnorm-instance/0";
  EXPECT_THROW(parse_instance(j), ValidationError);
  j = base_instance();
  j["kind"] = "diamond";
  EXPECT_THROW(parse_instance(j), ValidationError);
}

TEST(Instance, KindSpecificValidation) {
  json j = base_instance();
  j["kind"] = "selfadjoint_dec";
  EXPECT_THROW(parse_instance(j), ValidationError);

  j = base_instance();
  j["kind"] = "cb_linf";
  j["algebra"] = {1, 1};
  j["elements"] = json::parse(R"([[[[[1, 0]]], [[[1, 0]]]]])");
  EXPECT_THROW(parse_instance(j), ValidationError);

  const json nonunital = json::parse(R"({"version": "opnorm-instance/1", "kind": "mult_domain",
      "domain": [1], "codomain": [1], "images": [[[[[2, 0]]]]]})");
  EXPECT_THROW(parse_instance(nonunital), ValidationError);
}

TEST(Cli, ScalarInstanceReportsSix) {
  const CliRun r = run({"norm", data("scalar_l1.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_NEAR(rep["result"]["value"].get<double>(), 6.0, 1e-8);
  EXPECT_LT(rep["certificate"]["reconstruction_residual"].get<double>(), 1e-6);
  EXPECT_EQ(rep["instance"]["kind"], "dec_linf");
  EXPECT_TRUE(rep.contains("timing"));
  EXPECT_TRUE(rep.contains("version"));
}

TEST(Cli, FreeTensorIdentity) {
  const CliRun r = run({"norm", data("free_tensor_identity.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(r.out);
  EXPECT_NEAR(rep["result"]["max"].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(rep["result"]["min_upper"].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(rep["result"]["min_lower"].get<double>(), 1.0, 1e-8);
}

TEST(Cli, EveryKindRuns) {
  for (const char* f : {"cb_pauli.json", "selfadjoint_pair.json", "trace_norm_map.json", "pinching_m3.json"}) {
    const CliRun r = run({"norm", data(f), "--text"});
    EXPECT_EQ(r.code, 0) << f << ": " << r.err;
    EXPECT_NE(r.out.find("result:"), std::string::npos) << f;
  }
  const json tn = json::parse(run({"norm", data("trace_norm_map.json"), "--json"}).out);
  EXPECT_NEAR(tn["result"]["value"].get<double>(), 2.0 * std::sqrt(2.0), 1e-7);
  const json pin = json::parse(run({"norm", data("pinching_m3.json"), "--json"}).out);
  EXPECT_EQ(pin["result"]["dimension"], 3);
}

TEST(Cli, ReportIsDeterministicModuloTiming) {
  const CliRun a = run({"norm", data("cb_pauli.json"), "--json", "--seed", "3"});
  const CliRun b = run({"norm", data("cb_pauli.json"), "--json", "--seed", "3"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(strip_timing(json::parse(a.out)).dump(), strip_timing(json::parse(b.out)).dump());
}

TEST(Cli, MalformedDimensionsExitTwoNamingField) {
  const CliRun r = run({"norm", data("malformed_dims.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("elements[0][0][1]"), std::string::npos) << r.err;
}

TEST(Cli, MissingFileAndBadFlagsExitTwo) {
  EXPECT_EQ(run({"norm", data("does_not_exist.json")}).code, 2);
  EXPECT_EQ(run({"norm", data("scalar_l1.json"), "--K", "0"}).code, 2);
  EXPECT_EQ(run({"norm", data("scalar_l1.json"), "--json", "--text"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST(Cli, ReportToFile) {
  const auto path = std::filesystem::temp_directory_path() / "opnorm_cli_report.json";
  const CliRun r = run({"norm", data("scalar_l1.json"), "--json", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  EXPECT_NEAR(json::parse(in)["result"]["value"].get<double>(), 6.0, 1e-8);
  std::filesystem::remove(path);
}

TEST(Cli, BenchSizes) {
  EXPECT_EQ(run({"bench", "--sizes", ""}).code, 2);
  EXPECT_EQ(run({"bench", "--sizes", "3y2"}).code, 2);
  const auto sizes = parse_sizes("3x2,4x3");
  ASSERT_EQ(sizes.size(), 2u);
  EXPECT_EQ(sizes[1], std::make_pair(4, 3));
  const CliRun r = run({"bench", "--sizes", "3x2", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["rows"].size(), 1u);
}

TEST(Cli, VerifyIsDeterministicAcrossThreads) {
  const CliRun a = run({"verify", "--profile", "quick", "--instances", "2", "--json"});
  const CliRun b = run({"verify", "--profile", "quick", "--instances", "2", "--json", "--threads", "3"});
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(strip_timing(json::parse(a.out)).dump(), strip_timing(json::parse(b.out)).dump());
}

TEST(Cli, InjectedRegressionFailsAgreement) {
  const CliRun r = run({"verify", "--profile", "quick", "--inject-regression", "seesaw-k1", "--json"});
  EXPECT_EQ(r.code, 1);
  const json rep = json::parse(r.out);
  bool c1_failed = false;
  for (const auto& c : rep["checks"]) {
    if (c["id"] == "C1.dec-cb-agreement") c1_failed = c["verdict"] == "fail";
  }
  EXPECT_TRUE(c1_failed);
}

}  // namespace
}  // namespace opnorm::cli
