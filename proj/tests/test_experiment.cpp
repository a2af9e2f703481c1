#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using namespace derivlab;

namespace {

ExperimentConfig small_config(Suite suite) {
  ExperimentConfig cfg;
  cfg.suite = suite;
  cfg.dims = {2, 3, 4};
  cfg.instances = 2;
  return cfg;
}

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "derivlab_test_experiment";
  std::filesystem::create_directories(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ParseDims, RangesAndLists) {
  EXPECT_EQ(parse_dims("2..5"), (std::vector<Index>{2, 3, 4, 5}));
  EXPECT_EQ(parse_dims("3,5,8"), (std::vector<Index>{3, 5, 8}));
  EXPECT_EQ(parse_dims("2..3,7"), (std::vector<Index>{2, 3, 7}));
  EXPECT_EQ(code_of([] { parse_dims("5..2"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_dims("x"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_dims(""); }), ErrorCode::ConfigInvalid);
}

TEST(ParseTolerances, OverridesDefaults) {
  const ToleranceMap t = parse_tolerances("rank=1e-12,subspace=2e-8");
  EXPECT_DOUBLE_EQ(t.at("rank"), 1e-12);
  EXPECT_DOUBLE_EQ(t.at("subspace"), 2e-8);
  EXPECT_DOUBLE_EQ(t.at("flow"), default_tolerances().at("flow"));
  EXPECT_EQ(code_of([] { parse_tolerances("bogus=1"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_tolerances("rank"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_tolerances("rank=abc"); }), ErrorCode::ConfigInvalid);
}

TEST(Validate, RejectsOutOfRangeValues) {
  ExperimentConfig cfg = small_config(Suite::kernel_stab);
  cfg.n_max = 1;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::ConfigInvalid);
  cfg.n_max = 9;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::ConfigInvalid);
  cfg = small_config(Suite::kernel_stab);
  cfg.dims = {1};
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::ConfigInvalid);
  cfg.dims = {65};
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::ConfigInvalid);
  cfg = small_config(Suite::kernel_stab);
  cfg.tolerances["rank"] = 0.0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::ConfigInvalid);
  cfg = small_config(Suite::kernel_stab);
  cfg.tolerances["unknown"] = 1.0;
  EXPECT_EQ(code_of([&] { validate(cfg); }), ErrorCode::ConfigInvalid);
  EXPECT_NO_THROW(validate(small_config(Suite::all)));
}

TEST(ParseSuite, Names) {
  EXPECT_EQ(parse_suite("br_gns"), Suite::br_gns);
  EXPECT_EQ(parse_suite("all"), Suite::all);
  EXPECT_EQ(code_of([] { parse_suite("none"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(parse_format("csv"), OutputFormat::csv);
  EXPECT_EQ(code_of([] { parse_format("xml"); }), ErrorCode::ConfigInvalid);
}

TEST(DiagonalFormula, ExactIntegerAgreement) {
  Xoshiro256 rng(91);
  for (Index n = 2; n <= 12; ++n) {
    const DiagonalFormulaResult r = diagonal_formula_check(n, 4, rng);
    EXPECT_TRUE(r.exact) << n;
    EXPECT_EQ(r.max_abs_diff, 0.0);
  }
}

TEST(InstanceMultiplicities, FirstIsSimpleSecondIsRepeated) {
  Xoshiro256 rng(92);
  for (Index n = 2; n <= 12; ++n) {
    EXPECT_EQ(instance_multiplicities(n, 0, rng), std::vector<Index>(static_cast<std::size_t>(n), 1));
    const auto m = instance_multiplicities(n, 1, rng);
    EXPECT_TRUE(std::any_of(m.begin(), m.end(), [](Index v) { return v > 1; }));
  }
}

TEST(RunExperiment, KernelStabilizationDimensionThree) {
  ExperimentConfig cfg = small_config(Suite::kernel_stab);
  cfg.dims = {3};
  cfg.seed = 7;
  const RunOutcome out = run_experiment(cfg);
  EXPECT_EQ(out.exit_code, 0);
  ASSERT_FALSE(out.report.checks.empty());
  for (const auto& c : out.report.checks) {
    EXPECT_TRUE(c.pass) << c.id;
    if (c.id.starts_with("kernel_stab/stabilization/")) {
      const auto dims = c.details["kernel_dims"].get<std::vector<Index>>();
      EXPECT_TRUE(std::all_of(dims.begin(), dims.end(), [&](Index d) { return d == dims.front(); }));
    }
  }
}

TEST(RunExperiment, EverySuitePassesOnSmallDimensions) {
  for (Suite s : {Suite::kernel_stab, Suite::commutant_identity, Suite::br_gns, Suite::heisenberg}) {
    const RunOutcome out = run_experiment(small_config(s));
    EXPECT_EQ(out.exit_code, 0) << to_string(s);
    for (const auto& c : out.report.checks) {
      EXPECT_TRUE(c.pass) << c.id;
      EXPECT_EQ(c.suite, to_string(s));
    }
  }
}

TEST(RunExperiment, DeterministicContent) {
  ExperimentConfig cfg = small_config(Suite::all);
  cfg.seed = 1234;
  const nlohmann::json a = run_experiment(cfg).report.content_json();
  const nlohmann::json b = run_experiment(cfg).report.content_json();
  EXPECT_EQ(a.dump(), b.dump());
  cfg.seed = 1235;
  EXPECT_NE(run_experiment(cfg).report.content_json().dump(), a.dump());
}

TEST(RunExperiment, ReportEnvelope) {
  const RunOutcome out = run_experiment(small_config(Suite::commutant_identity));
  const nlohmann::json j = out.report.to_json();
  ASSERT_TRUE(j.contains("meta"));
  EXPECT_EQ(j["meta"]["version"], kVersion);
  EXPECT_EQ(j["meta"]["seed"], 7);
  EXPECT_TRUE(j["meta"]["config"].contains("tolerances"));
  ASSERT_TRUE(j["checks"].is_array());
  for (const auto& c : j["checks"])
    for (const char* key : {"id", "paper_ref", "pass", "residual", "tolerance", "details"}) EXPECT_TRUE(c.contains(key)) << key;
  EXPECT_TRUE(j.contains("timing"));
  EXPECT_FALSE(out.report.content_json().contains("timing"));
}

TEST(RunExperiment, TightToleranceFailsWithExitOne) {
  ExperimentConfig cfg = small_config(Suite::kernel_stab);
  cfg.tolerances["interchange"] = 1e-30;
  const RunOutcome out = run_experiment(cfg);
  EXPECT_EQ(out.exit_code, 1);
  EXPECT_GT(out.report.failed(), 0u);
}

TEST(RunExperiment, GnsSuiteSkipsLargeDimensions) {
  ExperimentConfig cfg = small_config(Suite::br_gns);
  cfg.dims = {9};
  cfg.instances = 1;
  const RunOutcome out = run_experiment(cfg);
  EXPECT_TRUE(out.report.checks.empty());
  EXPECT_TRUE(out.report.meta.contains("skipped"));
}

TEST(WriteOutputs, JsonAndCsv) {
  const auto dir = temp_dir();
  ExperimentConfig cfg = small_config(Suite::heisenberg);
  cfg.dims = {2};
  cfg.instances = 1;
  const RunOutcome out = run_experiment(cfg);

  cfg.output_path = (dir / "report.json").string();
  write_outputs(cfg, out);
  std::ifstream js(cfg.output_path);
  const nlohmann::json parsed = nlohmann::json::parse(js);
  EXPECT_EQ(parsed["checks"].size(), out.report.checks.size());

  cfg.format = OutputFormat::csv;
  cfg.output_path = (dir / "report.csv").string();
  write_outputs(cfg, out);
  std::ifstream cs(cfg.output_path);
  std::string header;
  std::getline(cs, header);
  EXPECT_EQ(header, "id,suite,n,pass,residual,tolerance");
  std::ifstream hs(dir / "report_hcr.csv");
  std::getline(hs, header);
  EXPECT_EQ(header, "n,h,vector_id,residual,order_estimate");
}

TEST(WriteOutputs, UnwritablePath) {
  ExperimentConfig cfg = small_config(Suite::commutant_identity);
  cfg.dims = {2};
  cfg.output_path = "/nonexistent-dir/for/sure/report.json";
  const RunOutcome out = run_experiment(cfg);
  EXPECT_EQ(code_of([&] { write_outputs(cfg, out); }), ErrorCode::IoError);
}
