// derivlab: seeded verification suites, instance generation and one-off
// spectral / GNS computations from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "derivlab/derivlab.hpp"

namespace {

using namespace derivlab;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BadMultiplicities:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::DimensionOverflow:
      return kExitConfig;
    case ErrorCode::IoError:
      return kExitIo;
    default:
      return kExitCheckFailed;
  }
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<Index>(std::stol(item)));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigInvalid, "bad multiplicity '" + item + "'");
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) fail(ErrorCode::IoError, "cannot write " + path);
  os << text;
  if (!os) fail(ErrorCode::IoError, "write failed for " + path);
}

struct RunArgs {
  std::string suite = "all";
  std::string dims = "2..12";
  int n_max = 5;
  std::uint64_t seed = 7;
  std::string tol;
  std::string out;
  std::string format = "json";
  int instances = 3;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig cfg;
  cfg.suite = parse_suite(args.suite);
  cfg.dims = parse_dims(args.dims);
  cfg.n_max = args.n_max;
  cfg.seed = args.seed;
  cfg.tolerances = parse_tolerances(args.tol);
  cfg.output_path = args.out;
  cfg.format = parse_format(args.format);
  cfg.instances = args.instances;
  validate(cfg);

  const RunOutcome outcome = run_experiment(cfg);
  if (cfg.output_path.empty()) std::cout << outcome.report.to_json().dump(2) << '\n';
  else write_outputs(cfg, outcome);

  const Report& r = outcome.report;
  std::cerr << r.checks.size() - r.failed() << '/' << r.checks.size() << " checks passed in " << r.wall_clock_seconds << " s\n";
  for (const auto& c : r.checks)
    if (!c.pass) std::cerr << "FAIL " << c.id << " residual=" << c.residual << " tolerance=" << c.tolerance << '\n';
  return outcome.exit_code;
}

struct GenArgs {
  std::string kind = "hermitian";
  Index n = 4;
  std::uint64_t seed = 1;
  std::string mult;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  Xoshiro256 rng(args.seed);
  if (args.kind != "hermitian_with_multiplicity" && !args.mult.empty())
    fail(ErrorCode::ConfigInvalid, "--mult only applies to hermitian_with_multiplicity");
  if (args.n < 1) fail(ErrorCode::ConfigInvalid, "n must be positive");
  CMatrix m;
  if (args.kind == "hermitian") {
    m = random_hermitian(args.n, rng);
  } else if (args.kind == "hermitian_with_multiplicity") {
    const std::vector<Index> mult = args.mult.empty() ? random_multiplicities(args.n, rng) : parse_index_list(args.mult);
    Index total = 0;
    for (Index v : mult) total += v;
    if (total != args.n) fail(ErrorCode::BadMultiplicities, "multiplicities must sum to n");
    m = hermitian_with_multiplicity(mult, rng).matrix;
  } else if (args.kind == "density") {
    m = random_density(args.n, rng);
  } else if (args.kind == "derivation") {
    // generator a of the inner derivation [ia, ·]
    m = random_hermitian(args.n, rng);
  } else {
    fail(ErrorCode::ConfigInvalid, "unknown kind '" + args.kind + "'");
  }
  write_text(args.out, matrix_to_text(m));
  return kExitOk;
}

struct SpectralArgs {
  std::string in;
  double cluster_tol = kDefaultClusterTol;
  std::string select;
  std::string out;
};

int cmd_spectral(const SpectralArgs& args) {
  const CMatrix d = read_matrix_file(args.in);
  const SpectralResolution res = spectral_resolution(d, args.cluster_tol);
  if (!args.select.empty()) {
    write_text(args.out, matrix_to_text(spectral_projection(res, parse_interval_set(args.select))));
    return kExitOk;
  }
  write_text(args.out, to_json(res).dump(2) + "\n");
  return kExitOk;
}

struct GnsArgs {
  std::string in;
  std::string out;
};

int cmd_gns(const GnsArgs& args) {
  std::ifstream is(args.in);
  if (!is) fail(ErrorCode::IoError, "cannot read " + args.in);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("rho") || !j.contains("generator")) fail(ErrorCode::ConfigInvalid, "input needs \"rho\" and \"generator\"");
  const State omega = state_from_density(matrix_from_json(j["rho"]));
  const Derivation delta = inner_derivation(matrix_from_json(j["generator"]));
  const int n_max = j.value("n_max", 5);
  if (n_max < 2 || n_max > 8) fail(ErrorCode::ConfigInvalid, "n_max must lie in [2, 8]");
  BRTolerances tol;
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    tol.rank = t.value("rank", tol.rank);
    tol.subspace = t.value("subspace", tol.subspace);
    tol.equilibrium = t.value("equilibrium", tol.equilibrium);
    tol.symmetry = t.value("symmetry", tol.symmetry);
    tol.implementation = t.value("implementation", tol.implementation);
    tol.flow = t.value("flow", tol.flow);
  }
  const BRReport rep = br_pipeline(omega, delta, n_max, tol);
  write_text(args.out, to_json(rep).dump(2) + "\n");
  return rep.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivlab: finite-dimensional derivation and commutator checks"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run verification suites and write a report");
  run->add_option("--suite", run_args.suite, "kernel_stab|commutant_identity|br_gns|heisenberg|all")->capture_default_str();
  run->add_option("--dims", run_args.dims, "dimensions, e.g. 2..12 or 3,5,8")->capture_default_str();
  run->add_option("--n-max", run_args.n_max, "highest power checked")->capture_default_str();
  run->add_option("--seed", run_args.seed, "base seed")->capture_default_str();
  run->add_option("--tol", run_args.tol, "tolerance overrides, name=value,...");
  run->add_option("--out", run_args.out, "report path (stdout if omitted)");
  run->add_option("--format", run_args.format, "json|csv")->capture_default_str();
  run->add_option("--instances", run_args.instances, "seeded instances per dimension")->capture_default_str();

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a seeded matrix in text format");
  gen->add_option("--kind", gen_args.kind, "hermitian|hermitian_with_multiplicity|density|derivation")->capture_default_str();
  gen->add_option("--n", gen_args.n, "dimension")->required();
  gen->add_option("--seed", gen_args.seed, "seed")->capture_default_str();
  gen->add_option("--mult", gen_args.mult, "multiplicities, e.g. 2,1");
  gen->add_option("--out", gen_args.out, "output path (stdout if omitted)");

  SpectralArgs spectral_args;
  auto* spectral = app.add_subcommand("spectral", "spectral resolution of a Hermitian matrix");
  spectral->add_option("--in", spectral_args.in, "matrix in text format")->required();
  spectral->add_option("--cluster-tol", spectral_args.cluster_tol, "relative eigenvalue clustering tolerance")->capture_default_str();
  spectral->add_option("--select", spectral_args.select, "Borel set such as \"[0,1/2)U(3/2,inf)\"; prints its projection");
  spectral->add_option("--out", spectral_args.out, "output path (stdout if omitted)");

  GnsArgs gns_args;
  auto* gns = app.add_subcommand("gns", "GNS implementation of an inner derivation");
  gns->add_option("--in", gns_args.in, "JSON with rho, generator and optional n_max, tolerances")->required();
  gns->add_option("--out", gns_args.out, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (gen->parsed()) return cmd_gen(gen_args);
    if (spectral->parsed()) return cmd_spectral(spectral_args);
    if (gns->parsed()) return cmd_gns(gns_args);
  } catch (const Error& e) {
    std::cerr << "derivlab: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "derivlab: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}
