#pragma once

// Batch verification suites and the experiment configuration behind the
// derivlab command line.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "derivlab/commutant.hpp"
#include "derivlab/derivation.hpp"
#include "derivlab/gns.hpp"
#include "derivlab/heisenberg.hpp"
#include "derivlab/random.hpp"
#include "derivlab/report.hpp"
#include "derivlab/spectral.hpp"

namespace derivlab {

enum class Suite { kernel_stab, commutant_identity, br_gns, heisenberg, all };
enum class OutputFormat { json, csv };

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::kernel_stab: return "kernel_stab";
    case Suite::commutant_identity: return "commutant_identity";
    case Suite::br_gns: return "br_gns";
    case Suite::heisenberg: return "heisenberg";
    case Suite::all: return "all";
  }
  return "unknown";
}

inline Suite parse_suite(const std::string& name) {
  for (Suite s : {Suite::kernel_stab, Suite::commutant_identity, Suite::br_gns, Suite::heisenberg, Suite::all})
    if (to_string(s) == name) return s;
  fail(ErrorCode::ConfigInvalid, "unknown suite '" + name + "'");
}

inline OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  fail(ErrorCode::ConfigInvalid, "unknown format '" + name + "'");
}

using ToleranceMap = std::map<std::string, double>;

inline ToleranceMap default_tolerances() {
  return {
      {"rank", 1e-10},          // nullspace threshold relative to sigma_max
      {"subspace", 1e-8},       // subspace distances
      {"cluster", 1e-8},        // eigenvalue clustering
      {"containment", 1e-8},    // ||(I - Π_2) Π_1||_F
      {"interchange", 1e-9},    // projection interchange, times (1 + ||D||² ||x||)
      {"equilibrium", 1e-9},    // |ω(δ(b))|
      {"symmetry", 1e-9},       // ||S - S*||_F
      {"implementation", 1e-9}, // ||π(δ(a)) - [iS, π(a)]||
      {"flow", 1e-8},           // flow intertwining
      {"rigidity", 1e-8},       // ||[D,x]|| / (||D|| ||x||)
      {"order", 0.3},           // |p - 2| for the HCR convergence order
      {"dq_ratio", 0.1},        // relative window on difference-quotient ratios
      {"pairing_ratio", 0.25},  // relative window on central-difference ratios
      {"hcr_line", 2e-3},       // line residual at n = 512, sigma = 1
      {"scheme", 1e-10},        // scheme identity on interior rows
  };
}

struct ExperimentConfig {
  Suite suite = Suite::all;
  std::vector<Index> dims;
  int n_max = 5;
  std::uint64_t seed = 7;
  ToleranceMap tolerances = default_tolerances();
  std::string output_path;
  OutputFormat format = OutputFormat::json;
  int instances = 3;  // seeded instances per dimension

  double tol(const std::string& name) const { return tolerances.at(name); }
};

/// "2..12" or "3,5,8" (ranges may be mixed into lists: "2..4,8").
inline std::vector<Index> parse_dims(const std::string& text) {
  std::vector<Index> dims;
  std::stringstream ss(text);
  std::string item;
  auto to_index = [&](const std::string& s) -> Index {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigInvalid, "bad dimension '" + s + "'");
    }
    if (used != s.size()) fail(ErrorCode::ConfigInvalid, "bad dimension '" + s + "'");
    return static_cast<Index>(v);
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const Index lo = to_index(item.substr(0, dots));
      const Index hi = to_index(item.substr(dots + 2));
      if (lo > hi) fail(ErrorCode::ConfigInvalid, "empty dimension range '" + item + "'");
      for (Index n = lo; n <= hi; ++n) dims.push_back(n);
    } else {
      dims.push_back(to_index(item));
    }
  }
  if (dims.empty()) fail(ErrorCode::ConfigInvalid, "no dimensions given");
  return dims;
}

/// "rank=1e-10,subspace=1e-8" merged over the defaults.
inline ToleranceMap parse_tolerances(const std::string& text, ToleranceMap base = default_tolerances()) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigInvalid, "tolerance '" + item + "' must be name=value");
    const std::string name = item.substr(0, eq);
    if (!base.contains(name)) fail(ErrorCode::ConfigInvalid, "unknown tolerance '" + name + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigInvalid, "bad tolerance value in '" + item + "'");
    }
    if (used != item.size() - eq - 1) fail(ErrorCode::ConfigInvalid, "bad tolerance value in '" + item + "'");
    base[name] = v;
  }
  return base;
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.dims.empty()) fail(ErrorCode::ConfigInvalid, "dims must not be empty");
  const Index cap = std::min<Index>(64, dimension_budget());
  for (Index n : cfg.dims)
    if (n < 2 || n > cap) fail(ErrorCode::ConfigInvalid, "dimension " + std::to_string(n) + " outside [2, " + std::to_string(cap) + "]");
  if (cfg.n_max < 2 || cfg.n_max > 8) fail(ErrorCode::ConfigInvalid, "n_max must lie in [2, 8]");
  if (cfg.instances < 1) fail(ErrorCode::ConfigInvalid, "instances must be at least 1");
  const ToleranceMap defaults = default_tolerances();
  for (const auto& [name, value] : cfg.tolerances) {
    if (!defaults.contains(name)) fail(ErrorCode::ConfigInvalid, "unknown tolerance '" + name + "'");
    if (!(value > 0.0) || !std::isfinite(value)) fail(ErrorCode::ConfigInvalid, "tolerance '" + name + "' must be positive");
  }
  for (const auto& [name, value] : defaults)
    if (!cfg.tolerances.contains(name)) fail(ErrorCode::ConfigInvalid, "missing tolerance '" + name + "'");
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  return {{"suite", to_string(cfg.suite)},
          {"dims", cfg.dims},
          {"n_max", cfg.n_max},
          {"seed", cfg.seed},
          {"instances", cfg.instances},
          {"tolerances", cfg.tolerances},
          {"format", cfg.format == OutputFormat::json ? "json" : "csv"}};
}

// ---------------------------------------------------------------------------
// Instance generation

enum class InstanceKind : std::uint64_t { kernel = 1, commutant = 2, gns = 3, heisenberg = 4, rigidity = 5 };

inline Xoshiro256 instance_rng(std::uint64_t seed, InstanceKind kind, Index n, int instance) {
  return Xoshiro256(derive_seed(seed, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(instance)}));
}

/// Instance 0 has a simple spectrum, instance 1 at least one repeated
/// eigenvalue, later instances are random splits.
inline std::vector<Index> instance_multiplicities(Index n, int instance, Xoshiro256& rng) {
  if (instance == 0) return std::vector<Index>(static_cast<std::size_t>(n), 1);
  for (;;) {
    std::vector<Index> m = random_multiplicities(n, rng);
    const bool repeated = std::any_of(m.begin(), m.end(), [](Index v) { return v > 1; });
    if (instance > 1 || repeated) return m;
  }
}

/// [i^k (d_r - d_c)^k x_rc] computed in integer arithmetic.
inline CMatrix integer_diagonal_formula(const std::vector<long long>& d, const std::vector<long long>& re,
                                        const std::vector<long long>& im, int k) {
  const auto n = static_cast<Index>(d.size());
  CMatrix out(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      long long p = 1;
      for (int i = 0; i < k; ++i) p *= d[static_cast<std::size_t>(r)] - d[static_cast<std::size_t>(c)];
      const std::size_t idx = static_cast<std::size_t>(r * n + c);
      long long a = p * re[idx];
      long long b = p * im[idx];
      // multiply by i^k
      for (int i = 0; i < k % 4; ++i) {
        const long long t = a;
        a = -b;
        b = t;
      }
      out(r, c) = Complex(static_cast<double>(a), static_cast<double>(b));
    }
  return out;
}

struct DiagonalFormulaResult {
  double max_abs_diff = 0.0;
  bool exact = true;
};

/// Integer diagonal D and integer test matrix; compares the nested
/// commutators for k = 1..k_max with the closed form entry by entry.
inline DiagonalFormulaResult diagonal_formula_check(Index n, int k_max, Xoshiro256& rng) {
  std::vector<long long> d(static_cast<std::size_t>(n));
  std::vector<long long> re(static_cast<std::size_t>(n * n));
  std::vector<long long> im(static_cast<std::size_t>(n * n));
  for (auto& v : d) v = static_cast<long long>(rng.index(7)) - 3;
  for (auto& v : re) v = static_cast<long long>(rng.index(11)) - 5;
  for (auto& v : im) v = static_cast<long long>(rng.index(11)) - 5;
  CMatrix dm = CMatrix::Zero(n, n);
  CMatrix x(n, n);
  for (Index r = 0; r < n; ++r) {
    dm(r, r) = static_cast<double>(d[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < n; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r * n + c);
      x(r, c) = Complex(static_cast<double>(re[idx]), static_cast<double>(im[idx]));
    }
  }
  DiagonalFormulaResult out;
  for (int k = 1; k <= k_max; ++k) {
    const CMatrix got = iterated_commutator(dm, x, k);
    const CMatrix want = integer_diagonal_formula(d, re, im, k);
    out.max_abs_diff = std::max(out.max_abs_diff, (got - want).cwiseAbs().maxCoeff());
    out.exact = out.exact && got == want;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suites

namespace detail {

inline std::string check_id(const std::string& suite, const std::string& name, Index n, int instance) {
  return suite + "/" + name + "/n=" + std::to_string(n) + "/i=" + std::to_string(instance);
}

inline StabilizationTolerances stab_tol(const ExperimentConfig& cfg) {
  return {cfg.tol("rank"), cfg.tol("subspace"), cfg.tol("cluster")};
}

inline nlohmann::json index_list(const std::vector<Index>& v) { return nlohmann::json(v); }

}  // namespace detail

inline void run_kernel_stab(const ExperimentConfig& cfg, Index n, int instance, Report& report) {
  const std::string suite = "kernel_stab";
  Xoshiro256 rng = instance_rng(cfg.seed, InstanceKind::kernel, n, instance);
  const std::vector<Index> mult = instance_multiplicities(n, instance, rng);
  const PrescribedHermitian gen = hermitian_with_multiplicity(mult, rng);
  const CMatrix& d = gen.matrix;
  auto id = [&](const std::string& name) { return detail::check_id(suite, name, n, instance); };

  const KernelStabilizationReport stab = kernel_stabilization_report(d, cfg.n_max, detail::stab_tol(cfg));
  report.add({id("stabilization"), suite, static_cast<long>(n), "ker (ad_iD)^k = ker ad_iD for every k", stab.pass,
              stab.max_distance(), cfg.tol("subspace"), to_json(stab)});

  const Index expected = commutant_dimension(stab.multiplicities);
  const Index prescribed = commutant_dimension(mult);
  const Index got = stab.kernel_dims.front();
  report.add({id("kernel_dim"), suite, static_cast<long>(n), "dim ker ad_iD = sum of squared multiplicities",
              got == expected && got == prescribed, static_cast<double>(std::max(std::abs(got - expected), std::abs(got - prescribed))),
              0.0, {{"kernel_dim", got}, {"expected", expected}, {"prescribed_multiplicities", detail::index_list(mult)}}});

  const DiagonalFormulaResult diag = diagonal_formula_check(n, 4, rng);
  report.add({id("diagonal_formula"), suite, static_cast<long>(n), "d^k(x)_rc = i^k (r-c)^k x_rc for integer diagonal D",
              diag.exact, diag.max_abs_diff, 0.0, {{"k_max", 4}}});

  const SpectralResolution res = spectral_resolution(d, cfg.tol("cluster"));
  const CMatrix x = gaussian_matrix(n, n, rng);
  const double interchange = projection_commutation_check(res, x);
  const double interchange_tol = cfg.tol("interchange") * (1.0 + res.source_norm * res.source_norm * op_norm(x));
  report.add({id("projection_interchange"), suite, static_cast<long>(n), "[P,[D,x]] = [D,[P,x]] for spectral projections P",
              interchange <= interchange_tol, interchange, interchange_tol, nlohmann::json::object()});

  const DifferenceQuotientReport dq = difference_quotient_check(res, x, default_t_grid(), cfg.tol("dq_ratio"));
  double worst_ratio_dev = 0.0;
  for (std::size_t j = 0; j < dq.convergence_ratios.size(); ++j)
    if (std::isfinite(dq.convergence_ratios[j]))
      worst_ratio_dev = std::max(worst_ratio_dev, std::abs(dq.convergence_ratios[j] - dq.step_ratios[j]) / dq.step_ratios[j]);
  report.add({id("difference_quotient"), suite, static_cast<long>(n),
              "(alpha_t(x)-x)/t -> ad_iD(x) at first order with ||alpha_t(x)-x|| <= c|t|", dq.pass(), worst_ratio_dev,
              cfg.tol("dq_ratio"),
              {{"residuals", dq.residuals},
               {"residual_bounds", dq.residual_bounds},
               {"lipschitz_ratios", dq.lipschitz_ratios},
               {"bounds_ok", dq.bounds_ok},
               {"lipschitz_ok", dq.lipschitz_ok},
               {"monotone", dq.monotone}}});

  const CVector h = gaussian_vector(n, rng);
  const CVector k = gaussian_vector(n, rng);
  const double t = rng.uniform(-1.0, 1.0);
  const PairingDerivative coarse = pairing_derivative_check(res, x, h, k, t, 1e-2);
  const PairingDerivative fine = pairing_derivative_check(res, x, h, k, t, 5e-3);
  const PairingRatio pr = pairing_ratio(coarse, fine, op_norm(x) * h.norm() * k.norm(), 5e-3);
  const bool pairing_ok = pr.bounds_ok && (!pr.resolved || pr.deviation <= cfg.tol("pairing_ratio"));
  report.add({id("pairing_derivative"), suite, static_cast<long>(n), "d/dt <alpha_t(x)h,k> = <alpha_t(ad_iD(x))h,k>", pairing_ok,
              pr.resolved ? pr.deviation : 0.0, cfg.tol("pairing_ratio"),
              {{"ratio", finite_or_null(pr.ratio)},
               {"resolved", pr.resolved},
               {"residuals", {coarse.residual, fine.residual}},
               {"bounds", {coarse.bound, fine.bound}}}});
}

inline void run_commutant_identity(const ExperimentConfig& cfg, Index n, int instance, Report& report) {
  const std::string suite = "commutant_identity";
  Xoshiro256 rng = instance_rng(cfg.seed, InstanceKind::commutant, n, instance);
  const std::vector<Index> mult = instance_multiplicities(n, instance, rng);
  const PrescribedHermitian gen = hermitian_with_multiplicity(mult, rng);
  const KernelCommutantReport rep = kernel_commutant_check(gen.matrix, detail::stab_tol(cfg), cfg.tol("containment"));
  report.add({detail::check_id(suite, "ker_equals_commutant", n, instance), suite, static_cast<long>(n),
              "M_D inside ker ad_iD = {D}' = P_D'", rep.pass, std::max(rep.max_distance(), rep.vn_algebra_containment),
              cfg.tol("subspace"), to_json(rep)});
}

inline void run_br_gns(const ExperimentConfig& cfg, Index n, int instance, Report& report) {
  const std::string suite = "br_gns";
  Xoshiro256 rng = instance_rng(cfg.seed, InstanceKind::gns, n, instance);
  const std::vector<Index> mult = instance_multiplicities(n, instance, rng);
  const EquilibriumInstance inst = equilibrium_instance(mult, rng);
  const State omega = state_from_density(inst.rho);
  const Derivation delta = inner_derivation(inst.generator);
  BRTolerances tol;
  tol.rank = cfg.tol("rank");
  tol.subspace = cfg.tol("subspace");
  tol.equilibrium = cfg.tol("equilibrium");
  tol.symmetry = cfg.tol("symmetry");
  tol.implementation = cfg.tol("implementation");
  tol.flow = cfg.tol("flow");
  const BRReport rep = br_pipeline(omega, delta, cfg.n_max, tol);
  auto id = [&](const std::string& name) { return detail::check_id(suite, name, n, instance); };
  const long ln = static_cast<long>(n);
  report.add({id("equilibrium"), suite, ln, "omega(delta(a)) = 0", rep.equilibrium_residual <= tol.equilibrium,
              rep.equilibrium_residual, tol.equilibrium, nlohmann::json::object()});
  report.add({id("symmetric_S"), suite, ln, "implementing operator S is symmetric", rep.symmetry_residual <= tol.symmetry,
              rep.symmetry_residual, tol.symmetry, {{"s_spectrum", rep.s_spectrum}}});
  report.add({id("implementation"), suite, ln, "pi(delta(a)) = [iS, pi(a)] on the cyclic subspace",
              rep.implementation_residual <= tol.implementation, rep.implementation_residual, tol.implementation,
              nlohmann::json::object()});
  report.add({id("flow_intertwining"), suite, ln, "e^{iSt} pi(a) e^{-iSt} = pi(exp(t delta)(a))", rep.flow_residual <= tol.flow,
              rep.flow_residual, tol.flow, {{"t", default_flow_times()}}});
  report.add({id("kernel_correspondence"), suite, ln, "ker ad_iS^k restricted to pi(A) equals pi(ker delta^k)",
              rep.correspondence.max_distance() <= tol.subspace, rep.correspondence.max_distance(), tol.subspace,
              {{"restricted_dims", rep.correspondence.restricted_dims}, {"image_dims", rep.correspondence.image_dims}}});
  report.add({id("abstract_stabilization"), suite, ln, "ker delta^k = ker delta for the represented derivation",
              rep.stabilization.pass, rep.stabilization.max_distance(), tol.subspace, to_json(rep.stabilization)});
}

inline void run_heisenberg_dim(const ExperimentConfig& cfg, Index n, int instance, Report& report) {
  const std::string suite = "heisenberg";
  Xoshiro256 rng = instance_rng(cfg.seed, InstanceKind::rigidity, n, instance);
  const CMatrix a = random_hermitian(n, rng);
  const CMatrix b = random_hermitian(n, rng);
  const TraceObstruction obs = trace_obstruction(a, b);
  report.add({detail::check_id(suite, "trace_obstruction", n, instance), suite, static_cast<long>(n),
              "tr[A,B] = 0 so ||[A,B] - iI||_F >= sqrt(n)", obs.holds(), obs.trace_abs, obs.trace_bound,
              {{"frobenius_gap", obs.frobenius_gap}, {"lower_bound", obs.lower_bound}}});

  const std::vector<Index> mult = instance_multiplicities(n, instance, rng);
  const PrescribedHermitian gen = hermitian_with_multiplicity(mult, rng);
  const RigidityReport rig = rigidity_check(gen.matrix, 50, cfg.tol("rank"), derive_seed(cfg.seed, {99, static_cast<std::uint64_t>(n),
                                                                                                      static_cast<std::uint64_t>(instance)}),
                                            cfg.tol("rigidity"));
  report.add({detail::check_id(suite, "rigidity", n, instance), suite, static_cast<long>(n),
              "[D,x] commuting with D forces [D,x] = 0", rig.pass,
              std::max({rig.max_rigidity, rig.max_membership, rig.max_control_projection}), rig.tolerance,
              {{"kernel_dim", rig.kernel_dim},
               {"trials", rig.trials},
               {"max_rigidity", rig.max_rigidity},
               {"max_membership", rig.max_membership},
               {"max_control_projection", rig.max_control_projection}}});
}

/// Grid-based checks that do not depend on the configured dimensions.
inline HcrResult run_heisenberg_grids(const ExperimentConfig& cfg, Report& report, nlohmann::json& tables,
                                      std::vector<HcrRow>& csv_rows) {
  const std::string suite = "heisenberg";
  HcrResult line_result;
  for (Scheme scheme : {Scheme::schrodinger_line, Scheme::periodic_interval}) {
    const DiscretizedPair pair = make_pair(scheme, 128, 10.0);
    const HcrResult hcr = hcr_residual(pair, 2);
    const double dev = std::max(std::abs(hcr.min_order - 2.0), std::abs(hcr.max_order - 2.0));
    report.add({suite + "/hcr_order/" + to_string(scheme) + "/n=128", suite, 128,
                "[A,B]k = ik recovered at second order on smooth test vectors", dev <= cfg.tol("order"), dev, cfg.tol("order"),
                {{"min_order", hcr.min_order}, {"max_order", hcr.max_order}}});
    const double scheme_res = scheme_identity_residual(pair);
    report.add({suite + "/scheme_identity/" + to_string(scheme) + "/n=128", suite, 128,
                "[iC, diag(x)] equals i times the neighbour average", scheme_res <= cfg.tol("scheme"), scheme_res,
                cfg.tol("scheme"), nlohmann::json::object()});
    const TraceObstruction obs = trace_obstruction(pair.a, pair.b);
    report.add({suite + "/trace_obstruction/" + to_string(scheme) + "/n=128", suite, 128,
                "tr[A,B] = 0 so ||[A,B] - iI||_F >= sqrt(n)", obs.holds(), obs.trace_abs, obs.trace_bound,
                {{"frobenius_gap", obs.frobenius_gap}, {"lower_bound", obs.lower_bound}}});
    tables[to_string(scheme)] = to_json(hcr);
    csv_rows.insert(csv_rows.end(), hcr.table.begin(), hcr.table.end());
    if (scheme == Scheme::schrodinger_line) line_result = hcr;
  }
  // σ = 1 Gaussian (profile 0) at n = 512
  double line_residual = std::numeric_limits<double>::infinity();
  for (const auto& row : line_result.table)
    if (row.n == 512 && row.vector_id == 0) line_residual = row.residual;
  report.add({suite + "/hcr_line_residual/n=512", suite, 512, "[P,Q]k = ik on a unit-width Gaussian, L = 10",
              line_residual < cfg.tol("hcr_line"), line_residual, cfg.tol("hcr_line"), nlohmann::json::object()});
  return line_result;
}

struct RunOutcome {
  Report report;
  std::vector<HcrRow> hcr_rows;
  int exit_code = 0;
};

inline bool runs(Suite selected, Suite s) { return selected == Suite::all || selected == s; }

inline RunOutcome run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  Report& report = out.report;
  report.meta = {{"version", kVersion}, {"seed", cfg.seed}, {"config", to_json(cfg)}};
  nlohmann::json skipped = nlohmann::json::array();
  for (Index n : cfg.dims) {
    for (int i = 0; i < cfg.instances; ++i) {
      if (runs(cfg.suite, Suite::kernel_stab)) run_kernel_stab(cfg, n, i, report);
      if (runs(cfg.suite, Suite::commutant_identity)) run_commutant_identity(cfg, n, i, report);
      if (runs(cfg.suite, Suite::br_gns)) {
        // the GNS space is n^2-dimensional and its operator algebra n^4
        if (n <= 8) run_br_gns(cfg, n, i, report);
        else if (i == 0) skipped.push_back({{"suite", "br_gns"}, {"n", n}, {"reason", "GNS checks run for n <= 8"}});
      }
      if (runs(cfg.suite, Suite::heisenberg)) run_heisenberg_dim(cfg, n, i, report);
    }
  }
  if (runs(cfg.suite, Suite::heisenberg)) {
    nlohmann::json tables = nlohmann::json::object();
    run_heisenberg_grids(cfg, report, tables, out.hcr_rows);
    report.extras["hcr"] = tables;
  }
  if (!skipped.empty()) report.meta["skipped"] = skipped;
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.exit_code = report.all_pass() ? 0 : 1;
  return out;
}

/// Writes the report (and, for CSV with HCR rows, a sibling *_hcr.csv).
inline void write_outputs(const ExperimentConfig& cfg, const RunOutcome& outcome) {
  if (cfg.output_path.empty()) return;
  const std::filesystem::path path(cfg.output_path);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) fail(ErrorCode::IoError, "cannot write " + p.string());
    return os;
  };
  if (cfg.format == OutputFormat::json) {
    std::ofstream os = open(path);
    os << outcome.report.to_json().dump(2) << '\n';
    if (!os) fail(ErrorCode::IoError, "write failed for " + path.string());
    return;
  }
  {
    std::ofstream os = open(path);
    write_checks_csv(os, outcome.report);
    if (!os) fail(ErrorCode::IoError, "write failed for " + path.string());
  }
  if (!outcome.hcr_rows.empty()) {
    const std::filesystem::path hcr_path = path.parent_path() / (path.stem().string() + "_hcr.csv");
    std::ofstream os = open(hcr_path);
    write_hcr_csv(os, outcome.hcr_rows);
    if (!os) fail(ErrorCode::IoError, "write failed for " + hcr_path.string());
  }
}

}  // namespace derivlab
