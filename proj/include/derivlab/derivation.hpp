#pragma once

// The commutator derivation x ↦ [iD, x] on M_n, realized as an n^2 x n^2
// superoperator, together with its powers, kernels, the conjugation flow
// α_t(x) = e^{itD} x e^{-itD} and finite-difference checks of its generator.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "derivlab/numlin.hpp"
#include "derivlab/spectral.hpp"
#include "derivlab/subspace.hpp"

namespace derivlab {

inline constexpr double kDefaultSubspaceTol = 1e-8;

/// Linear map on M_n stored as the matrix acting on vec(x).
struct Superoperator {
  Index ambient_dim = 0;
  CMatrix matrix;
  std::string label;

  CMatrix apply(const CMatrix& x) const {
    if (x.rows() != ambient_dim || x.cols() != ambient_dim) fail(ErrorCode::ShapeMismatch, "superoperator argument has wrong shape");
    return unvec(matrix * vec(x), ambient_dim);
  }

  Superoperator power(int k) const {
    if (k < 0) fail(ErrorCode::InvalidArgument, "negative superoperator power");
    CMatrix acc = CMatrix::Identity(matrix.rows(), matrix.cols());
    for (int i = 0; i < k; ++i) acc = acc * matrix;
    return {ambient_dim, std::move(acc), label + "^" + std::to_string(k)};
  }
};

/// i(I ⊗ D - Dᵀ ⊗ I), the matrix of x ↦ i(Dx - xD) under column stacking.
inline Superoperator ad_superoperator(const CMatrix& d) {
  require_hermitian(d, "ad_superoperator generator");
  const Index n = d.rows();
  if (n > dimension_budget())
    fail(ErrorCode::DimensionOverflow, "n=" + std::to_string(n) + " exceeds dimension budget " + std::to_string(dimension_budget()));
  const CMatrix id = CMatrix::Identity(n, n);
  return {n, kI * (kron(id, d) - kron(d.transpose(), id)), "ad_{iD}"};
}

/// [iD, [iD, ..., [iD, x]]] with k nested commutators, evaluated directly.
inline CMatrix iterated_commutator(const CMatrix& d, const CMatrix& x, int k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "iterated_commutator needs k >= 1");
  require_square(d, "D");
  if (x.rows() != d.rows() || x.cols() != d.cols()) fail(ErrorCode::ShapeMismatch, "x must match D");
  CMatrix y = x;
  for (int i = 0; i < k; ++i) y = kI * commutator(d, y);
  return y;
}

inline CMatrix ad(const CMatrix& d, const CMatrix& x) { return iterated_commutator(d, x, 1); }

/// Nullspace of a superoperator, as an operator subspace.
inline OperatorSubspace superoperator_kernel(const Superoperator& map, double rank_tol = kDefaultRankTol) {
  return OperatorSubspace::from_orthonormal(map.ambient_dim, nullspace(map.matrix, rank_tol));
}

/// ker (ad_{iD})^k
inline OperatorSubspace derivation_kernel(const CMatrix& d, int k, double rank_tol = kDefaultRankTol) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "derivation_kernel needs k >= 1");
  return superoperator_kernel(ad_superoperator(d).power(k), rank_tol);
}

struct StabilizationTolerances {
  double rank = kDefaultRankTol;
  double subspace = kDefaultSubspaceTol;
  double cluster = kDefaultClusterTol;
};

struct KernelStabilizationReport {
  Index n = 0;
  std::vector<double> spectrum;
  std::vector<Index> multiplicities;
  std::vector<Index> kernel_dims;  // entry k-1 is dim ker map^k
  std::vector<double> distances;   // entry k-1 is distance(ker map^k, ker map)
  std::vector<bool> per_k_pass;
  bool pass = false;
  StabilizationTolerances tolerances;

  double max_distance() const { return distances.empty() ? 0.0 : *std::max_element(distances.begin(), distances.end()); }
};

/// Compares ker map^k with ker map for k = 1..n_max. Failures are recorded
/// in the report rather than thrown.
inline KernelStabilizationReport kernel_stabilization(const Superoperator& map, int n_max, const StabilizationTolerances& tol = {}) {
  if (n_max < 2) fail(ErrorCode::InvalidArgument, "n_max must be at least 2");
  KernelStabilizationReport rep;
  rep.n = map.ambient_dim;
  rep.tolerances = tol;
  const CMatrix base = nullspace(map.matrix, tol.rank);
  CMatrix power = map.matrix;
  rep.pass = true;
  for (int k = 1; k <= n_max; ++k) {
    if (k > 1) power = power * map.matrix;
    const CMatrix kernel = k == 1 ? base : nullspace(power, tol.rank);
    const double dist = subspace_distance_columns(kernel, base);
    const bool ok = kernel.cols() == base.cols() && dist <= tol.subspace;
    rep.kernel_dims.push_back(kernel.cols());
    rep.distances.push_back(dist);
    rep.per_k_pass.push_back(ok);
    rep.pass = rep.pass && ok;
  }
  return rep;
}

inline KernelStabilizationReport kernel_stabilization_report(const CMatrix& d, int n_max, const StabilizationTolerances& tol = {}) {
  const SpectralResolution res = spectral_resolution(d, tol.cluster);
  KernelStabilizationReport rep = kernel_stabilization(ad_superoperator(d), n_max, tol);
  rep.spectrum = res.distinct_values;
  rep.multiplicities = res.multiplicities;
  return rep;
}

/// Σ m_i^2, the dimension of the commutant of a Hermitian matrix.
inline Index commutant_dimension(const std::vector<Index>& multiplicities) {
  Index total = 0;
  for (Index m : multiplicities) total += m * m;
  return total;
}

inline nlohmann::json to_json(const KernelStabilizationReport& rep) {
  return {{"n", rep.n},
          {"spectrum", rep.spectrum},
          {"multiplicities", rep.multiplicities},
          {"kernel_dims", rep.kernel_dims},
          {"distances", rep.distances},
          {"pass", rep.pass},
          {"tolerances", {{"rank", rep.tolerances.rank}, {"subspace", rep.tolerances.subspace}, {"cluster", rep.tolerances.cluster}}}};
}

/// α_t(x) = e^{itD} x e^{-itD}
inline CMatrix flow(const SpectralResolution& res, const CMatrix& x, double t) {
  if (x.rows() != res.dim() || x.cols() != res.dim()) fail(ErrorCode::ShapeMismatch, "x must match D");
  return unitary_group(res, t) * x * unitary_group(res, -t);
}

/// Geometric grid 1e-2 * 2^{-j}, j = 0..6.
inline std::vector<double> default_t_grid() {
  std::vector<double> ts;
  for (int j = 0; j <= 6; ++j) ts.push_back(1e-2 * std::ldexp(1.0, -j));
  return ts;
}

struct DifferenceQuotientReport {
  std::vector<double> t;
  std::vector<double> residuals;          // ||(α_t(x)-x)/t - ad(x)||
  std::vector<double> residual_bounds;    // ½ ||ad²(x)|| |t|
  std::vector<double> lipschitz_ratios;   // ||α_t(x)-x|| / |t|
  std::vector<double> lipschitz_bounds;   // ||ad(x)|| + ||D||² ||x|| |t|
  std::vector<double> convergence_ratios; // r(t_j) / r(t_{j+1})
  std::vector<double> step_ratios;        // |t_j| / |t_{j+1}|
  bool bounds_ok = false;
  bool lipschitz_ok = false;
  bool monotone = false;
  bool first_order = false;  // every resolved ratio within ratio_tol of the step ratio
  bool pass() const { return bounds_ok && lipschitz_ok && monotone && first_order; }
};

/// Difference quotients of the flow against the generator, in operator norm.
/// The grid is processed in the given order; convergence ratios compare
/// neighbours and must match the step ratio to within a relative ratio_tol.
inline DifferenceQuotientReport difference_quotient_check(const SpectralResolution& res, const CMatrix& x,
                                                          const std::vector<double>& t_list, double ratio_tol = 0.1) {
  for (double t : t_list)
    if (t == 0.0) fail(ErrorCode::ZeroT, "difference quotient needs t != 0");
  const CMatrix& d = res.source;
  const CMatrix adx = ad(d, x);
  const double ad_norm = op_norm(adx);
  const double ad2_norm = op_norm(ad(d, adx));
  const double d_norm = res.source_norm;
  const double x_norm = op_norm(x);
  const double eps = std::numeric_limits<double>::epsilon();

  DifferenceQuotientReport rep;
  rep.bounds_ok = rep.lipschitz_ok = rep.monotone = rep.first_order = true;
  for (double t : t_list) {
    const CMatrix delta = flow(res, x, t) - x;
    const double at = std::abs(t);
    // rounding in α_t(x) - x is amplified by 1/|t|
    const double noise = 64.0 * eps * (1.0 + x_norm) / at;
    const double r = op_norm(delta / t - adx);
    const double lip = op_norm(delta) / at;
    rep.t.push_back(t);
    rep.residuals.push_back(r);
    rep.residual_bounds.push_back(0.5 * ad2_norm * at);
    rep.lipschitz_ratios.push_back(lip);
    rep.lipschitz_bounds.push_back(ad_norm + d_norm * d_norm * x_norm * at);
    rep.bounds_ok = rep.bounds_ok && r <= rep.residual_bounds.back() + noise;
    rep.lipschitz_ok = rep.lipschitz_ok && lip <= rep.lipschitz_bounds.back() + noise;
  }
  for (std::size_t j = 0; j + 1 < rep.t.size(); ++j) {
    const double noise = 64.0 * eps * (1.0 + x_norm) / std::abs(rep.t[j + 1]);
    const double step = std::abs(rep.t[j]) / std::abs(rep.t[j + 1]);
    rep.step_ratios.push_back(step);
    if (step > 1.0 && rep.residuals[j + 1] > rep.residuals[j] + noise) rep.monotone = false;
    if (rep.residuals[j + 1] > 1e3 * noise) {
      const double ratio = rep.residuals[j] / rep.residuals[j + 1];
      rep.convergence_ratios.push_back(ratio);
      if (std::abs(ratio - step) > ratio_tol * step) rep.first_order = false;
    } else {
      rep.convergence_ratios.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return rep;
}

struct PairingDerivative {
  Complex central_difference;
  Complex exact;  // ⟨α_t(ad(x)) h, k⟩
  double residual = 0.0;
  double bound = 0.0;  // (Δ²/6) ||ad³(x)|| ||h|| ||k||
};

/// Central difference of s ↦ ⟨α_s(x)h, k⟩ at s = t against ⟨α_t(ad(x))h, k⟩.
/// The inner product is linear in its first argument.
inline PairingDerivative pairing_derivative_check(const SpectralResolution& res, const CMatrix& x, const CVector& h,
                                                  const CVector& k, double t, double step) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "step must be positive");
  if (h.size() != res.dim() || k.size() != res.dim()) fail(ErrorCode::ShapeMismatch, "vectors must match D");
  auto pairing = [&](const CMatrix& y) { return k.dot(y * h); };
  const Complex plus = pairing(flow(res, x, t + step));
  const Complex minus = pairing(flow(res, x, t - step));
  PairingDerivative out;
  out.central_difference = (plus - minus) / (2.0 * step);
  const CMatrix adx = ad(res.source, x);
  out.exact = pairing(flow(res, adx, t));
  out.residual = std::abs(out.central_difference - out.exact);
  out.bound = step * step / 6.0 * op_norm(iterated_commutator(res.source, x, 3)) * h.norm() * k.norm();
  return out;
}

struct PairingRatio {
  double ratio = std::numeric_limits<double>::quiet_NaN();  // coarse / fine residual
  double deviation = 0.0;                                    // |ratio - 4| / 4
  bool resolved = false;  // fine residual clear of rounding noise
  bool bounds_ok = false;
};

/// Compares central differences at steps 2Δ and Δ. `scale` is
/// ||x|| ||h|| ||k||; below 1e3 times the rounding floor the ratio is not
/// meaningful (e.g. ad(x) = 0) and only the bounds are checked.
inline PairingRatio pairing_ratio(const PairingDerivative& coarse, const PairingDerivative& fine, double scale, double fine_step) {
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale) / fine_step;
  PairingRatio out;
  out.bounds_ok = coarse.residual <= coarse.bound + 2.0 * noise && fine.residual <= fine.bound + noise;
  out.resolved = fine.residual > 1e3 * noise;
  if (out.resolved) {
    out.ratio = coarse.residual / fine.residual;
    out.deviation = std::abs(out.ratio - 4.0) / 4.0;
  }
  return out;
}

}  // namespace derivlab
