#pragma once

// States on M_n, the GNS representation of a faithful state, and the
// symmetric operator S that implements an equilibrium derivation as a
// commutator: π(δ(a)) = [iS, π(a)].
//
// Conventions: derivations act as δ(x) = [i g, x] for Hermitian g, and S is
// defined on the cyclic subspace by S π(a)f = -i π(δ(a))f.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "derivlab/derivation.hpp"
#include "derivlab/subspace.hpp"

namespace derivlab {

inline constexpr double kFaithfulnessTol = 1e-10;

struct State {
  CMatrix rho;
  Index n = 0;
  bool faithful = false;
  double min_eigenvalue = 0.0;

  /// ω(a) = tr(ρ a)
  Complex operator()(const CMatrix& a) const { return (rho * a).trace(); }
};

inline State state_from_density(const CMatrix& rho, double faithfulness_tol = kFaithfulnessTol) {
  require_square(rho, "density matrix");
  require_finite(rho, "density matrix");
  if (!is_hermitian(rho)) fail(ErrorCode::NotDensity, "density matrix is not Hermitian");
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-12) fail(ErrorCode::NotDensity, "trace is " + std::to_string(tr.real()) + ", expected 1");
  const Eigensystem eig = hermitian_eig(rho);
  if (eig.values(0) < -1e-12) fail(ErrorCode::NotDensity, "density matrix has a negative eigenvalue");
  State s;
  s.rho = rho;
  s.n = rho.rows();
  s.min_eigenvalue = eig.values(0);
  s.faithful = eig.values(0) > faithfulness_tol;
  return s;
}

struct DerivationTolerances {
  double leibniz = 1e-9;   // relative to 1 + ||x|| ||y||
  double star = 1e-10;
};

/// A derivation of M_n. Inner derivations remember their generator.
struct Derivation {
  Superoperator map;
  std::optional<CMatrix> generator;

  Index ambient_dim() const { return map.ambient_dim; }
  bool is_inner() const { return generator.has_value(); }
  CMatrix operator()(const CMatrix& x) const { return map.apply(x); }
};

inline Derivation inner_derivation(const CMatrix& a) {
  Superoperator map = ad_superoperator(a);
  map.label = "ad_{ia}";
  return {std::move(map), a};
}

/// Worst Leibniz and *-compatibility defects over all matrix units. Both
/// defects are (sesqui)linear in their arguments, so units suffice.
struct DerivationDefects {
  double leibniz = 0.0;
  double star = 0.0;
};

inline DerivationDefects derivation_defects(const Superoperator& map) {
  const Index n = map.ambient_dim;
  std::vector<CMatrix> images;
  images.reserve(static_cast<std::size_t>(n * n));
  for (Index j = 0; j < n * n; ++j) images.push_back(unvec(map.matrix.col(j), n));
  auto image = [&](Index r, Index c) -> const CMatrix& { return images[static_cast<std::size_t>(r + n * c)]; };

  DerivationDefects out;
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      out.star = std::max(out.star, (image(c, r) - image(r, c).adjoint()).norm());
      const CMatrix x = matrix_unit(n, r, c);
      for (Index s = 0; s < n; ++s) {
        // E_rc E_st = δ_cs E_rt
        const CMatrix y = matrix_unit(n, c, s);
        const CMatrix lhs = image(r, s);
        const CMatrix rhs = image(r, c) * y + x * image(c, s);
        out.leibniz = std::max(out.leibniz, (lhs - rhs).norm());
        for (Index t = 0; t < n; ++t) {
          if (t == c) continue;
          // E_rc E_ts = 0
          const CMatrix z = matrix_unit(n, t, s);
          out.leibniz = std::max(out.leibniz, (image(r, c) * z + x * image(t, s)).norm());
        }
      }
    }
  return out;
}

/// Accepts a raw superoperator after checking that it is a *-derivation.
inline Derivation abstract_derivation(Superoperator map, const DerivationTolerances& tol = {}) {
  const Index n = map.ambient_dim;
  if (map.matrix.rows() != n * n || map.matrix.cols() != n * n) fail(ErrorCode::ShapeMismatch, "superoperator must be n^2 x n^2");
  require_finite(map.matrix, "superoperator");
  const DerivationDefects defects = derivation_defects(map);
  // matrix units have unit norm, so the relative Leibniz bound is 2 * tol
  if (defects.leibniz > 2.0 * tol.leibniz)
    fail(ErrorCode::NotDerivation, "Leibniz defect " + std::to_string(defects.leibniz));
  if (defects.star > tol.star) fail(ErrorCode::NotDerivation, "*-compatibility defect " + std::to_string(defects.star));
  return {std::move(map), std::nullopt};
}

/// max over matrix units b of |ω(δ(b))|.
inline double equilibrium_check(const State& omega, const Derivation& delta) {
  const Index n = omega.n;
  if (delta.ambient_dim() != n) fail(ErrorCode::ShapeMismatch, "state and derivation dimensions differ");
  double worst = 0.0;
  for (Index j = 0; j < n * n; ++j) {
    const CMatrix image = unvec(delta.map.matrix.col(j), n);
    worst = std::max(worst, std::abs(omega(image)));
  }
  return worst;
}

/// GNS data for a faithful state. The Hilbert space is M_n with
/// ⟨a, b⟩ = ω(b* a); coordinates are c(a) = Lᴴ vec(a) where L Lᴴ = ρᵀ ⊗ I is
/// the Gram matrix of the matrix units.
class GNSRepresentation {
 public:
  GNSRepresentation(State state, CMatrix chol_adjoint, CMatrix chol_adjoint_inverse)
      : state_(std::move(state)), lh_(std::move(chol_adjoint)), lh_inv_(std::move(chol_adjoint_inverse)) {
    cyclic_ = embed(CMatrix::Identity(state_.n, state_.n));
  }

  const State& state() const { return state_; }
  Index hilbert_dim() const { return lh_.rows(); }
  const CVector& cyclic_vector() const { return cyclic_; }

  /// π(a)f in orthonormal coordinates.
  CVector embed(const CMatrix& a) const { return lh_ * vec(a); }

  /// Left multiplication by a in orthonormal coordinates.
  CMatrix pi(const CMatrix& a) const {
    const Index n = state_.n;
    return lh_ * kron(CMatrix::Identity(n, n), a) * lh_inv_;
  }

  /// Maps a superoperator on M_n to the corresponding operator on H.
  CMatrix transport(const CMatrix& superop) const { return lh_ * superop * lh_inv_; }

 private:
  State state_;
  CMatrix lh_;
  CMatrix lh_inv_;
  CVector cyclic_;
};

inline GNSRepresentation gns_construct(const State& omega, double pivot_tol = 1e-12) {
  if (!omega.faithful) fail(ErrorCode::NotFaithful, "GNS construction requires a faithful state");
  const Index n = omega.n;
  const CMatrix gram = kron(omega.rho.transpose(), CMatrix::Identity(n, n));
  Eigen::LLT<CMatrix> llt(hermitian_part(gram));
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotFaithful, "Gram matrix is not positive definite");
  const CMatrix lower = llt.matrixL();
  const double min_pivot = lower.diagonal().real().minCoeff();
  if (min_pivot * min_pivot < pivot_tol) fail(ErrorCode::NotFaithful, "Gram pivot below tolerance");
  CMatrix lh = lower.adjoint();
  CMatrix lh_inv = lh.triangularView<Eigen::Upper>().solve(CMatrix::Identity(lh.rows(), lh.cols()));
  return GNSRepresentation(omega, std::move(lh), std::move(lh_inv));
}

struct ImplementingOperator {
  CMatrix s;
  double symmetry_residual = 0.0;  // ||S - S*||_F
};

/// S with S π(a)f = -i π(δ(a))f, which is symmetric for equilibrium states.
inline ImplementingOperator implementing_operator(const GNSRepresentation& gns, const Derivation& delta,
                                                  double equilibrium_tol = 1e-9) {
  if (!gns.state().faithful) fail(ErrorCode::NotFaithful, "implementing operator needs a faithful state");
  const double eq = equilibrium_check(gns.state(), delta);
  if (eq > equilibrium_tol) fail(ErrorCode::NotEquilibrium, "ω∘δ residual " + std::to_string(eq));
  ImplementingOperator out;
  out.s = -kI * gns.transport(delta.map.matrix);
  out.symmetry_residual = hermitian_residual(out.s);
  return out;
}

/// max over matrix units a and basis vectors h of ||π(δ(a))h - [iS, π(a)]h||.
inline double implementation_check(const GNSRepresentation& gns, const Derivation& delta, const CMatrix& s) {
  const Index n = gns.state().n;
  const CMatrix is = kI * s;
  double worst = 0.0;
  for (Index j = 0; j < n * n; ++j) {
    const CMatrix a = unvec(CVector::Unit(n * n, j), n);
    const CMatrix diff = gns.pi(delta(a)) - commutator(is, gns.pi(a));
    worst = std::max(worst, diff.colwise().norm().maxCoeff());
  }
  return worst;
}

/// max over matrix units a and the sampled t of
/// ||e^{iSt} π(a) e^{-iSt} - π(exp(t δ)(a))||_F.
inline double flow_intertwining_check(const GNSRepresentation& gns, const Derivation& delta, const CMatrix& s,
                                      const std::vector<double>& ts) {
  const Index n = gns.state().n;
  const Eigensystem eig = hermitian_eig(hermitian_part(s));
  double worst = 0.0;
  for (double t : ts) {
    const CVector phases = (kI * t * eig.values.cast<Complex>()).array().exp();
    const CMatrix u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
    const CMatrix alpha = (t * delta.map.matrix).exp();
    for (Index j = 0; j < n * n; ++j) {
      const CMatrix a = unvec(CVector::Unit(n * n, j), n);
      const CMatrix lhs = u * gns.pi(a) * u.adjoint();
      const CMatrix rhs = gns.pi(unvec(alpha.col(j), n));
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  return worst;
}

struct KernelCorrespondence {
  std::vector<Index> restricted_dims;  // dim of ker ad_{iS}^k ∩ π(M_n)
  std::vector<Index> image_dims;       // dim of π(ker δ^k)
  std::vector<double> distances;

  double max_distance() const { return distances.empty() ? 0.0 : *std::max_element(distances.begin(), distances.end()); }
};

/// Compares the kernel of ad_{iS}^k restricted to π(M_n) with π(ker δ^k),
/// both as subspaces of M_{n^2}, for k = 1..n_max.
inline KernelCorrespondence kernel_correspondence(const GNSRepresentation& gns, const Derivation& delta, const CMatrix& s,
                                                  int n_max, double rank_tol = kDefaultRankTol) {
  const Index n = gns.state().n;
  const Index nn = n * n;
  const Index d = gns.hilbert_dim();
  std::vector<CMatrix> images;  // π(E_j)
  for (Index j = 0; j < nn; ++j) images.push_back(gns.pi(unvec(CVector::Unit(nn, j), n)));
  std::vector<CMatrix> current = images;
  const CMatrix is = kI * s;
  CMatrix power = CMatrix::Identity(nn, nn);

  KernelCorrespondence out;
  for (int k = 1; k <= n_max; ++k) {
    CMatrix columns(d * d, nn);
    for (Index j = 0; j < nn; ++j) {
      current[static_cast<std::size_t>(j)] = commutator(is, current[static_cast<std::size_t>(j)]);
      columns.col(j) = vec(current[static_cast<std::size_t>(j)]);
    }
    const CMatrix coeffs = nullspace(columns, rank_tol);
    CMatrix restricted(d * d, coeffs.cols());
    for (Index l = 0; l < coeffs.cols(); ++l) restricted.col(l) = vec(gns.pi(unvec(coeffs.col(l), n)));

    power = power * delta.map.matrix;
    const CMatrix ker = nullspace(power, rank_tol);
    CMatrix image(d * d, ker.cols());
    for (Index l = 0; l < ker.cols(); ++l) image.col(l) = vec(gns.pi(unvec(ker.col(l), n)));

    const OperatorSubspace a = OperatorSubspace::span(d, restricted, rank_tol);
    const OperatorSubspace b = OperatorSubspace::span(d, image, rank_tol);
    out.restricted_dims.push_back(a.dim());
    out.image_dims.push_back(b.dim());
    out.distances.push_back(subspace_distance(a, b));
  }
  return out;
}

inline KernelStabilizationReport abstract_kernel_stabilization(const Derivation& delta, int n_max,
                                                               const StabilizationTolerances& tol = {}) {
  return kernel_stabilization(delta.map, n_max, tol);
}

struct AnalyticSeries {
  std::vector<double> terms;         // t^k/k! ||δ^k(a)||_F, k = 0..k_max
  std::vector<double> partial_sums;
  double lower = 0.0;                // ||a||_F
  double upper = 0.0;                // ||a||_F e^{t ||δ||}
  double map_norm = 0.0;             // operator norm of δ on (M_n, HS)

  bool within_bounds(double rel_slack = 1e-12) const {
    for (double s : partial_sums)
      if (s < lower * (1.0 - rel_slack) || s > upper * (1.0 + rel_slack)) return false;
    return true;
  }
};

inline AnalyticSeries analytic_norm_series(const Derivation& delta, const CMatrix& a, double t, int k_max) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "analytic series needs t > 0");
  if (k_max < 0) fail(ErrorCode::InvalidArgument, "k_max must be non-negative");
  AnalyticSeries out;
  out.map_norm = op_norm(delta.map.matrix);
  out.lower = a.norm();
  out.upper = a.norm() * std::exp(t * out.map_norm);
  CMatrix current = a;
  double coefficient = 1.0;
  double sum = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      current = delta(current);
      coefficient *= t / k;
    }
    const double term = coefficient * current.norm();
    sum += term;
    out.terms.push_back(term);
    out.partial_sums.push_back(sum);
  }
  return out;
}

struct BRTolerances {
  double rank = kDefaultRankTol;
  double subspace = kDefaultSubspaceTol;
  double equilibrium = 1e-9;
  double symmetry = 1e-9;
  double implementation = 1e-9;
  double flow = 1e-8;
};

/// Full implementing-operator pipeline for an inner derivation and a state.
struct BRReport {
  Index n = 0;
  int n_max = 0;
  double equilibrium_residual = 0.0;
  double symmetry_residual = 0.0;
  double implementation_residual = 0.0;
  double flow_residual = 0.0;
  KernelCorrespondence correspondence;
  KernelStabilizationReport stabilization;
  std::vector<double> s_spectrum;
  bool pass = false;
  BRTolerances tolerances;
};

inline std::vector<double> default_flow_times() { return {-1.0, -0.5, 0.25, 0.5, 1.0}; }

inline BRReport br_pipeline(const State& omega, const Derivation& delta, int n_max, const BRTolerances& tol = {}) {
  BRReport rep;
  rep.n = omega.n;
  rep.n_max = n_max;
  rep.tolerances = tol;
  rep.equilibrium_residual = equilibrium_check(omega, delta);
  const GNSRepresentation gns = gns_construct(omega);
  const ImplementingOperator op = implementing_operator(gns, delta, tol.equilibrium);
  rep.symmetry_residual = op.symmetry_residual;
  rep.implementation_residual = implementation_check(gns, delta, op.s);
  rep.flow_residual = flow_intertwining_check(gns, delta, op.s, default_flow_times());
  rep.correspondence = kernel_correspondence(gns, delta, op.s, n_max, tol.rank);
  rep.stabilization = abstract_kernel_stabilization(delta, n_max, {tol.rank, tol.subspace, kDefaultClusterTol});
  const Eigensystem eig = hermitian_eig(hermitian_part(op.s));
  rep.s_spectrum.assign(eig.values.data(), eig.values.data() + eig.values.size());
  rep.pass = rep.symmetry_residual <= tol.symmetry && rep.implementation_residual <= tol.implementation &&
             rep.flow_residual <= tol.flow && rep.correspondence.max_distance() <= tol.subspace && rep.stabilization.pass;
  return rep;
}

inline nlohmann::json to_json(const BRReport& rep) {
  return {{"identity", "BR_implementation"},
          {"n", rep.n},
          {"n_max", rep.n_max},
          {"equilibrium_residual", rep.equilibrium_residual},
          {"symmetry_residual", rep.symmetry_residual},
          {"implementation_residual", rep.implementation_residual},
          {"flow_residual", rep.flow_residual},
          {"kernel_correspondence",
           {{"restricted_dims", rep.correspondence.restricted_dims},
            {"image_dims", rep.correspondence.image_dims},
            {"distances", rep.correspondence.distances}}},
          {"kernel_dims", rep.stabilization.kernel_dims},
          {"distances", rep.stabilization.distances},
          {"s_spectrum", rep.s_spectrum},
          {"pass", rep.pass},
          {"tolerances",
           {{"rank", rep.tolerances.rank},
            {"subspace", rep.tolerances.subspace},
            {"equilibrium", rep.tolerances.equilibrium},
            {"symmetry", rep.tolerances.symmetry},
            {"implementation", rep.tolerances.implementation},
            {"flow", rep.tolerances.flow}}}};
}

}  // namespace derivlab
