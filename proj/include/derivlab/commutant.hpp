#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "derivlab/derivation.hpp"
#include "derivlab/spectral.hpp"
#include "derivlab/subspace.hpp"

namespace derivlab {

/// {x : [g, x] = 0 for every g}, the nullspace of the stacked
/// superoperators I ⊗ g - gᵀ ⊗ I.
inline OperatorSubspace commutant(std::span<const CMatrix> gens, double rank_tol = kDefaultRankTol) {
  if (gens.empty()) fail(ErrorCode::InvalidArgument, "commutant needs at least one generator");
  const Index n = gens.front().rows();
  for (const auto& g : gens) {
    if (g.rows() != n || g.cols() != n) fail(ErrorCode::ShapeMismatch, "generators must all be square of equal size");
    require_finite(g, "generator");
  }
  if (n > dimension_budget()) fail(ErrorCode::DimensionOverflow, "n exceeds dimension budget");
  const Index nn = n * n;
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix stacked(nn * static_cast<Index>(gens.size()), nn);
  double scale = 0.0;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    stacked.middleRows(static_cast<Index>(i) * nn, nn) = kron(id, gens[i]) - kron(gens[i].transpose(), id);
    scale = std::max(scale, gens[i].norm());
  }
  // a generator that is scalar up to rounding commutes with everything
  return OperatorSubspace::from_orthonormal(n, nullspace(stacked, rank_tol, scale));
}

inline OperatorSubspace commutant(const std::vector<CMatrix>& gens, double rank_tol = kDefaultRankTol) {
  return commutant(std::span<const CMatrix>(gens), rank_tol);
}

/// Generators closed under adjoints (non-Hermitian members get their
/// adjoint appended).
inline std::vector<CMatrix> with_adjoints(std::span<const CMatrix> gens) {
  std::vector<CMatrix> out(gens.begin(), gens.end());
  for (const auto& g : gens)
    if (!is_hermitian(g)) out.push_back(g.adjoint());
  return out;
}

inline OperatorSubspace bicommutant(std::span<const CMatrix> gens, double rank_tol = kDefaultRankTol) {
  const std::vector<CMatrix> star_closed = with_adjoints(gens);
  const OperatorSubspace first = commutant(star_closed, rank_tol);
  return commutant(first.basis(), rank_tol);
}

inline OperatorSubspace bicommutant(const std::vector<CMatrix>& gens, double rank_tol = kDefaultRankTol) {
  return bicommutant(std::span<const CMatrix>(gens), rank_tol);
}

/// The von Neumann algebra generated by the spectral projections of D.
inline OperatorSubspace spectral_vn_algebra(const SpectralResolution& res, double rank_tol = kDefaultRankTol) {
  return bicommutant(res.projections, rank_tol);
}

/// Worst residual of the unital *-algebra axioms on a subspace: identity
/// membership, adjoints and pairwise products of basis elements.
inline double algebra_closure_residual(const OperatorSubspace& s) {
  const Index n = s.ambient_dim();
  double worst = s.residual(CMatrix::Identity(n, n));
  const auto basis = s.basis();
  for (const auto& a : basis) {
    worst = std::max(worst, s.residual(a.adjoint()));
    for (const auto& b : basis) worst = std::max(worst, s.residual(a * b));
  }
  return worst;
}

struct KernelCommutantReport {
  Index n = 0;
  std::vector<double> spectrum;
  std::vector<Index> multiplicities;
  Index kernel_dim = 0;           // ker ad_{iD}
  Index commutant_dim = 0;        // {D}'
  Index projection_commutant_dim = 0;  // P_D'
  Index vn_algebra_dim = 0;       // P_D''
  double kernel_vs_commutant = 0.0;
  double kernel_vs_projection_commutant = 0.0;
  double commutant_vs_projection_commutant = 0.0;
  double vn_algebra_containment = 0.0;  // P_D'' inside ker ad
  bool pass = false;
  StabilizationTolerances tolerances;
  double containment_tol = 1e-8;

  double max_distance() const {
    return std::max({kernel_vs_commutant, kernel_vs_projection_commutant, commutant_vs_projection_commutant});
  }
};

/// ker ad_{iD}, {D}' and P_D' compared pairwise, plus P_D'' ⊆ ker ad_{iD}.
inline KernelCommutantReport kernel_commutant_check(const CMatrix& d, const StabilizationTolerances& tol = {},
                                                    double containment_tol = 1e-8) {
  const SpectralResolution res = spectral_resolution(d, tol.cluster);
  const OperatorSubspace kernel = derivation_kernel(d, 1, tol.rank);
  const OperatorSubspace d_commutant = commutant(std::vector<CMatrix>{d}, tol.rank);
  const OperatorSubspace p_commutant = commutant(res.projections, tol.rank);
  const OperatorSubspace vn = spectral_vn_algebra(res, tol.rank);

  KernelCommutantReport rep;
  rep.n = d.rows();
  rep.spectrum = res.distinct_values;
  rep.multiplicities = res.multiplicities;
  rep.tolerances = tol;
  rep.containment_tol = containment_tol;
  rep.kernel_dim = kernel.dim();
  rep.commutant_dim = d_commutant.dim();
  rep.projection_commutant_dim = p_commutant.dim();
  rep.vn_algebra_dim = vn.dim();
  rep.kernel_vs_commutant = subspace_distance(kernel, d_commutant);
  rep.kernel_vs_projection_commutant = subspace_distance(kernel, p_commutant);
  rep.commutant_vs_projection_commutant = subspace_distance(d_commutant, p_commutant);
  rep.vn_algebra_containment = containment_residual(vn, kernel);
  rep.pass = rep.max_distance() <= tol.subspace && rep.vn_algebra_containment <= containment_tol;
  return rep;
}

inline nlohmann::json to_json(const KernelCommutantReport& rep) {
  return {{"identity", "ker=MD_prime"},
          {"n", rep.n},
          {"spectrum", rep.spectrum},
          {"multiplicities", rep.multiplicities},
          {"dims",
           {{"kernel", rep.kernel_dim},
            {"commutant", rep.commutant_dim},
            {"projection_commutant", rep.projection_commutant_dim},
            {"vn_algebra", rep.vn_algebra_dim}}},
          {"distances",
           {{"kernel_vs_commutant", rep.kernel_vs_commutant},
            {"kernel_vs_projection_commutant", rep.kernel_vs_projection_commutant},
            {"commutant_vs_projection_commutant", rep.commutant_vs_projection_commutant}}},
          {"vn_algebra_containment", rep.vn_algebra_containment},
          {"pass", rep.pass},
          {"tolerances",
           {{"rank", rep.tolerances.rank},
            {"subspace", rep.tolerances.subspace},
            {"cluster", rep.tolerances.cluster},
            {"containment", rep.containment_tol}}}};
}

}  // namespace derivlab
