#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "derivlab/numlin.hpp"

namespace derivlab {

/// Orthonormal (Hilbert-Schmidt) basis of a subspace of M_n, stored as the
/// n^2 x dim matrix of vectorized basis elements.
class OperatorSubspace {
 public:
  OperatorSubspace() = default;

  /// Wraps columns that are already orthonormal; the Gram matrix is checked.
  static OperatorSubspace from_orthonormal(Index n, CMatrix coordinates, double gram_tol = 1e-10) {
    if (coordinates.rows() != n * n)
      fail(ErrorCode::ShapeMismatch, "subspace coordinates need " + std::to_string(n * n) + " rows");
    const CMatrix gram = coordinates.adjoint() * coordinates;
    const double err = (gram - CMatrix::Identity(gram.rows(), gram.cols())).norm();
    if (err > gram_tol) fail(ErrorCode::InvalidArgument, "basis is not orthonormal, Gram error " + std::to_string(err));
    OperatorSubspace s;
    s.n_ = n;
    s.coords_ = std::move(coordinates);
    return s;
  }

  /// Span of arbitrary vectorized elements (columns), orthonormalized by SVD.
  static OperatorSubspace span(Index n, const CMatrix& columns, double rank_tol = kDefaultRankTol) {
    if (columns.rows() != n * n)
      fail(ErrorCode::ShapeMismatch, "span: columns need " + std::to_string(n * n) + " rows");
    OperatorSubspace s;
    s.n_ = n;
    s.coords_ = CMatrix(n * n, 0);
    if (columns.cols() == 0 || columns.isZero(0.0)) return s;
    const SingularValueDecomposition d = svd(columns, SvdVectors::thin);
    Index rank = 0;
    while (rank < d.values.size() && d.values(rank) > rank_tol * d.values(0)) ++rank;
    s.coords_ = d.u.leftCols(rank);
    return s;
  }

  static OperatorSubspace span_of(Index n, std::span<const CMatrix> elements, double rank_tol = kDefaultRankTol) {
    CMatrix cols(n * n, static_cast<Index>(elements.size()));
    for (Index j = 0; j < cols.cols(); ++j) {
      const CMatrix& e = elements[static_cast<std::size_t>(j)];
      if (e.rows() != n || e.cols() != n) fail(ErrorCode::ShapeMismatch, "span_of: element is not n x n");
      cols.col(j) = vec(e);
    }
    return span(n, cols, rank_tol);
  }

  static OperatorSubspace full(Index n) { return from_orthonormal(n, CMatrix::Identity(n * n, n * n)); }

  Index ambient_dim() const { return n_; }
  Index dim() const { return coords_.cols(); }
  const CMatrix& coordinates() const { return coords_; }

  CMatrix element(Index j) const { return unvec(coords_.col(j), n_); }

  std::vector<CMatrix> basis() const {
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (Index j = 0; j < dim(); ++j) out.push_back(element(j));
    return out;
  }

  CMatrix project(const CMatrix& x) const {
    const CVector v = vec(x);
    return unvec(coords_ * (coords_.adjoint() * v), n_);
  }

  /// ||x - Π x||_F
  double residual(const CMatrix& x) const {
    const CVector v = vec(x);
    return (v - coords_ * (coords_.adjoint() * v)).norm();
  }

  bool contains(const CMatrix& x, double tol) const { return residual(x) <= tol; }

  /// Explicit n^2 x n^2 orthogonal projector.
  CMatrix projector() const { return coords_ * coords_.adjoint(); }

 private:
  Index n_ = 0;
  CMatrix coords_;
};

/// ||(I - Π_outer) B_inner||_F for orthonormal column bases; equals
/// ||(I - Π_outer) Π_inner||_F.
inline double containment_residual_columns(const CMatrix& inner, const CMatrix& outer) {
  if (inner.rows() != outer.rows()) fail(ErrorCode::AmbientMismatch, "subspaces live in different spaces");
  if (inner.cols() == 0) return 0.0;
  return (inner - outer * (outer.adjoint() * inner)).norm();
}

/// ||Π_1 - Π_2||_F for orthonormal column bases, evaluated as
/// sqrt(||(I-Π_2)B_1||^2 + ||(I-Π_1)B_2||^2) to avoid cancellation.
inline double subspace_distance_columns(const CMatrix& b1, const CMatrix& b2) {
  const double r1 = containment_residual_columns(b1, b2);
  const double r2 = containment_residual_columns(b2, b1);
  return std::sqrt(r1 * r1 + r2 * r2);
}

inline double subspace_distance(const OperatorSubspace& s1, const OperatorSubspace& s2) {
  if (s1.ambient_dim() != s2.ambient_dim()) fail(ErrorCode::AmbientMismatch, "subspace_distance: ambient dimensions differ");
  return subspace_distance_columns(s1.coordinates(), s2.coordinates());
}

inline double containment_residual(const OperatorSubspace& inner, const OperatorSubspace& outer) {
  if (inner.ambient_dim() != outer.ambient_dim())
    fail(ErrorCode::AmbientMismatch, "containment_residual: ambient dimensions differ");
  return containment_residual_columns(inner.coordinates(), outer.coordinates());
}

}  // namespace derivlab
