#pragma once

// Dense complex linear algebra used by every other module: Hermitian
// eigendecomposition, numerical nullspaces, Kronecker products and the
// column-stacking vectorization vec(X)_{i + n j} = X_{ij}.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>

#include <Eigen/Dense>

#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

#include "derivlab/error.hpp"

namespace derivlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr Index kDefaultMaxDim = 64;
inline constexpr Complex kI{0.0, 1.0};

/// Largest ambient matrix order admitted for superoperator work.
/// DERIVLAB_MAX_DIM overrides the default of 64.
inline Index dimension_budget() {
  if (const char* env = std::getenv("DERIVLAB_MAX_DIM")) {
    long value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) return static_cast<Index>(value);
  }
  return kDefaultMaxDim;
}

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

inline void require_finite(const CMatrix& m, const char* what) {
  if (!all_finite(m)) fail(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    fail(ErrorCode::ShapeMismatch, std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                                       "x" + std::to_string(m.cols()));
}

inline double frobenius(const CMatrix& m) { return m.norm(); }

enum class SvdVectors { none, thin, full };

struct SingularValueDecomposition {
  RVector values;  // descending
  CMatrix u;       // rows x k (thin) or rows x rows (full); empty for none
  CMatrix v;       // cols x k (thin) or cols x cols (full); empty for none
};

// LAPACK zgesdd. Eigen 3.4.0's BDCSVD loses accuracy on the heavily
// repeated singular values of commutator superoperators.
inline SingularValueDecomposition svd(const CMatrix& m, SvdVectors vectors = SvdVectors::none) {
  require_finite(m, "svd input");
  const Index rows = m.rows();
  const Index cols = m.cols();
  const Index k = std::min(rows, cols);
  SingularValueDecomposition out;
  out.values = RVector::Zero(k);
  if (k == 0) {
    if (vectors == SvdVectors::full) {
      out.u = CMatrix::Identity(rows, rows);
      out.v = CMatrix::Identity(cols, cols);
    } else if (vectors == SvdVectors::thin) {
      out.u = CMatrix(rows, 0);
      out.v = CMatrix(cols, 0);
    }
    return out;
  }
  CMatrix a = m;
  CMatrix u(1, 1);
  CMatrix vt(1, 1);
  char jobz = 'N';
  if (vectors == SvdVectors::thin) {
    jobz = 'S';
    u.resize(rows, k);
    vt.resize(k, cols);
  } else if (vectors == SvdVectors::full) {
    jobz = 'A';
    u.resize(rows, rows);
    vt.resize(cols, cols);
  }
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, jobz, static_cast<lapack_int>(rows), static_cast<lapack_int>(cols), a.data(),
                     static_cast<lapack_int>(rows), out.values.data(), u.data(), static_cast<lapack_int>(u.rows()),
                     vt.data(), static_cast<lapack_int>(vt.rows()));
  if (info > 0) fail(ErrorCode::NoConvergence, "SVD did not converge");
  if (info < 0) fail(ErrorCode::InvalidArgument, "SVD rejected argument " + std::to_string(-info));
  if (vectors != SvdVectors::none) {
    out.u = std::move(u);
    out.v = vt.adjoint();
  }
  return out;
}

inline RVector singular_values(const CMatrix& m) { return svd(m).values; }

/// Spectral (operator) norm.
inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline double hermitian_residual(const CMatrix& m) { return (m - m.adjoint()).norm(); }

inline bool is_hermitian(const CMatrix& m, double rel_tol = kHermitianTol) {
  return m.rows() == m.cols() && hermitian_residual(m) <= rel_tol * std::max(1.0, m.norm());
}

inline void require_hermitian(const CMatrix& m, const char* what, double rel_tol = kHermitianTol) {
  require_square(m, what);
  require_finite(m, what);
  if (!is_hermitian(m, rel_tol))
    fail(ErrorCode::NotHermitian, std::string(what) + ": ||M - M*||_F = " + std::to_string(hermitian_residual(m)));
}

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline CMatrix matrix_unit(Index n, Index r, Index c) {
  CMatrix e = CMatrix::Zero(n, n);
  e(r, c) = 1.0;
  return e;
}

struct Eigensystem {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
};

inline Eigensystem hermitian_eig(const CMatrix& m) {
  require_hermitian(m, "hermitian_eig input");
  if (m.rows() == 0) fail(ErrorCode::InvalidArgument, "hermitian_eig needs n >= 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Orthonormal columns spanning ker M. Singular values at or below
/// rank_tol * sigma_max count as zero; the zero matrix yields the full space.
/// Singular values at or below rank_tol * max(sigma_max, scale) count as zero.
/// A positive scale keeps a numerically zero input from being read as full rank.
inline CMatrix nullspace(const CMatrix& m, double rank_tol = kDefaultRankTol, double scale = 0.0) {
  if (!(rank_tol > 0.0)) fail(ErrorCode::InvalidArgument, "rank_tol must be positive");
  require_finite(m, "nullspace input");
  const Index cols = m.cols();
  if (m.rows() == 0 || m.isZero(0.0)) return CMatrix::Identity(cols, cols);
  const SingularValueDecomposition d = svd(m, m.rows() >= cols ? SvdVectors::thin : SvdVectors::full);
  const double threshold = rank_tol * std::max(d.values(0), scale);
  Index rank = 0;
  while (rank < d.values.size() && d.values(rank) > threshold) ++rank;
  return d.v.rightCols(cols - rank);
}

/// (A ⊗ B)_{(i p + k),(j q + l)} = A_ij B_kl for B of shape p×q.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Index budget = dimension_budget();
  const double limit = std::pow(static_cast<double>(budget), 4.0);
  const double entries = static_cast<double>(a.rows() * b.rows()) * static_cast<double>(a.cols() * b.cols());
  if (entries > limit)
    fail(ErrorCode::DimensionOverflow, "Kronecker product with " + std::to_string(a.rows() * b.rows()) + " rows exceeds budget n=" +
                                           std::to_string(budget));
  const Index p = b.rows();
  const Index q = b.cols();
  CMatrix out(a.rows() * p, a.cols() * q);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * p, j * q, p, q) = a(i, j) * b;
  return out;
}

/// Column stacking: vec(X)_{i + rows * j} = X_ij.
inline CVector vec(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

inline CMatrix unvec(const CVector& v, Index n) {
  if (n < 0 || v.size() != n * n)
    fail(ErrorCode::ShapeMismatch, "unvec: length " + std::to_string(v.size()) + " is not " + std::to_string(n) + "^2");
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

/// Square root of a length that must be a perfect square.
inline Index isqrt_exact(Index length) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(length))));
  if (n * n != length) fail(ErrorCode::ShapeMismatch, std::to_string(length) + " is not a perfect square");
  return n;
}

}  // namespace derivlab
