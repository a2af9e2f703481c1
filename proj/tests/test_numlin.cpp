#include <cmath>
#include <sstream>

#include "test_support.hpp"

using namespace derivlab;
using testing_support::diag;

namespace {

CMatrix orthonormal_columns(Index rows, Index cols, Xoshiro256& rng) {
  return haar_unitary(rows, rng).leftCols(cols);
}

}  // namespace

TEST(HermitianEig, IdentityHasUnitEigenvalues) {
  const Eigensystem es = hermitian_eig(CMatrix::Identity(3, 3));
  EXPECT_TRUE(es.values.isApprox(RVector::Ones(3)));
  EXPECT_LE((es.vectors.adjoint() * es.vectors - CMatrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(HermitianEig, DiagonalIsSortedByPermutation) {
  const Eigensystem es = hermitian_eig(diag({2, 0, 1}));
  EXPECT_DOUBLE_EQ(es.values(0), 0.0);
  EXPECT_DOUBLE_EQ(es.values(1), 1.0);
  EXPECT_DOUBLE_EQ(es.values(2), 2.0);
  // every column is ± a unit vector
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(es.vectors.col(j).cwiseAbs().maxCoeff(), 1.0, 1e-14);
}

TEST(HermitianEig, ReconstructionResidual) {
  Xoshiro256 rng(11);
  for (Index n : {1, 2, 5, 9}) {
    const CMatrix m = random_hermitian(n, rng);
    const Eigensystem es = hermitian_eig(m);
    const CMatrix rebuilt = es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
    EXPECT_LE((m - rebuilt).norm(), 1e-10 * std::max(1.0, m.norm())) << "n=" << n;
  }
}

TEST(HermitianEig, RejectsNonHermitian) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  try {
    hermitian_eig(m);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(HermitianEig, RejectsNonFinite) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(hermitian_eig(m), Error);
}

TEST(Nullspace, ZeroMatrixIsFullSpace) { EXPECT_EQ(nullspace(CMatrix::Zero(3, 3)).cols(), 3); }

TEST(Nullspace, DiagonalWithOneZero) {
  const CMatrix k = nullspace(diag({1, 0, 2}));
  ASSERT_EQ(k.cols(), 1);
  EXPECT_NEAR(std::abs(k(1, 0)), 1.0, 1e-14);
}

TEST(Nullspace, RankOneProjectorLeavesOrthogonalComplement) {
  Xoshiro256 rng(5);
  const CVector u = gaussian_vector(4, rng).normalized();
  const CMatrix k = nullspace(u * u.adjoint());
  ASSERT_EQ(k.cols(), 3);
  EXPECT_LE((u.adjoint() * k).norm(), 1e-12);
  // oracle: complement projector I - u u*
  const CMatrix complement = CMatrix::Identity(4, 4) - u * u.adjoint();
  EXPECT_LE((k * k.adjoint() - complement).norm(), 1e-12);
}

TEST(Nullspace, DiagonalCountProperty) {
  Xoshiro256 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + rng.index(10);
    CMatrix m = CMatrix::Zero(n, n);
    Index zeros = 0;
    for (Index i = 0; i < n; ++i) {
      if (rng.uniform() < 0.4) {
        ++zeros;
      } else {
        m(i, i) = rng.uniform(0.5, 3.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      }
    }
    EXPECT_EQ(nullspace(m).cols(), zeros);
  }
}

TEST(Nullspace, RepeatedSingularValuesOfSuperoperators) {
  // many exactly repeated singular values; kernel dimension is Σ m²
  Xoshiro256 rng(3);
  const std::vector<Index> mult = {2, 1, 1, 3};
  const PrescribedHermitian d = hermitian_with_multiplicity(mult, rng);
  const CMatrix sup = kron(CMatrix::Identity(7, 7), d.matrix) - kron(d.matrix.transpose(), CMatrix::Identity(7, 7));
  EXPECT_EQ(nullspace(sup).cols(), 4 + 1 + 1 + 9);
}

TEST(Nullspace, WideAndTallInputs) {
  Xoshiro256 rng(8);
  EXPECT_EQ(nullspace(gaussian_matrix(2, 5, rng)).cols(), 3);
  EXPECT_EQ(nullspace(gaussian_matrix(6, 3, rng)).cols(), 0);
}

TEST(Kron, Identities) {
  EXPECT_EQ(kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)), CMatrix::Identity(4, 4));
  EXPECT_EQ(kron(diag({1, 2}), CMatrix::Identity(2, 2)), diag({1, 1, 2, 2}));
}

TEST(Kron, MatchesEntrywiseOracle) {
  Xoshiro256 rng(9);
  const CMatrix a = gaussian_matrix(2, 3, rng);
  const CMatrix b = gaussian_matrix(3, 2, rng);
  EXPECT_LE((kron(a, b) - testing_support::kron_oracle(a, b)).norm(), 1e-15);
}

TEST(Kron, VecIdentity) {
  Xoshiro256 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + rng.index(6);
    const CMatrix a = gaussian_matrix(n, n, rng);
    const CMatrix x = gaussian_matrix(n, n, rng);
    const CMatrix b = gaussian_matrix(n, n, rng);
    const CVector lhs = vec(a * x * b);
    const CVector rhs = kron(b.transpose(), a) * vec(x);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST(Kron, DimensionBudget) {
  CMatrix big = CMatrix::Identity(65, 65);
  try {
    kron(big, big);
    FAIL() << "expected DimensionOverflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionOverflow);
  }
}

TEST(Vec, ColumnStacking) {
  CVector expected(4);
  expected << 1, 0, 0, 1;
  EXPECT_EQ(vec(CMatrix::Identity(2, 2)), expected);
  const CVector e01 = vec(matrix_unit(2, 0, 1));
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(e01(i), i == 2 ? Complex(1.0) : Complex(0.0));
}

TEST(Vec, RoundTrip) {
  Xoshiro256 rng(12);
  const CMatrix x = gaussian_matrix(4, 4, rng);
  EXPECT_EQ(unvec(vec(x), 4), x);
}

TEST(Vec, UnvecRejectsWrongLength) {
  try {
    unvec(CVector::Zero(5), 2);
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(SubspaceDistance, SelfIsZero) {
  Xoshiro256 rng(13);
  const OperatorSubspace s = OperatorSubspace::span(3, gaussian_matrix(9, 4, rng));
  EXPECT_LE(subspace_distance(s, s), 1e-14);
}

TEST(SubspaceDistance, OrthogonalLinesInC2) {
  const CMatrix e0 = CMatrix::Identity(2, 2).col(0);
  const CMatrix e1 = CMatrix::Identity(2, 2).col(1);
  EXPECT_NEAR(subspace_distance_columns(e0, e1), std::sqrt(2.0), 1e-15);
}

TEST(SubspaceDistance, ReorthonormalizedCopy) {
  Xoshiro256 rng(14);
  const CMatrix cols = gaussian_matrix(16, 5, rng);
  const OperatorSubspace s1 = OperatorSubspace::span(4, cols);
  // same span, different generating set
  const CMatrix mixed = cols * gaussian_matrix(5, 5, rng);
  const OperatorSubspace s2 = OperatorSubspace::span(4, mixed);
  EXPECT_LE(subspace_distance(s1, s2), 1e-10);
  const CMatrix p1 = testing_support::projector_oracle(cols);
  EXPECT_LE((s2.projector() - p1).norm(), 1e-10);
}

TEST(SubspaceDistance, MetricProperties) {
  Xoshiro256 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 3;
    const Index k = 1 + rng.index(8);
    const CMatrix a = orthonormal_columns(n * n, k, rng);
    const CMatrix b = orthonormal_columns(n * n, k, rng);
    const CMatrix c = orthonormal_columns(n * n, k, rng);
    const double ab = subspace_distance_columns(a, b);
    EXPECT_NEAR(ab, subspace_distance_columns(b, a), 1e-10);
    EXPECT_LE(subspace_distance_columns(a, c), ab + subspace_distance_columns(b, c) + 1e-10);
    // agrees with the projector-difference oracle
    EXPECT_NEAR(ab, (a * a.adjoint() - b * b.adjoint()).norm(), 1e-10);
  }
}

TEST(SubspaceDistance, AmbientMismatch) {
  try {
    subspace_distance(OperatorSubspace::full(2), OperatorSubspace::full(3));
    FAIL() << "expected AmbientMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbientMismatch);
  }
}

TEST(OperatorSubspace, ProjectAndContains) {
  const CMatrix d = diag({0, 1, 2});
  std::vector<CMatrix> diagonals;
  for (Index i = 0; i < 3; ++i) diagonals.push_back(matrix_unit(3, i, i));
  const OperatorSubspace s = OperatorSubspace::span_of(3, diagonals);
  EXPECT_EQ(s.dim(), 3);
  EXPECT_TRUE(s.contains(d, 1e-12));
  EXPECT_FALSE(s.contains(matrix_unit(3, 0, 1), 1e-12));
  EXPECT_LE((s.project(matrix_unit(3, 0, 1))).norm(), 1e-14);
}

TEST(OperatorSubspace, FromOrthonormalRejectsNonOrthonormal) {
  CMatrix cols = CMatrix::Zero(4, 2);
  cols(0, 0) = 1.0;
  cols(0, 1) = 1.0;
  EXPECT_THROW(OperatorSubspace::from_orthonormal(2, cols), Error);
}

TEST(MatrixIo, TextRoundTripIsExact) {
  Xoshiro256 rng(16);
  const CMatrix m = gaussian_matrix(3, 4, rng);
  EXPECT_EQ(matrix_from_text(matrix_to_text(m)), m);
}

TEST(MatrixIo, JsonRoundTripIsExact) {
  Xoshiro256 rng(17);
  const CMatrix m = gaussian_matrix(3, 3, rng);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
  EXPECT_EQ(matrix_from_json(nlohmann::json::parse("[[1, 0], [0, 1]]")), CMatrix::Identity(2, 2));
}

TEST(MatrixIo, MalformedText) {
  try {
    matrix_from_text("2 2\n1 0\n0 0\n");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}
