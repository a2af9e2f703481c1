#include "test_support.hpp"

using namespace derivlab;
using testing_support::diag;

TEST(Commutant, OfIdentityIsEverything) {
  EXPECT_EQ(commutant(std::vector<CMatrix>{CMatrix::Identity(3, 3)}).dim(), 9);
}

TEST(Commutant, OfPositionOperatorIsDiagonal) {
  const OperatorSubspace c = commutant(std::vector<CMatrix>{diag({0, 1, 2})});
  EXPECT_EQ(c.dim(), 3);
  for (Index i = 0; i < 3; ++i) EXPECT_TRUE(c.contains(matrix_unit(3, i, i), 1e-12));
}

TEST(Commutant, IrreduciblePairInM2) {
  CMatrix sx = CMatrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  const OperatorSubspace c = commutant(std::vector<CMatrix>{sx, diag({1, -1})});
  ASSERT_EQ(c.dim(), 1);
  // oracle: x = [[a,b],[c,d]] commuting with σ_x and σ_z forces b = c = 0 and a = d
  EXPECT_TRUE(c.contains(CMatrix::Identity(2, 2), 1e-12));
}

TEST(Commutant, RejectsEmptyAndMismatched) {
  try {
    commutant(std::vector<CMatrix>{});
    FAIL() << "expected InvalidArgument";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    commutant(std::vector<CMatrix>{CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)});
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Bicommutant, OfIdentityIsScalars) {
  const OperatorSubspace b = bicommutant(std::vector<CMatrix>{CMatrix::Identity(3, 3)});
  ASSERT_EQ(b.dim(), 1);
  EXPECT_TRUE(b.contains(CMatrix::Identity(3, 3), 1e-12));
}

TEST(Bicommutant, OfSpectralProjectionsIsDiagonal) {
  const SpectralResolution res = spectral_resolution(diag({0, 1, 2}));
  EXPECT_EQ(bicommutant(res.projections).dim(), 3);
}

TEST(Bicommutant, NonSelfAdjointGeneratorIsAugmented) {
  // {E01, E10}' = C I, so the bicommutant is all of M_2
  EXPECT_EQ(bicommutant(std::vector<CMatrix>{matrix_unit(2, 0, 1)}).dim(), 4);
}

TEST(SpectralVnAlgebra, Dimensions) {
  EXPECT_EQ(spectral_vn_algebra(spectral_resolution(CMatrix::Identity(3, 3))).dim(), 1);
  EXPECT_EQ(spectral_vn_algebra(spectral_resolution(diag({0, 1, 2}))).dim(), 3);
  EXPECT_EQ(spectral_vn_algebra(spectral_resolution(diag({1, 1, 2}))).dim(), 2);
}

TEST(CommutantProperties, OrderReversal) {
  Xoshiro256 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 2 + rng.index(4);
    std::vector<CMatrix> small = {random_hermitian(n, rng)};
    std::vector<CMatrix> large = small;
    large.push_back(random_hermitian(n, rng));
    EXPECT_LE(containment_residual(commutant(large), commutant(small)), 1e-9);
  }
}

TEST(CommutantProperties, TripleCommutantEqualsCommutant) {
  Xoshiro256 rng(52);
  for (int trial = 0; trial < 6; ++trial) {
    const Index n = 2 + rng.index(4);
    const CMatrix d = hermitian_with_multiplicity(random_multiplicities(n, rng), rng).matrix;
    const OperatorSubspace once = commutant(std::vector<CMatrix>{d});
    const OperatorSubspace twice = commutant(once.basis());
    const OperatorSubspace thrice = commutant(twice.basis());
    EXPECT_LE(subspace_distance(thrice, once), 1e-8);
  }
}

TEST(CommutantProperties, BicommutantIsAVonNeumannAlgebra) {
  Xoshiro256 rng(53);
  for (int trial = 0; trial < 6; ++trial) {
    const Index n = 2 + rng.index(4);
    const std::vector<CMatrix> gens = {gaussian_matrix(n, n, rng) * (rng.uniform() < 0.5 ? 0.0 : 1.0) +
                                       hermitian_with_multiplicity(random_multiplicities(n, rng), rng).matrix};
    EXPECT_LE(algebra_closure_residual(bicommutant(gens)), 1e-9);
  }
  const SpectralResolution res = spectral_resolution(hermitian_with_multiplicity(std::vector<Index>{2, 1, 2}, rng).matrix);
  EXPECT_LE(algebra_closure_residual(spectral_vn_algebra(res)), 1e-9);
}

TEST(KernelCommutant, PositionOperator) {
  const KernelCommutantReport rep = kernel_commutant_check(diag({0, 1, 2}));
  EXPECT_EQ(rep.kernel_dim, 3);
  EXPECT_EQ(rep.commutant_dim, 3);
  EXPECT_EQ(rep.projection_commutant_dim, 3);
  EXPECT_LE(rep.max_distance(), 1e-8);
  EXPECT_TRUE(rep.pass);
}

TEST(KernelCommutant, IdentityGenerator) {
  const KernelCommutantReport rep = kernel_commutant_check(CMatrix::Identity(3, 3));
  EXPECT_EQ(rep.kernel_dim, 9);
  EXPECT_EQ(rep.commutant_dim, 9);
  EXPECT_EQ(rep.projection_commutant_dim, 9);
  EXPECT_EQ(rep.vn_algebra_dim, 1);
  EXPECT_LE(rep.vn_algebra_containment, 1e-12);
  EXPECT_TRUE(rep.pass);
}

TEST(KernelCommutant, SimpleSpectrumInDimensionSeven) {
  Xoshiro256 rng(54);
  const KernelCommutantReport rep = kernel_commutant_check(hermitian_with_multiplicity(std::vector<Index>(7, 1), rng).matrix);
  EXPECT_EQ(rep.kernel_dim, 7);
  EXPECT_EQ(rep.commutant_dim, 7);
  EXPECT_EQ(rep.projection_commutant_dim, 7);
  EXPECT_TRUE(rep.pass);
}

TEST(KernelCommutant, RandomMultiplicities) {
  Xoshiro256 rng(55);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = 2 + rng.index(8);
    const std::vector<Index> mult = random_multiplicities(n, rng);
    const KernelCommutantReport rep = kernel_commutant_check(hermitian_with_multiplicity(mult, rng).matrix);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.kernel_dim, commutant_dimension(mult));
    EXPECT_EQ(rep.vn_algebra_dim, static_cast<Index>(mult.size()));
  }
}

TEST(KernelCommutant, JsonCarriesIdentityTag) {
  const nlohmann::json j = to_json(kernel_commutant_check(diag({0, 1})));
  EXPECT_EQ(j["identity"], "ker=MD_prime");
  EXPECT_EQ(j["dims"]["kernel"], 2);
}
