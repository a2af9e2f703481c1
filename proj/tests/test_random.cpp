#include <algorithm>
#include <numeric>

#include "test_support.hpp"

using namespace derivlab;

TEST(Splitmix64, ReferenceValue) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
}

TEST(Xoshiro256, ReferenceStream) {
  // independent reimplementation of xoshiro256** seeded through splitmix64
  Xoshiro256 rng(0);
  EXPECT_EQ(rng(), 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(rng(), 0xbf6e1f784956452aULL);
  EXPECT_EQ(rng(), 0x1a5f849d4933e6e0ULL);
  Xoshiro256 other(42);
  EXPECT_EQ(other(), 0x15780b2e0c2ec716ULL);
  EXPECT_EQ(other(), 0x6104d9866d113a7eULL);
}

TEST(Xoshiro256, UniformRangeAndMoments) {
  Xoshiro256 rng(1);
  double sum = 0.0;
  double sq = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / count, 0.0, 0.05);
  EXPECT_NEAR(sq / count, 1.0, 0.05);
}

TEST(DeriveSeed, DistinctStreams) {
  EXPECT_NE(derive_seed(7, {1, 2, 3}), derive_seed(7, {1, 2, 4}));
  EXPECT_NE(derive_seed(7, {1, 2, 3}), derive_seed(8, {1, 2, 3}));
  EXPECT_EQ(derive_seed(7, {1, 2, 3}), derive_seed(7, {1, 2, 3}));
}

TEST(Generators, SameSeedIsBitIdentical) {
  Xoshiro256 a(3);
  Xoshiro256 b(3);
  EXPECT_EQ(random_hermitian(6, a), random_hermitian(6, b));
  EXPECT_EQ(random_density(4, a), random_density(4, b));
}

TEST(Generators, HaarUnitaryIsUnitary) {
  Xoshiro256 rng(4);
  for (Index n : {1, 3, 8}) {
    const CMatrix u = haar_unitary(n, rng);
    EXPECT_LE((u.adjoint() * u - CMatrix::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(Generators, PrescribedMultiplicitiesRoundTrip) {
  Xoshiro256 rng(5);
  const std::vector<Index> mult = {2, 1};
  const PrescribedHermitian d = hermitian_with_multiplicity(mult, rng);
  EXPECT_TRUE(is_hermitian(d.matrix));
  const SpectralResolution res = spectral_resolution(d.matrix);
  std::vector<Index> got = res.multiplicities;
  std::vector<Index> want = mult;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
}

TEST(Generators, BadMultiplicities) {
  Xoshiro256 rng(6);
  const std::vector<Index> bad = {2, 0};
  try {
    hermitian_with_multiplicity(bad, rng);
    FAIL() << "expected BadMultiplicities";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadMultiplicities);
  }
}

TEST(Generators, RandomMultiplicitiesSumToN) {
  Xoshiro256 rng(7);
  for (Index n = 1; n <= 12; ++n) {
    const auto m = random_multiplicities(n, rng);
    EXPECT_EQ(std::accumulate(m.begin(), m.end(), Index{0}), n);
  }
}

TEST(Generators, DensityIsAValidFaithfulState) {
  Xoshiro256 rng(8);
  const CMatrix rho = random_density(5, rng);
  const State omega = state_from_density(rho);
  EXPECT_TRUE(omega.faithful);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-14);
}

TEST(Generators, EquilibriumInstanceCommutes) {
  Xoshiro256 rng(9);
  const std::vector<Index> mult = {2, 1, 3};
  const EquilibriumInstance inst = equilibrium_instance(mult, rng);
  EXPECT_LE(commutator(inst.rho, inst.generator).norm(), 1e-12);
  EXPECT_TRUE(state_from_density(inst.rho).faithful);
}
