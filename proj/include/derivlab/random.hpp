#pragma once

// Reproducible instance generation. The generator is xoshiro256** seeded
// through splitmix64; normals come from Box-Muller on 53-bit uniforms so a
// seed reproduces the same instances in any implementation of the same
// algorithms.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "derivlab/numlin.hpp"

namespace derivlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a base seed with stream identifiers into an independent seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t k : keys) {
    state ^= k + 0x632be59bd9b4e019ULL + (out << 6) + (out >> 2);
    out = splitmix64(state);
  }
  return out;
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Standard complex normal: real and imaginary parts each N(0, 1/2).
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * (0.5 * std::numbers::sqrt2);
  }

  Index index(Index bound) { return static_cast<Index>(uniform() * static_cast<double>(bound)); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline CMatrix gaussian_matrix(Index rows, Index cols, Xoshiro256& rng) {
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline CVector gaussian_vector(Index n, Xoshiro256& rng) { return gaussian_matrix(n, 1, rng).col(0); }

/// GUE-style Hermitian matrix (G + G*)/2.
inline CMatrix random_hermitian(Index n, Xoshiro256& rng) { return hermitian_part(gaussian_matrix(n, n, rng)); }

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of diag(R) divided out.
inline CMatrix haar_unitary(Index n, Xoshiro256& rng) {
  const CMatrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

/// Distinct, well separated spectral values: consecutive gaps in [0.5, 1.5),
/// centred at zero.
inline std::vector<double> separated_values(std::size_t count, Xoshiro256& rng) {
  std::vector<double> values(count);
  double current = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) current += rng.uniform(0.5, 1.5);
    values[i] = current;
  }
  const double mid = count == 0 ? 0.0 : (values.front() + values.back()) / 2.0;
  for (double& v : values) v -= mid;
  return values;
}

struct PrescribedHermitian {
  CMatrix matrix;
  CMatrix unitary;
  std::vector<double> values;         // one per multiplicity block
  std::vector<Index> multiplicities;  // block sizes, summing to n
};

/// U diag(λ_1 repeated m_1 times, ...) U* with separated λ and Haar U.
inline PrescribedHermitian hermitian_with_multiplicity(std::span<const Index> multiplicities, Xoshiro256& rng) {
  if (multiplicities.empty()) fail(ErrorCode::BadMultiplicities, "multiplicity list is empty");
  Index n = 0;
  for (Index m : multiplicities) {
    if (m <= 0) fail(ErrorCode::BadMultiplicities, "multiplicities must be positive");
    n += m;
  }
  PrescribedHermitian out;
  out.values = separated_values(multiplicities.size(), rng);
  out.multiplicities.assign(multiplicities.begin(), multiplicities.end());
  out.unitary = haar_unitary(n, rng);
  RVector diag(n);
  Index pos = 0;
  for (std::size_t b = 0; b < multiplicities.size(); ++b)
    for (Index r = 0; r < multiplicities[b]; ++r) diag(pos++) = out.values[b];
  out.matrix = hermitian_part(out.unitary * diag.cast<Complex>().asDiagonal() * out.unitary.adjoint());
  return out;
}

/// Random split of n into positive parts; roughly half of the draws are
/// simple spectra.
inline std::vector<Index> random_multiplicities(Index n, Xoshiro256& rng) {
  std::vector<Index> parts;
  if (rng.uniform() < 0.5) return std::vector<Index>(static_cast<std::size_t>(n), 1);
  Index remaining = n;
  while (remaining > 0) {
    const Index cap = std::min<Index>(remaining, 3);
    const Index m = 1 + rng.index(cap);
    parts.push_back(m);
    remaining -= m;
  }
  return parts;
}

/// Faithful density matrix G G* / tr(G G*), G complex Gaussian.
inline CMatrix random_density(Index n, Xoshiro256& rng) {
  const CMatrix g = gaussian_matrix(n, n, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

struct EquilibriumInstance {
  CMatrix rho;
  CMatrix generator;
  std::vector<Index> multiplicities;
};

/// A generator with prescribed multiplicities and a faithful density matrix
/// that commutes with it (random positive blocks on each eigenspace).
inline EquilibriumInstance equilibrium_instance(std::span<const Index> multiplicities, Xoshiro256& rng) {
  PrescribedHermitian gen = hermitian_with_multiplicity(multiplicities, rng);
  const Index n = gen.matrix.rows();
  CMatrix block_rho = CMatrix::Zero(n, n);
  Index pos = 0;
  for (Index m : gen.multiplicities) {
    const CMatrix g = gaussian_matrix(m, m, rng);
    block_rho.block(pos, pos, m, m) = g * g.adjoint() + 0.1 * CMatrix::Identity(m, m);
    pos += m;
  }
  CMatrix rho = gen.unitary * block_rho * gen.unitary.adjoint();
  rho /= rho.trace().real();
  return {hermitian_part(rho), gen.matrix, gen.multiplicities};
}

}  // namespace derivlab
