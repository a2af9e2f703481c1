#pragma once

// Discretized position/momentum pairs and the commutation relation
// [A, B]k = ik on a set of smooth test vectors, plus the trace obstruction
// and the rigidity statement for commutators that commute with D.

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "derivlab/commutant.hpp"
#include "derivlab/derivation.hpp"
#include "derivlab/matrix_io.hpp"
#include "derivlab/random.hpp"

namespace derivlab {

enum class Scheme { schrodinger_line, periodic_interval };

inline std::string to_string(Scheme s) { return s == Scheme::schrodinger_line ? "schrodinger_line" : "periodic_interval"; }

/// Shape parameters of a default test vector, relative to the domain:
/// Gaussians use (center, width) = (μ/L, σ/L); bumps use absolute (c, w) on [0,1).
struct TestProfile {
  double center;
  double width;
};

inline const std::vector<TestProfile>& line_profiles() {
  static const std::vector<TestProfile> profiles = {{0.0, 0.1},   {0.1, 0.1},  {-0.1, 0.1},  {0.2, 0.1},
                                                    {-0.2, 0.1},  {0.0, 0.13}, {0.05, 0.08}, {-0.15, 0.09}};
  return profiles;
}

inline const std::vector<TestProfile>& interval_profiles() {
  static const std::vector<TestProfile> profiles = {{0.5, 0.25}, {0.45, 0.2}, {0.55, 0.2}, {0.4, 0.15},
                                                    {0.6, 0.15}, {0.5, 0.3},  {0.35, 0.2}, {0.65, 0.2}};
  return profiles;
}

struct DiscretizedPair {
  Index n = 0;
  CMatrix a;  // momentum-like
  CMatrix b;  // position-like
  std::vector<double> grid;
  std::vector<CVector> test_domain;  // unit vectors
  std::vector<int> vector_ids;       // index into the default profile list
  Scheme scheme = Scheme::schrodinger_line;
  double h = 0.0;
  double half_width = 0.0;  // L for the line scheme
};

inline CVector gaussian_samples(const std::vector<double>& grid, double mu, double sigma) {
  CVector v(static_cast<Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double z = (grid[j] - mu) / sigma;
    v(static_cast<Index>(j)) = std::exp(-0.5 * z * z);
  }
  return v / v.norm();
}

/// exp(1 - 1/(1 - s²)) for |s| < 1, s = (x - c)/w, else 0.
inline CVector bump_samples(const std::vector<double>& grid, double c, double w) {
  CVector v = CVector::Zero(static_cast<Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = (grid[j] - c) / w;
    if (std::abs(s) < 1.0) v(static_cast<Index>(j)) = std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  const double norm = v.norm();
  return norm > 0.0 ? CVector(v / norm) : v;
}

/// Central differences (v_{j+1} - v_{j-1})/(2h); periodic wraps around,
/// otherwise the first and last rows are zero.
inline CMatrix central_difference(Index n, double h, bool periodic) {
  CMatrix c = CMatrix::Zero(n, n);
  const double w = 1.0 / (2.0 * h);
  for (Index j = 0; j < n; ++j) {
    if (!periodic && (j == 0 || j == n - 1)) continue;
    c(j, (j + 1) % n) += w;
    c(j, (j + n - 1) % n) -= w;
  }
  return c;
}

inline DiscretizedPair schrodinger_pair(Index n, double half_width) {
  if (n < 16) fail(ErrorCode::InvalidArgument, "schrodinger_pair needs n >= 16");
  if (!(half_width > 0.0)) fail(ErrorCode::InvalidArgument, "half-width must be positive");
  DiscretizedPair pair;
  pair.n = n;
  pair.scheme = Scheme::schrodinger_line;
  pair.half_width = half_width;
  pair.h = 2.0 * half_width / static_cast<double>(n - 1);
  RVector x(n);
  for (Index j = 0; j < n; ++j) {
    x(j) = -half_width + static_cast<double>(j) * pair.h;
    pair.grid.push_back(x(j));
  }
  pair.b = x.cast<Complex>().asDiagonal();
  pair.a = hermitian_part(kI * central_difference(n, pair.h, false));

  const auto& profiles = line_profiles();
  for (std::size_t id = 0; id < profiles.size(); ++id) {
    const double sigma = profiles[id].width * half_width;
    if (sigma < 4.0 * pair.h) continue;
    CVector v = gaussian_samples(pair.grid, profiles[id].center * half_width, sigma);
    double edge = 0.0;
    for (Index j = 0; j < 5; ++j) edge = std::max({edge, std::abs(v(j)), std::abs(v(n - 1 - j))});
    if (edge >= 1e-8) continue;
    pair.test_domain.push_back(std::move(v));
    pair.vector_ids.push_back(static_cast<int>(id));
  }
  if (pair.test_domain.empty())
    fail(ErrorCode::GridTooCoarse, "no default Gaussian satisfies sigma >= 4h with boundary decay at n=" + std::to_string(n));
  return pair;
}

inline DiscretizedPair periodic_pair(Index n) {
  if (n < 16) fail(ErrorCode::InvalidArgument, "periodic_pair needs n >= 16");
  DiscretizedPair pair;
  pair.n = n;
  pair.scheme = Scheme::periodic_interval;
  pair.h = 1.0 / static_cast<double>(n);
  RVector x(n);
  for (Index j = 0; j < n; ++j) {
    x(j) = static_cast<double>(j) * pair.h;
    pair.grid.push_back(x(j));
  }
  pair.b = x.cast<Complex>().asDiagonal();
  pair.a = kI * central_difference(n, pair.h, true);

  const auto& profiles = interval_profiles();
  for (std::size_t id = 0; id < profiles.size(); ++id) {
    if (profiles[id].width < 4.0 * pair.h) continue;
    CVector v = bump_samples(pair.grid, profiles[id].center, profiles[id].width);
    if (v.norm() == 0.0 || std::abs(v(0)) > 1e-10 || std::abs(v(n - 1)) > 1e-10) continue;
    pair.test_domain.push_back(std::move(v));
    pair.vector_ids.push_back(static_cast<int>(id));
  }
  if (pair.test_domain.empty()) fail(ErrorCode::GridTooCoarse, "no default bump is resolved at n=" + std::to_string(n));
  return pair;
}

inline DiscretizedPair make_pair(Scheme scheme, Index n, double half_width) {
  return scheme == Scheme::schrodinger_line ? schrodinger_pair(n, half_width) : periodic_pair(n);
}

/// ||[A,B]v - iv|| / ||v||
inline double hcr_vector_residual(const DiscretizedPair& pair, const CVector& v) {
  const CVector lhs = pair.a * (pair.b * v) - pair.b * (pair.a * v);
  return (lhs - kI * v).norm() / v.norm();
}

/// Max over interior rows of |([A,B] - i M)_{jk}| where M averages the two
/// neighbours of site j. The line scheme's symmetrization also touches the
/// rows next to the zeroed boundary rows, so those are skipped too.
inline double scheme_identity_residual(const DiscretizedPair& pair) {
  const CMatrix comm = commutator(pair.a, pair.b);
  const Index margin = pair.scheme == Scheme::schrodinger_line ? 2 : 1;
  double worst = 0.0;
  for (Index j = margin; j + margin < pair.n; ++j) {
    CVector expected = CVector::Zero(pair.n);
    expected(j - 1) = 0.5 * kI;
    expected(j + 1) = 0.5 * kI;
    worst = std::max(worst, (comm.row(j).transpose() - expected).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct HcrRow {
  Index n = 0;
  double h = 0.0;
  int vector_id = 0;
  double residual = 0.0;
  double order_estimate = std::numeric_limits<double>::quiet_NaN();
};

struct HcrResult {
  Scheme scheme = Scheme::schrodinger_line;
  std::vector<double> residuals;  // for the input pair's test vectors
  std::vector<HcrRow> table;      // across n, 2n, 4n
  double min_order = std::numeric_limits<double>::infinity();
  double max_order = -std::numeric_limits<double>::infinity();
};

inline HcrResult hcr_residual(const DiscretizedPair& pair, int refinements = 2) {
  HcrResult out;
  out.scheme = pair.scheme;
  for (const auto& v : pair.test_domain)
    if (v.norm() > 0.0) out.residuals.push_back(hcr_vector_residual(pair, v));

  std::vector<double> prev_residual;
  std::vector<int> prev_ids;
  double prev_h = 0.0;
  for (int level = 0; level <= refinements; ++level) {
    const Index n = pair.n << level;
    const DiscretizedPair current = level == 0 ? pair : make_pair(pair.scheme, n, pair.half_width);
    std::vector<double> res;
    for (std::size_t i = 0; i < current.test_domain.size(); ++i) {
      HcrRow row;
      row.n = n;
      row.h = current.h;
      row.vector_id = current.vector_ids[i];
      row.residual = hcr_vector_residual(current, current.test_domain[i]);
      for (std::size_t p = 0; p < prev_ids.size(); ++p) {
        if (prev_ids[p] != row.vector_id) continue;
        row.order_estimate = std::log(prev_residual[p] / row.residual) / std::log(prev_h / row.h);
        out.min_order = std::min(out.min_order, row.order_estimate);
        out.max_order = std::max(out.max_order, row.order_estimate);
      }
      res.push_back(row.residual);
      out.table.push_back(row);
    }
    prev_residual = std::move(res);
    prev_ids = current.vector_ids;
    prev_h = current.h;
  }
  return out;
}

inline void write_hcr_csv(std::ostream& os, const std::vector<HcrRow>& rows, bool header = true) {
  if (header) os << "n,h,vector_id,residual,order_estimate\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.h) << ',' << r.vector_id << ',' << format_double(r.residual) << ',';
    if (!std::isnan(r.order_estimate)) os << format_double(r.order_estimate);
    os << '\n';
  }
}

inline nlohmann::json to_json(const HcrResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.table) {
    rows.push_back({{"n", row.n},
                    {"h", row.h},
                    {"vector_id", row.vector_id},
                    {"residual", row.residual},
                    {"order_estimate", std::isnan(row.order_estimate) ? nlohmann::json(nullptr) : nlohmann::json(row.order_estimate)}});
  }
  return {{"scheme", to_string(r.scheme)}, {"residuals", r.residuals}, {"table", rows}, {"min_order", r.min_order},
          {"max_order", r.max_order}};
}

struct TraceObstruction {
  double trace_abs = 0.0;       // |tr[A,B]|
  double frobenius_gap = 0.0;   // ||[A,B] - iI||_F
  double lower_bound = 0.0;     // sqrt(n)
  double trace_bound = 0.0;     // 1e-9 n ||A|| ||B||

  bool holds() const { return trace_abs <= trace_bound && frobenius_gap >= lower_bound - 1e-9; }
};

inline TraceObstruction trace_obstruction(const CMatrix& a, const CMatrix& b) {
  require_square(a, "A");
  require_square(b, "B");
  if (a.rows() != b.rows()) fail(ErrorCode::ShapeMismatch, "A and B must have equal size");
  const Index n = a.rows();
  const CMatrix comm = commutator(a, b);
  TraceObstruction out;
  out.trace_abs = std::abs(comm.trace());
  out.frobenius_gap = (comm - kI * CMatrix::Identity(n, n)).norm();
  out.lower_bound = std::sqrt(static_cast<double>(n));
  out.trace_bound = 1e-9 * static_cast<double>(n) * op_norm(a) * op_norm(b);
  return out;
}

struct RigidityReport {
  Index n = 0;
  Index kernel_dim = 0;              // dim ker ad²
  int trials = 0;
  double max_rigidity = 0.0;         // ||[D,x]||_F / (||D|| ||x||_F) over x in ker ad²
  double max_membership = 0.0;       // ||y - Π_C y|| / (||D|| ||x||) with y = [D,x], C = {D}'
  double max_control_projection = 0.0;  // ||Π_C [D,x]|| / (||D|| ||x||) for generic x
  double tolerance = 1e-8;
  bool pass = false;
};

/// Samples x from ker ad² and checks [D,x] = 0. Generic x serve as a control:
/// commutators are Hilbert-Schmidt orthogonal to {D}', so [D,x] can lie in
/// {D}' only when it vanishes.
inline RigidityReport rigidity_check(const CMatrix& d, int trials, double rank_tol = kDefaultRankTol, std::uint64_t seed = 0,
                                     double tolerance = 1e-8) {
  if (trials < 1) fail(ErrorCode::InvalidArgument, "rigidity_check needs trials >= 1");
  const OperatorSubspace second = derivation_kernel(d, 2, rank_tol);
  const OperatorSubspace first = commutant(std::vector<CMatrix>{d}, rank_tol);
  const double d_norm = op_norm(d);
  Xoshiro256 rng(seed);
  RigidityReport rep;
  rep.n = d.rows();
  rep.kernel_dim = second.dim();
  rep.trials = trials;
  rep.tolerance = tolerance;
  auto scaled = [&](double value, double x_norm) {
    const double scale = d_norm * x_norm;
    return scale > 0.0 ? value / scale : value;
  };
  for (int trial = 0; trial < trials; ++trial) {
    const CVector coeffs = gaussian_vector(second.dim(), rng);
    const CMatrix x = unvec(second.coordinates() * coeffs, rep.n);
    const CMatrix y = commutator(d, x);
    rep.max_rigidity = std::max(rep.max_rigidity, scaled(y.norm(), x.norm()));
    rep.max_membership = std::max(rep.max_membership, scaled(first.residual(y), x.norm()));

    const CMatrix generic = gaussian_matrix(rep.n, rep.n, rng);
    const CMatrix z = commutator(d, generic);
    rep.max_control_projection = std::max(rep.max_control_projection, scaled(first.project(z).norm(), generic.norm()));
  }
  rep.pass = rep.max_rigidity <= tolerance && rep.max_membership <= tolerance && rep.max_control_projection <= tolerance;
  return rep;
}

}  // namespace derivlab
