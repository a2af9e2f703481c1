#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "derivlab/matrix_io.hpp"
#include "derivlab/numlin.hpp"

namespace derivlab {

inline constexpr double kDefaultClusterTol = 1e-8;

/// Clustered eigenvalues of a Hermitian operator with their orthogonal
/// spectral projections. Near-degenerate eigenvalues are merged so that each
/// projection is stable even when individual eigenvectors are not.
struct SpectralResolution {
  std::vector<double> distinct_values;  // ascending cluster means
  std::vector<CMatrix> projections;
  std::vector<Index> multiplicities;
  double source_norm = 0.0;  // operator norm of the source
  double cluster_tol = kDefaultClusterTol;
  CMatrix source;

  Index dim() const { return source.rows(); }
  std::size_t size() const { return distinct_values.size(); }

  /// Σ λ_i P_i
  CMatrix reconstruct() const {
    CMatrix out = CMatrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i) out += distinct_values[i] * projections[i];
    return out;
  }
};

inline SpectralResolution spectral_resolution(const CMatrix& d, double cluster_tol = kDefaultClusterTol) {
  if (!(cluster_tol >= 0.0)) fail(ErrorCode::InvalidArgument, "cluster_tol must be non-negative");
  const Eigensystem eig = hermitian_eig(d);
  const Index n = d.rows();
  const double norm = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
  const double threshold = cluster_tol * std::max(1.0, norm);

  SpectralResolution res;
  res.source = d;
  res.source_norm = norm;
  res.cluster_tol = cluster_tol;

  Index start = 0;
  auto close_cluster = [&](Index end) {
    const Index m = end - start;
    const CMatrix u = eig.vectors.middleCols(start, m);
    res.distinct_values.push_back(eig.values.segment(start, m).mean());
    res.projections.push_back(u * u.adjoint());
    res.multiplicities.push_back(m);
    start = end;
  };
  for (Index i = 1; i < n; ++i) {
    const double gap = eig.values(i) - eig.values(i - 1);
    if (threshold > 0.0 && std::abs(gap - threshold) <= 1e-15)
      fail(ErrorCode::AmbiguousClustering, "eigenvalue gap coincides with the clustering threshold; perturb cluster_tol");
    if (gap > threshold) close_cluster(i);
  }
  close_cluster(n);
  return res;
}

/// Σ f(λ_i) P_i for function values given at the cluster representatives.
inline CMatrix borel_calculus(const SpectralResolution& res, const std::vector<Complex>& values) {
  if (values.size() != res.size())
    fail(ErrorCode::MissingValue, "need " + std::to_string(res.size()) + " function values, got " + std::to_string(values.size()));
  CMatrix out = CMatrix::Zero(res.dim(), res.dim());
  for (std::size_t i = 0; i < res.size(); ++i) out += values[i] * res.projections[i];
  return out;
}

inline CMatrix borel_calculus(const SpectralResolution& res, const std::function<Complex(double)>& f) {
  std::vector<Complex> values;
  values.reserve(res.size());
  for (double lambda : res.distinct_values) values.push_back(f(lambda));
  return borel_calculus(res, values);
}

/// e^{itD} = Σ e^{itλ_i} P_i
inline CMatrix unitary_group(const SpectralResolution& res, double t) {
  return borel_calculus(res, [t](double lambda) { return std::exp(kI * (t * lambda)); });
}

/// max_i ||[P_i,[D,x]] - [D,[P_i,x]]||_F
inline double projection_commutation_check(const SpectralResolution& res, const CMatrix& x) {
  const CMatrix& d = res.source;
  if (x.rows() != d.rows() || x.cols() != d.cols()) fail(ErrorCode::ShapeMismatch, "x must match D");
  const CMatrix dx = commutator(d, x);
  double worst = 0.0;
  for (const CMatrix& p : res.projections)
    worst = std::max(worst, (commutator(p, dx) - commutator(d, commutator(p, x))).norm());
  return worst;
}

/// One interval of the real line; infinite endpoints are allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
  }
};

/// Finite union of intervals, standing in for a Borel set.
struct IntervalSet {
  std::vector<Interval> parts;

  bool contains(double x) const {
    for (const auto& p : parts)
      if (p.contains(x)) return true;
    return false;
  }
};

namespace detail {

inline double parse_endpoint(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  auto parse_number = [](std::string_view s) {
    std::string buf(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(buf, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad interval endpoint '" + buf + "'");
    }
    if (used != buf.size()) fail(ErrorCode::ParseError, "bad interval endpoint '" + buf + "'");
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double den = parse_number(trim(text.substr(slash + 1)));
    if (den == 0.0) fail(ErrorCode::ParseError, "zero denominator in interval endpoint");
    return parse_number(trim(text.substr(0, slash))) / den;
  }
  return parse_number(text);
}

}  // namespace detail

/// Parses unions such as "[0,1/2)U(3/2,inf)". Endpoints are decimals,
/// fractions p/q, or ±inf.
inline IntervalSet parse_interval_set(std::string_view text) {
  IntervalSet out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == 'U' || text[pos] == 'u')) ++pos;
    if (pos >= text.size()) break;
    const char open = text[pos];
    if (open != '[' && open != '(') fail(ErrorCode::ParseError, "interval must start with '[' or '('");
    const auto close_pos = text.find_first_of(")]", pos);
    if (close_pos == std::string_view::npos) fail(ErrorCode::ParseError, "unterminated interval");
    const std::string_view body = text.substr(pos + 1, close_pos - pos - 1);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) fail(ErrorCode::ParseError, "interval needs two endpoints");
    Interval iv;
    iv.lo = detail::parse_endpoint(body.substr(0, comma));
    iv.hi = detail::parse_endpoint(body.substr(comma + 1));
    iv.lo_closed = open == '[';
    iv.hi_closed = text[close_pos] == ']';
    if (iv.lo > iv.hi) fail(ErrorCode::ParseError, "interval endpoints out of order");
    out.parts.push_back(iv);
    pos = close_pos + 1;
  }
  if (out.parts.empty()) fail(ErrorCode::ParseError, "empty interval set");
  return out;
}

/// Spectral projection χ_E(D) for a finite union of intervals E.
inline CMatrix spectral_projection(const SpectralResolution& res, const IntervalSet& set) {
  return borel_calculus(res, [&set](double lambda) { return Complex(set.contains(lambda) ? 1.0 : 0.0); });
}

inline nlohmann::json to_json(const SpectralResolution& res) {
  nlohmann::json projections = nlohmann::json::array();
  for (const auto& p : res.projections) projections.push_back(matrix_to_json(p));
  return {{"values", res.distinct_values}, {"multiplicities", res.multiplicities}, {"projections", std::move(projections)}};
}

}  // namespace derivlab
