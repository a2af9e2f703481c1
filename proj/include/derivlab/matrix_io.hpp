#pragma once

// Plain-text matrix literals ("rows cols" header, then one "re im" line per
// entry in row-major order) and the JSON nested-array form [[ [re,im], ...]].

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "derivlab/numlin.hpp"

namespace derivlab {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_matrix_text(std::ostream& os, const CMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      os << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag()) << '\n';
}

inline std::string matrix_to_text(const CMatrix& m) {
  std::ostringstream os;
  write_matrix_text(os, m);
  return os.str();
}

inline CMatrix read_matrix_text(std::istream& is) {
  long rows = -1;
  long cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) fail(ErrorCode::ParseError, "matrix header must be 'rows cols'");
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double re = 0.0;
      double im = 0.0;
      if (!(is >> re >> im))
        fail(ErrorCode::ParseError, "expected 're im' for entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      m(i, j) = Complex(re, im);
    }
  if (!m.allFinite()) fail(ErrorCode::ParseError, "matrix contains non-finite entries");
  return m;
}

inline CMatrix matrix_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_matrix_text(is);
}

inline CMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return read_matrix_text(in);
}

inline void write_matrix_file(const std::string& path, const CMatrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  write_matrix_text(out, m);
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

inline nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Accepts entries as [re, im] pairs or bare real numbers.
inline CMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "matrix must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const Index cols = rows == 0 ? 0 : static_cast<Index>(j.at(0).size());
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) fail(ErrorCode::ParseError, "ragged matrix rows");
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row.at(static_cast<std::size_t>(c));
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(ErrorCode::ParseError, "matrix entry must be a number or [re, im]");
      }
    }
  }
  if (!m.allFinite()) fail(ErrorCode::ParseError, "matrix contains non-finite entries");
  return m;
}

}  // namespace derivlab
