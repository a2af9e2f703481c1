#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "derivlab/matrix_io.hpp"

namespace derivlab {

inline constexpr const char* kVersion = "1.0.0";

struct CheckRecord {
  std::string id;
  std::string suite;
  long n = 0;
  std::string paper_ref;  // the statement being checked
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

/// JSON numbers cannot be NaN or infinite; those become null.
inline nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const CheckRecord& c) {
  return {{"id", c.id},
          {"paper_ref", c.paper_ref},
          {"pass", c.pass},
          {"residual", finite_or_null(c.residual)},
          {"tolerance", finite_or_null(c.tolerance)},
          {"details", c.details}};
}

struct Report {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  nlohmann::json extras = nlohmann::json::object();  // suite-level tables
  double wall_clock_seconds = 0.0;

  void add(CheckRecord c) { checks.push_back(std::move(c)); }

  std::size_t failed() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckRecord& c) { return !c.pass; }));
  }

  bool all_pass() const { return failed() == 0; }

  /// Per check kind (id up to the instance suffix): count, failures, max residual.
  nlohmann::json summary() const {
    std::map<std::string, nlohmann::json> kinds;
    for (const auto& c : checks) {
      const std::string kind = c.id.substr(0, c.id.find("/n="));
      auto& k = kinds[kind];
      if (k.is_null()) k = {{"count", 0}, {"failed", 0}, {"max_residual", 0.0}};
      k["count"] = k["count"].get<int>() + 1;
      if (!c.pass) k["failed"] = k["failed"].get<int>() + 1;
      if (std::isfinite(c.residual)) k["max_residual"] = std::max(k["max_residual"].get<double>(), c.residual);
    }
    nlohmann::json by_kind = nlohmann::json::object();
    for (auto& [name, value] : kinds) by_kind[name] = value;
    return {{"total", checks.size()}, {"passed", checks.size() - failed()}, {"failed", failed()}, {"by_check", by_kind}};
  }

  /// Deterministic content only; timing lives in a separate field.
  nlohmann::json content_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back(derivlab::to_json(c));
    nlohmann::json out = {{"meta", meta}, {"checks", arr}, {"summary", summary()}, {"pass", all_pass()}};
    if (!extras.empty()) out["tables"] = extras;
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json out = content_json();
    out["timing"] = {{"wall_clock_seconds", wall_clock_seconds}};
    return out;
  }
};

inline void write_checks_csv(std::ostream& os, const Report& report) {
  os << "id,suite,n,pass,residual,tolerance\n";
  for (const auto& c : report.checks)
    os << c.id << ',' << c.suite << ',' << c.n << ',' << (c.pass ? "PASS" : "FAIL") << ',' << format_double(c.residual) << ','
       << format_double(c.tolerance) << '\n';
}

}  // namespace derivlab
