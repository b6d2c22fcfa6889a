#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "lazytensor/driver.hpp"

namespace lazytensor {

/// One row of the per-iteration CSV:
/// k,L_k,sigma_k,h_k,alpha_k,f,grad_norm,oracle_calls_cum,flags
struct IterationRow {
  std::int64_t k = 0;
  double L_k = 0.0;
  double sigma_k = 0.0;
  double h_k = 0.0;
  std::string alpha_k;
  double f = 0.0;
  double grad_norm = 0.0;
  std::int64_t oracle_calls_cum = 0;
  /// '|'-joined subset of {h_floored, subsolve_failure}; empty when clean.
  std::string flags;
};

inline constexpr const char* kIterationCsvHeader = "k,L_k,sigma_k,h_k,alpha_k,f,grad_norm,oracle_calls_cum,flags";

/// Shortest text that parses back to the same double.
std::string format_double(double value);

std::vector<IterationRow> iteration_rows(const RunReport& report);
std::string iteration_csv(const std::vector<IterationRow>& rows);
std::string iteration_csv(const RunReport& report);
/// Inverse of iteration_csv; throws std::invalid_argument on a malformed table.
std::vector<IterationRow> parse_iteration_csv(const std::string& text);

nlohmann::json report_json(const RunReport& report);

}  // namespace lazytensor
