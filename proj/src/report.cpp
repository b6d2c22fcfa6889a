#include "lazytensor/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace lazytensor {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& field) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed number '" + field + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& field) {
  std::int64_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed integer '" + field + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string flags_of(const OuterIterationRecord& rec) {
  std::string flags;
  if (rec.h_floored) flags = "h_floored";
  if (rec.subsolve_failure) flags += flags.empty() ? "subsolve_failure" : "|subsolve_failure";
  return flags;
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

std::vector<IterationRow> iteration_rows(const RunReport& report) {
  std::vector<IterationRow> rows;
  rows.reserve(report.records.size());
  for (const auto& rec : report.records) {
    IterationRow row;
    row.k = rec.k;
    row.L_k = rec.L_k;
    row.sigma_k = rec.sigma_k;
    row.h_k = rec.h_k;
    row.alpha_k = std::string(to_string(rec.alpha_k));
    row.f = rec.f_zk;
    row.grad_norm = rec.grad_norm_zk;
    row.oracle_calls_cum = rec.oracle_calls_cum;
    row.flags = flags_of(rec);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string iteration_csv(const std::vector<IterationRow>& rows) {
  std::string out = kIterationCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.k) + ',' + format_double(r.L_k) + ',' + format_double(r.sigma_k) + ',' +
           format_double(r.h_k) + ',' + r.alpha_k + ',' + format_double(r.f) + ',' + format_double(r.grad_norm) + ',' +
           std::to_string(r.oracle_calls_cum) + ',' + r.flags + '\n';
  }
  return out;
}

std::string iteration_csv(const RunReport& report) { return iteration_csv(iteration_rows(report)); }

std::vector<IterationRow> parse_iteration_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kIterationCsvHeader) {
    throw std::invalid_argument("iteration CSV must start with the header '" + std::string(kIterationCsvHeader) + "'");
  }
  std::vector<IterationRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 9) throw std::invalid_argument("iteration CSV row needs 9 fields: " + line);
    IterationRow r;
    r.k = parse_int(fields[0]);
    r.L_k = parse_double(fields[1]);
    r.sigma_k = parse_double(fields[2]);
    r.h_k = parse_double(fields[3]);
    r.alpha_k = fields[4];
    step_status_from_string(r.alpha_k);
    r.f = parse_double(fields[5]);
    r.grad_norm = parse_double(fields[6]);
    r.oracle_calls_cum = parse_int(fields[7]);
    r.flags = fields[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json report_json(const RunReport& report) {
  using nlohmann::json;
  const DriverConfig& cfg = report.config;
  json config = {{"p", cfg.p},
                 {"m", report.m},
                 {"m_auto", !cfg.m.has_value()},
                 {"eps", cfg.eps},
                 {"L0", cfg.L0},
                 {"max_outer", report.max_outer},
                 {"inner_budget", cfg.inner_budget},
                 {"h_floor", cfg.h_floor},
                 {"seed", cfg.seed}};
  if (cfg.x0) config["x0"] = vector_json(*cfg.x0);

  json records = json::array();
  for (const auto& rec : report.records) {
    json trace = json::array();
    for (const auto& s : rec.lazy_trace) {
      trace.push_back({{"t", s.t},
                       {"f", s.f},
                       {"grad_norm", s.grad_norm},
                       {"step_norm", s.step_norm},
                       {"inner_iterations", s.inner_iterations},
                       {"decrease", s.decrease},
                       {"threshold", s.threshold},
                       {"subsolve_failed", s.subsolve_failed}});
    }
    records.push_back({{"k", rec.k},
                       {"L_k", rec.L_k},
                       {"sigma_k", rec.sigma_k},
                       {"h_k", rec.h_k},
                       {"alpha_k", std::string(to_string(rec.alpha_k))},
                       {"f", rec.f_zk},
                       {"grad_norm", rec.grad_norm_zk},
                       {"oracle_calls_cum", rec.oracle_calls_cum},
                       {"lazy_steps", rec.lazy_steps},
                       {"flags", flags_of(rec)},
                       {"lazy_trace", std::move(trace)}});
  }

  return {{"problem", report.problem},
          {"n", report.n},
          {"config", std::move(config)},
          {"terminated", report.terminated},
          {"K_eps", report.terminated ? json(report.k_eps) : json("cap")},
          {"success_set_size", report.success_count},
          {"halt_set_size", report.halt_count},
          {"oracle_calls", report.oracle_calls},
          {"f_z0", report.f_z0},
          {"final_f", report.final_f},
          {"final_grad_norm", report.final_grad_norm},
          {"final_point", vector_json(report.final_point)},
          {"deviation_flags", {{"h_floored", report.any_h_floored}, {"subsolve_failures", report.subsolve_failures}}},
          {"records", std::move(records)}};
}

}  // namespace lazytensor
