#include "lazytensor/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "lazytensor/errors.hpp"
#include "lazytensor/fdtensor.hpp"
#include "lazytensor/report.hpp"

namespace lazytensor {

ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& pairs) {
  detail::require(pairs.size() >= 3, "scaling fit needs at least 3 (eps, count) pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    detail::require(pairs[i].first > 0.0 && pairs[i].second > 0.0, "eps and counts must be positive");
    if (i > 0) detail::require(pairs[i].first < pairs[i - 1].first, "eps must be strictly decreasing");
  }
  const bool constant = std::all_of(pairs.begin(), pairs.end(), [&](const auto& pr) { return pr.second == pairs[0].second; });
  if (constant) return {0.0, true};

  const double count = static_cast<double>(pairs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [eps, c] : pairs) {
    mean_x += -std::log(eps);
    mean_y += std::log(c);
  }
  mean_x /= count;
  mean_y /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [eps, c] : pairs) {
    const double dx = -std::log(eps) - mean_x;
    sxy += dx * (std::log(c) - mean_y);
    sxx += dx * dx;
  }
  return {sxy / sxx, false};
}

std::vector<SweepRow> sweep_eps(const ProblemOracle& problem, const DriverConfig& base,
                                const std::vector<double>& eps_grid) {
  detail::require(!eps_grid.empty(), "eps grid must be nonempty");
  std::vector<SweepRow> rows;
  for (double eps : eps_grid) {
    DriverConfig cfg = base;
    cfg.eps = eps;
    const RunReport rep = run(problem, cfg);
    rows.push_back({eps, rep.m, static_cast<std::int64_t>(rep.records.size()), rep.oracle_calls, rep.final_grad_norm,
                    rep.terminated});
  }
  return rows;
}

std::vector<SweepRow> sweep_m(const ProblemOracle& problem, const DriverConfig& base, const std::vector<int>& m_grid) {
  detail::require(!m_grid.empty(), "m grid must be nonempty");
  std::vector<SweepRow> rows;
  for (int m : m_grid) {
    DriverConfig cfg = base;
    cfg.m = m > 0 ? std::optional<int>(m) : std::nullopt;
    const RunReport rep = run(problem, cfg);
    rows.push_back({cfg.eps, rep.m, static_cast<std::int64_t>(rep.records.size()), rep.oracle_calls,
                    rep.final_grad_norm, rep.terminated});
  }
  return rows;
}

std::vector<FdCheckRow> verify_fd(const ProblemOracle& problem, int p, const std::vector<double>& h_grid,
                                  std::uint64_t seed, const std::optional<Vector>& x0) {
  detail::require(!h_grid.empty(), "h grid must be nonempty");
  detail::require(p >= 1 && p <= 3, "p must lie in 1..3");
  if (problem.max_order() < p) {
    throw UnsupportedOrder("verify-fd needs derivatives of order " + std::to_string(p));
  }
  const int n = problem.dim();
  Vector z(n);
  if (x0) {
    detail::require(x0->size() == n, "x0 dimension does not match problem");
    z = *x0;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < n; ++i) z[i] = unif(rng);
  }
  NormOptions norm;
  norm.seed = seed ^ 0x5eedULL;
  std::vector<FdCheckRow> rows;
  for (double h : h_grid) {
    detail::require(h > 0.0, "h must be positive");
    OracleCounter scratch;
    const RankOneSum tensor = build_fd_tensor(problem, scratch, z, h, p);
    FdCheckRow row;
    row.p = p;
    row.n = n;
    row.h = h;
    row.fd_error = fd_error(problem, z, tensor, norm);
    if (const auto lip = problem.lipschitz(p)) row.bound = *lip * std::sqrt(static_cast<double>(n)) * h / 2.0;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool by_m) {
  std::string text = by_m ? "m,K,oracle_calls,final_grad_norm,terminated\n" : "eps,K,oracle_calls,final_grad_norm,terminated\n";
  for (const auto& r : rows) {
    text += (by_m ? std::to_string(r.m) : format_double(r.eps)) + ',' + std::to_string(r.k) + ',' +
            std::to_string(r.oracle_calls) + ',' + format_double(r.final_grad_norm) + ',' +
            (r.terminated ? "true" : "false") + '\n';
  }
  return text;
}

std::string verify_fd_csv(const std::vector<FdCheckRow>& rows) {
  std::string text = "p,n,h,fd_error,bound,within_bound\n";
  for (const auto& r : rows) {
    text += std::to_string(r.p) + ',' + std::to_string(r.n) + ',' + format_double(r.h) + ',' + format_double(r.fd_error) +
            ',' + (r.bound ? format_double(*r.bound) : "") + ',' +
            (r.bound ? (r.fd_error <= *r.bound ? "true" : "false") : "") + '\n';
  }
  return text;
}

namespace {

constexpr int kUsageError = 1;
constexpr int kCapHit = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    items.push_back(item);
  }
  if (items.empty()) throw UsageError("empty list");
  return items;
}

double to_double(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("--" + flag + ": expected a number, got '" + text + "'");
  return value;
}

std::int64_t to_int(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("--" + flag + ": expected an integer, got '" + text + "'");
  return value;
}

// Config-file values are flattened to the same text a flag would carry.
std::string json_to_flag_text(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number()) return format_double(value.get<double>());
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ',';
      joined += json_to_flag_text(item);
    }
    return joined;
  }
  throw UsageError("unsupported config value " + value.dump());
}

const std::vector<std::string>& option_keys() {
  static const std::vector<std::string> keys{"problem", "n",            "p",    "m",   "eps",    "h",
                                             "L0",      "max-outer",    "x0",   "out", "format", "seed",
                                             "inner-budget", "no-h-floor"};
  return keys;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "h-floor") {
      if (!value.is_boolean()) throw UsageError("config key 'h_floor' must be a boolean");
      values["no-h-floor"] = value.get<bool>() ? "false" : "true";
      continue;
    }
    if (flag == "mode") continue;
    if (std::find(option_keys().begin(), option_keys().end(), flag) == option_keys().end()) {
      throw UsageError("unknown config key '" + key + "'");
    }
    values[flag] = json_to_flag_text(value);
  }
  return values;
}

ExperimentSpec build_spec(BenchMode mode, const std::map<std::string, std::string>& values) {
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    return it == values.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  ExperimentSpec spec;
  spec.mode = mode;
  if (auto v = get("problem")) spec.problem = *v;
  if (auto v = get("n")) spec.n = static_cast<int>(to_int(*v, "n"));
  if (auto v = get("p")) spec.driver.p = static_cast<int>(to_int(*v, "p"));
  if (spec.n < 1) throw UsageError("--n must be >= 1");
  if (spec.driver.p < 1 || spec.driver.p > 3) throw UsageError("--p must be 1, 2 or 3");

  if (auto v = get("m")) {
    for (const auto& item : split_list(*v)) {
      if (item == "auto") {
        spec.m_grid.push_back(0);
      } else {
        const auto m = to_int(item, "m");
        if (m < 1) throw UsageError("--m entries must be >= 1 or 'auto'");
        spec.m_grid.push_back(static_cast<int>(m));
      }
    }
  }
  if (auto v = get("eps")) {
    for (const auto& item : split_list(*v)) spec.eps_grid.push_back(to_double(item, "eps"));
  }
  if (auto v = get("h")) {
    spec.h_grid.clear();
    for (const auto& item : split_list(*v)) spec.h_grid.push_back(to_double(item, "h"));
  }
  if (auto v = get("L0")) spec.driver.L0 = to_double(*v, "L0");
  if (auto v = get("max-outer")) spec.driver.max_outer = to_int(*v, "max-outer");
  if (auto v = get("inner-budget")) spec.driver.inner_budget = static_cast<int>(to_int(*v, "inner-budget"));
  if (auto v = get("seed")) spec.driver.seed = static_cast<std::uint64_t>(to_int(*v, "seed"));
  if (auto v = get("no-h-floor")) spec.driver.h_floor = !(*v == "true" || *v == "1");
  if (auto v = get("x0")) {
    const auto items = split_list(*v);
    Vector x0(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) x0[static_cast<Eigen::Index>(i)] = to_double(items[i], "x0");
    spec.driver.x0 = x0;
  }
  if (auto v = get("out")) spec.out = *v;
  if (auto v = get("format")) spec.format = *v;
  if (spec.format != "csv" && spec.format != "json") throw UsageError("--format must be csv or json");

  switch (mode) {
    case BenchMode::kRun:
      if (spec.eps_grid.size() > 1) throw UsageError("run takes a single --eps value");
      if (spec.m_grid.size() > 1) throw UsageError("run takes a single --m value");
      break;
    case BenchMode::kSweepEps:
      if (spec.eps_grid.empty()) throw UsageError("sweep-eps needs --eps with at least one value");
      if (spec.m_grid.size() > 1) throw UsageError("sweep-eps takes a single --m value");
      break;
    case BenchMode::kSweepM:
      if (spec.m_grid.empty()) throw UsageError("sweep-m needs --m with at least one value");
      if (spec.eps_grid.size() > 1) throw UsageError("sweep-m takes a single --eps value");
      break;
    case BenchMode::kVerifyFd:
      break;
  }
  if (mode != BenchMode::kSweepEps && !spec.eps_grid.empty()) spec.driver.eps = spec.eps_grid.front();
  if (mode != BenchMode::kSweepM && !spec.m_grid.empty() && spec.m_grid.front() > 0) spec.driver.m = spec.m_grid.front();
  return spec;
}

void emit(const ExperimentSpec& spec, const std::string& text, std::ostream& out) {
  if (!spec.out) {
    out << text;
    return;
  }
  std::ofstream file(*spec.out, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + *spec.out + "'");
  file << text;
}

nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"eps", r.eps},
                   {"m", r.m},
                   {"K", r.k},
                   {"oracle_calls", r.oracle_calls},
                   {"final_grad_norm", r.final_grad_norm},
                   {"terminated", r.terminated}});
  }
  return arr;
}

int execute(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const ProblemOracle problem = builtin_problem(spec.problem, spec.n);
  std::ostream& summary = spec.out ? out : err;

  if (spec.mode == BenchMode::kRun) {
    const RunReport rep = run(problem, spec.driver);
    emit(spec, spec.format == "json" ? report_json(rep).dump(2) + "\n" : iteration_csv(rep), out);
    summary << "K=" << (rep.terminated ? std::to_string(rep.k_eps) : "cap") << " oracle_calls=" << rep.oracle_calls
            << " final_grad_norm=" << format_double(rep.final_grad_norm)
            << " status=" << (rep.terminated ? "solution" : "cap_hit") << "\n";
    return rep.terminated ? 0 : kCapHit;
  }

  if (spec.mode == BenchMode::kVerifyFd) {
    const auto rows = verify_fd(problem, spec.driver.p, spec.h_grid, spec.driver.seed, spec.driver.x0);
    if (spec.format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : rows) {
        arr.push_back({{"p", r.p}, {"n", r.n}, {"h", r.h}, {"fd_error", r.fd_error},
                       {"bound", r.bound ? nlohmann::json(*r.bound) : nlohmann::json(nullptr)}});
      }
      emit(spec, arr.dump(2) + "\n", out);
    } else {
      emit(spec, verify_fd_csv(rows), out);
    }
    const auto violations = std::count_if(rows.begin(), rows.end(), [](const FdCheckRow& r) { return r.bound && r.fd_error > *r.bound; });
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.fd_error);
    summary << "rows=" << rows.size() << " max_fd_error=" << format_double(worst) << " violations=" << violations << "\n";
    return violations == 0 ? 0 : kCapHit;
  }

  const bool by_m = spec.mode == BenchMode::kSweepM;
  const auto rows = by_m ? sweep_m(problem, spec.driver, spec.m_grid) : sweep_eps(problem, spec.driver, spec.eps_grid);
  emit(spec, spec.format == "json" ? sweep_json(rows).dump(2) + "\n" : sweep_csv(rows, by_m), out);
  std::int64_t total = 0;
  int terminated = 0;
  for (const auto& r : rows) {
    total += r.oracle_calls;
    terminated += r.terminated ? 1 : 0;
  }
  summary << "rows=" << rows.size() << " terminated=" << terminated << "/" << rows.size() << " oracle_calls_total=" << total
          << "\n";
  return terminated == static_cast<int>(rows.size()) ? 0 : kCapHit;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lazy finite-difference tensor method benchmark"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");

  struct Bound {
    CLI::App* sub;
    BenchMode mode;
    std::map<std::string, std::string> values;
    std::string config;
    bool no_h_floor = false;
  };
  std::vector<Bound> subs;
  subs.reserve(4);
  struct Mode {
    std::string name;
    BenchMode mode;
    std::string text;
  };
  const std::vector<Mode> modes{{"run", BenchMode::kRun, "single run, per-iteration CSV or JSON report"},
                                {"sweep-eps", BenchMode::kSweepEps, "one run per eps value"},
                                {"sweep-m", BenchMode::kSweepM, "one run per m value"},
                                {"verify-fd", BenchMode::kVerifyFd, "FD tensor error against its bound"}};
  const std::map<std::string, std::string> help{
      {"problem", "builtin problem name"},
      {"n", "dimension"},
      {"p", "derivative order 1, 2 or 3"},
      {"m", "lazy steps per tensor: integer, 'auto', or comma list (sweep-m)"},
      {"eps", "target gradient norm, or comma list (sweep-eps)"},
      {"h", "comma list of FD stepsizes (verify-fd)"},
      {"L0", "initial Lipschitz estimate"},
      {"max-outer", "outer iteration cap"},
      {"inner-budget", "subsolver iteration budget"},
      {"seed", "seed for randomized components"},
      {"x0", "comma list start point"},
      {"out", "output file (default stdout)"},
      {"format", "csv or json"}};
  for (const auto& mode : modes) {
    subs.push_back(Bound{app.add_subcommand(mode.name, mode.text), mode.mode, {}, {}, false});
  }
  for (auto& b : subs) {
    b.sub->set_help_flag("--help", "print help and exit");
    for (const auto& [key, text] : help) b.sub->add_option("--" + key, b.values[key], text);
    b.sub->add_flag("--no-h-floor", b.no_h_floor, "use the closed-form stepsize without the floating-point floor");
    b.sub->add_option("--config", b.config, "JSON file mirroring the flags; flags override it");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) {
      err << "problems: ";
      for (const auto& name : builtin_problem_names()) err << name << ' ';
      err << "\n";
      return kUsageError;
    }
    return 0;
  }

  for (auto& b : subs) {
    if (!b.sub->parsed()) continue;
    try {
      std::map<std::string, std::string> merged;
      if (!b.config.empty()) merged = read_config(b.config);
      for (const auto& [key, value] : b.values) {
        if (b.sub->count("--" + key) > 0) merged[key] = value;
      }
      if (b.no_h_floor) merged["no-h-floor"] = "true";
      const ExperimentSpec spec = build_spec(b.mode, merged);
      return execute(spec, out, err);
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
      err << "usage error: " << e.what() << "\n";
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
    }
    return kUsageError;
  }
  return kUsageError;
}

int cli_main(int argc, char** argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace lazytensor
