// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lazytensor/bench.hpp"
#include "lazytensor/driver.hpp"
#include "lazytensor/errors.hpp"
#include "lazytensor/fdtensor.hpp"
#include "lazytensor/lazy.hpp"
#include "lazytensor/report.hpp"
#include "lazytensor/subsolver.hpp"
#include "random_models.hpp"

using namespace lazytensor;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Vector uniform_point(int n, std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> unif(-radius, radius);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

// eps^((p+1)/p) * count / (2^6 3^(1/p) sigma^(1/p) (p+1)!), written out here
// rather than taken from the library.
double displayed_decrease(double eps, double sigma, int p, int count) {
  const double pd = p;
  const double fact = p == 1 ? 2.0 : (p == 2 ? 6.0 : 24.0);
  return std::pow(eps, (pd + 1) / pd) * count / (64.0 * std::pow(3.0, 1 / pd) * std::pow(sigma, 1 / pd) * fact);
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a);
  return buf;
}

Outcome fd_error_bound() {
  Outcome o;
  std::mt19937_64 rng(101);
  int checks = 0;
  double worst_ratio = 0;
  for (int p = 1; p <= 3; ++p) {
    for (int n : {2, 4, 8}) {
      if (p == 3 && n == 8) continue;
      const auto problem = builtin_problem("cos_sum", n);
      for (int point = 0; point < 5; ++point) {
        const Vector z = uniform_point(n, rng, M_PI);
        for (double h : {1e-1, 1e-2, 1e-3}) {
          OracleCounter counter;
          const auto tensor = build_fd_tensor(problem, counter, z, h, p);
          const double err = fd_error(problem, z, tensor);
          const double bound = std::sqrt(static_cast<double>(n)) / 2 * h;
          const double slack = p == 3 ? 1e-6 : 0.0;
          ++checks;
          worst_ratio = std::max(worst_ratio, err / bound);
          if (!(err <= bound + slack)) {
            o.pass = false;
            o.detail += " violation p=" + std::to_string(p) + " n=" + std::to_string(n) + fmt(" h=%g", h) +
                        fmt(" err=%.3e", err) + fmt(" bound=%.3e;", bound);
          }
        }
      }
    }
  }
  o.detail = std::to_string(checks) + " checks, max fd_error/bound=" + fmt("%.4f", worst_ratio) + o.detail;
  return o;
}

Outcome subsolver_certificate() {
  Outcome o;
  std::mt19937_64 rng(202);
  int certified = 0, failed = 0, compared = 0;
  double worst_gap = 0;
  for (int p = 1; p <= 3; ++p) {
    for (int i = 0; i < 200; ++i) {
      const int n = 1 + i % 6;
      const auto model = random_model(p, n, rng);
      try {
        const auto r = subsolve(model);
        const auto c = check_acceptance(model, r.point);
        if (c.monotone && c.stationarity) {
          ++certified;
        } else {
          ++failed;
        }
        if (p == 2 && n <= 3) {
          const double brute = brute_force_minimum(model, rng);
          const double gap = std::abs(model_value(model, r.point) - brute);
          worst_gap = std::max(worst_gap, gap);
          ++compared;
          if (!(gap <= 1e-6)) {
            o.pass = false;
            o.detail += fmt(" p=2 gap %.3e;", gap);
          }
        }
      } catch (const std::exception& e) {
        ++failed;
        o.detail += std::string(" p=") + std::to_string(p) + " threw: " + e.what() + ";";
      }
    }
  }
  if (failed > 0) o.pass = false;
  o.detail = std::to_string(certified) + "/600 certified, " + std::to_string(compared) +
             " p=2 brute-force comparisons, max |gap|=" + fmt("%.2e", worst_gap) + o.detail;
  return o;
}

Outcome lazy_steps_soundness() {
  Outcome o;
  std::mt19937_64 rng(303);
  const int n = 4;
  const double eps = 1e-3;
  const double lipschitz = 1.0;
  const auto problem = builtin_problem("cos_sum", n);
  int halts = 0, successes = 0, solutions = 0, weak = 0;
  for (int p = 1; p <= 2; ++p) {
    const int m = optimal_m(p, n);
    const double sigma = 11.0 * (p + 1) * lipschitz * m;
    const double h = fd_stepsize(sigma, eps, p, n);
    for (int start = 0; start < 50; ++start) {
      Vector z = uniform_point(n, rng, M_PI);
      OracleCounter counter;
      const auto base = evaluate(problem, counter, z, OrderSet::up_to(std::max(1, p - 1)));
      const auto tensor = build_fd_tensor(problem, counter, z, base.at(p - 1), h, p);
      const auto result = lazy_tensor_steps(problem, counter, z, tensor, sigma, m, eps);
      switch (result.status) {
        case StepStatus::kHalt:
          ++halts;
          break;
        case StepStatus::kSolution:
          ++solutions;
          break;
        case StepStatus::kSuccess: {
          ++successes;
          const double gain = base.value() - result.f_point;
          if (!(gain >= displayed_decrease(eps, sigma, p, m))) ++weak;
          break;
        }
      }
    }
  }
  o.pass = halts == 0 && weak == 0;
  o.detail = "100 runs: halt=" + std::to_string(halts) + " success=" + std::to_string(successes) +
             " solution=" + std::to_string(solutions) + " success-below-decrease=" + std::to_string(weak);
  return o;
}

struct SuiteRun {
  std::string problem;
  int p;
  double L0;
  double eps;
  double lipschitz;
  double f_low;
  RunReport report;
};

std::vector<SuiteRun> suite_runs() {
  std::vector<SuiteRun> runs;
  const int n = 4;
  for (const std::string name : {"cos_sum", "quadratic"}) {
    const auto problem = builtin_problem(name, n);
    for (int p = 1; p <= 2; ++p) {
      for (double L0 : {0.01, 1.0, 100.0}) {
        for (double eps : {1e-2, 1e-4}) {
          DriverConfig cfg;
          cfg.p = p;
          cfg.L0 = L0;
          cfg.eps = eps;
          runs.push_back({name, p, L0, eps, *problem.lipschitz(p), *problem.f_low(), run(problem, cfg)});
        }
      }
    }
  }
  return runs;
}

std::string label(const SuiteRun& r) {
  std::ostringstream s;
  s << r.problem << " p=" << r.p << " L0=" << r.L0 << " eps=" << r.eps;
  return s.str();
}

Outcome lipschitz_ceiling(const std::vector<SuiteRun>& runs) {
  Outcome o;
  int records = 0, floored = 0;
  for (const auto& r : runs) {
    const double ceiling = std::max(r.L0, 2 * r.lipschitz);
    for (const auto& rec : r.report.records) {
      ++records;
      floored += rec.h_floored ? 1 : 0;
      if (!(rec.L_k <= ceiling)) {
        o.pass = false;
        o.detail += " " + label(r) + fmt(" L_k=%g", rec.L_k) + fmt(" > %g;", ceiling);
        break;
      }
    }
    if (!r.report.terminated) {
      o.pass = false;
      o.detail += " " + label(r) + " hit the cap;";
    }
  }
  o.detail = std::to_string(runs.size()) + " runs, " + std::to_string(records) + " records (" +
             std::to_string(floored) + " with floored h)" + o.detail;
  return o;
}

Outcome iteration_conformance(const std::vector<SuiteRun>& runs) {
  Outcome o;
  double worst = 0;
  for (const auto& r : runs) {
    const double l_max = std::max(r.L0, 2 * r.lipschitz);
    const double bound = iteration_bound(l_max, r.report.f_z0 - r.f_low, r.p, r.report.m, r.eps, r.L0);
    const double k = r.report.terminated ? static_cast<double>(r.report.k_eps) : INFINITY;
    worst = std::max(worst, k / bound);
    if (!(k <= bound)) {
      o.pass = false;
      o.detail += " " + label(r) + fmt(" K=%g", k) + fmt(" bound=%g;", bound);
    }
  }
  o.detail = std::to_string(runs.size()) + " runs, max K/bound=" + fmt("%.3e", worst) + o.detail;
  return o;
}

Outcome oracle_accounting(const std::vector<SuiteRun>& runs) {
  Outcome o;
  std::int64_t failures = 0, trailing = 0;
  for (const auto& r : runs) {
    const RunReport& rep = r.report;
    std::int64_t expected = 0;
    for (const auto& rec : rep.records) {
      std::int64_t failed = 0;
      for (const auto& s : rec.lazy_trace) failed += s.subsolve_failed ? 1 : 0;
      expected += 1 + rep.n + 2 * rec.lazy_steps + failed;
      failures += failed;
    }
    // A run that stops at its first Step-1 check or at the cap pays one
    // Step-1 query outside any completed iteration.
    const bool trailing_query =
        rep.records.empty() || (!rep.terminated) || rep.records.back().alpha_k != StepStatus::kSolution;
    if (trailing_query) {
      ++expected;
      ++trailing;
    }
    const std::int64_t ceiling = rep.k_eps * (2 * rep.m + rep.n + 1);
    if (rep.oracle_calls != expected || rep.oracle_calls > ceiling) {
      o.pass = false;
      o.detail += " " + label(r) + " calls=" + std::to_string(rep.oracle_calls) + " expected=" +
                  std::to_string(expected) + " ceiling=" + std::to_string(ceiling) + ";";
    }
  }
  o.detail = std::to_string(runs.size()) + " runs checked, subsolve-failure snapshots=" + std::to_string(failures) +
             " trailing Step-1 queries=" + std::to_string(trailing) + o.detail;
  return o;
}

Outcome eps_scaling() {
  Outcome o;
  const auto problem = builtin_problem("rosenbrock_chain", 4);
  const std::vector<double> grid{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  for (int p = 1; p <= 2; ++p) {
    DriverConfig cfg;
    cfg.p = p;
    const auto rows = sweep_eps(problem, cfg, grid);
    std::vector<std::pair<double, double>> pairs;
    std::string counts;
    bool all_terminated = true;
    for (const auto& row : rows) {
      pairs.emplace_back(row.eps, static_cast<double>(row.oracle_calls));
      counts += (counts.empty() ? "" : ",") + std::to_string(row.oracle_calls);
      all_terminated = all_terminated && row.terminated;
    }
    const auto fit = fit_scaling_exponent(pairs);
    const double limit = (p + 1.0) / p + 0.25;
    const bool ok = all_terminated && fit.slope <= limit;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("p=") + std::to_string(p) + fmt(" slope=%.3f", fit.slope) +
                fmt(" limit=%.3f", limit) + " calls=[" + counts + "]" + (all_terminated ? "" : " (cap hit)");
  }
  return o;
}

Outcome m_sweep() {
  Outcome o;
  const auto problem = builtin_problem("cos_sum", 8);
  DriverConfig cfg;
  cfg.p = 2;
  cfg.eps = 1e-3;
  const auto rows = sweep_m(problem, cfg, {1, 2, 4, 8, 9, 16, 32});
  std::int64_t best = -1, at9 = -1;
  std::string counts;
  for (const auto& row : rows) {
    if (!row.terminated) o.pass = false;
    if (best < 0 || row.oracle_calls < best) best = row.oracle_calls;
    if (row.m == 9) at9 = row.oracle_calls;
    counts += (counts.empty() ? "" : " ") + std::string("m=") + std::to_string(row.m) + ":" + std::to_string(row.oracle_calls);
  }
  o.pass = o.pass && at9 > 0 && at9 <= 2 * best;
  o.detail = "calls " + counts + "; m=9 / min = " + fmt("%.3f", static_cast<double>(at9) / static_cast<double>(best));
  return o;
}

Outcome determinism() {
  Outcome o;
  int specs = 0;
  struct Spec {
    std::string problem;
    int n, p;
    double eps;
  };
  for (const auto& s : std::vector<Spec>{{"rosenbrock_chain", 4, 2, 1e-3},
                                         {"logistic_smooth", 3, 3, 1e-4},
                                         {"cos_sum", 5, 1, 1e-3}}) {
    DriverConfig cfg;
    cfg.p = s.p;
    cfg.eps = s.eps;
    cfg.seed = 12345;
    const auto problem = builtin_problem(s.problem, s.n);
    const std::string a = iteration_csv(run(problem, cfg));
    const std::string b = iteration_csv(run(problem, cfg));
    ++specs;
    if (a != b || a.empty()) {
      o.pass = false;
      o.detail += " " + s.problem + " differs;";
    }
  }
  const auto rows_a = verify_fd(builtin_problem("cos_sum", 3), 3, {1e-2}, 99);
  const auto rows_b = verify_fd(builtin_problem("cos_sum", 3), 3, {1e-2}, 99);
  if (verify_fd_csv(rows_a) != verify_fd_csv(rows_b)) {
    o.pass = false;
    o.detail += " verify-fd differs;";
  }
  o.detail = std::to_string(specs) + " run specs + 1 verify-fd spec byte-identical" + o.detail;
  return o;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_s > 0 && secs >= limit_s) {
      o.pass = false;
      o.detail += fmt(" (runtime limit %.0f s exceeded)", limit_s);
    }
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "fd-error-bound", 10, fd_error_bound);
  report(2, "subsolver-certificate", 60, subsolver_certificate);
  report(3, "lazy-steps-soundness", 60, lazy_steps_soundness);

  std::vector<SuiteRun> runs;
  const auto start = Clock::now();
  try {
    runs = suite_runs();
  } catch (const std::exception& e) {
    std::printf("suite runs threw: %s\n", e.what());
  }
  const double suite_secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("driver suite: %zu runs in %.2f s\n", runs.size(), suite_secs);
  report(4, "lipschitz-ceiling", 60 - suite_secs, [&] { return lipschitz_ceiling(runs); });
  report(5, "iteration-bound", 120 - suite_secs, [&] { return iteration_conformance(runs); });
  report(6, "oracle-accounting", 0, [&] { return oracle_accounting(runs); });

  report(7, "eps-scaling", 300, eps_scaling);
  report(8, "m-sweep", 180, m_sweep);
  report(9, "determinism", 0, determinism);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
