#include <cmath>
#include <cstdio>
#include <ostream>

#include "stadium/eigensolve.hpp"
#include "stadium/error.hpp"
#include "stadium/oracle/bessel.hpp"
#include "stadium/oracle/dense_jacobi.hpp"
#include "stadium_cli/cli.hpp"

namespace stadium::cli {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

CheckResult rectangle_oracle(const ValidationOptions& o) {
  CheckResult res{"rectangle dense oracle", false, ""};
  const Grid grid = build_grid(RectangleGeometry(1.0, 1.0), GridSpec::full(1.0 / 8.0));
  const auto solved = smallest_k(o.assembler(grid), 8, SolveOptions{1e-10, o.seed, 0});
  std::vector<std::array<double, 2>> nodes;
  for (const Point& p : grid.points()) nodes.push_back({p.x, p.y});
  const auto dense = oracle::jacobi_eigen(oracle::dense_five_point(nodes, grid.h()));
  double worst = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    worst = std::max(worst, std::abs(solved.pairs[i].lambda - dense.values[i]) / dense.values[i]);
  }
  res.passed = solved.report.converged && worst <= 1e-8;
  res.detail = fmt("max rel err %.2e over 8 pairs", worst);
  return res;
}

double disk_ground_state(const Assembler& assembler, double h, std::uint64_t seed) {
  const Grid grid = build_grid(StadiumGeometry(0.0), GridSpec::quadrant(h, SymmetryClass::EE));
  const auto solved = smallest_k(assembler(grid), 1, SolveOptions{kDefaultTolerance, seed, 0});
  if (!solved.report.converged) throw Error("disk solve did not converge");
  return solved.pairs.front().lambda;
}

CheckResult disk_convergence(const ValidationOptions& o) {
  CheckResult res{"disk Bessel convergence", false, ""};
  const double exact = oracle::disk_eigenvalue(0, 1);
  const std::vector<double> hs = o.quick ? std::vector<double>{1.0 / 16, 1.0 / 32}
                                         : std::vector<double>{1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::vector<double> errs;
  for (double h : hs) errs.push_back(std::abs(disk_ground_state(o.assembler, h, o.seed) - exact) / exact);
  bool ok = true;
  for (std::size_t i = 1; i < errs.size(); ++i) ok = ok && errs[i] < errs[i - 1];
  if (o.quick) {
    ok = ok && errs[1] <= 0.05;
    res.detail = fmt("rel err %.3f%% (h=1/16), %.3f%% (h=1/32)", 100 * errs[0], 100 * errs[1]);
  } else {
    ok = ok && errs[0] <= 0.05 && errs[1] <= 0.02;
    res.detail = fmt("rel err %.3f%%, %.3f%%, %.3f%% (h=1/32,1/64,1/128)", 100 * errs[0], 100 * errs[1], 100 * errs[2]);
  }
  res.passed = ok;
  return res;
}

CheckResult quadrant_full(const ValidationOptions& o) {
  CheckResult res{"quadrant/full consistency", false, ""};
  SpectrumOptions opt;
  opt.h = o.quick ? 1.0 / 16 : 1.0 / 32;
  opt.k = 5;
  opt.seed = o.seed;
  const StadiumGeometry g(0.5);
  opt.mode = GridMode::Quadrant;
  const auto quad = solve_spectrum(g, {SymmetryClass::EE}, opt).front();
  opt.mode = GridMode::FullDomain;
  const auto full = solve_spectrum(g, {SymmetryClass::EE}, opt).front();
  double worst = 0.0;
  bool ok = quad.converged && full.converged && quad.lambdas.size() == 5 && full.lambdas.size() == 5;
  for (std::size_t i = 0; ok && i < 5; ++i) {
    worst = std::max(worst, std::abs(quad.lambdas[i] - full.lambdas[i]) / full.lambdas[i]);
  }
  res.passed = ok && worst <= 0.005;
  res.detail = fmt("a=0.5, EE 1-5 max rel diff %.2e", worst);
  return res;
}

CheckResult weyl(const ValidationOptions& o) {
  CheckResult res{"Weyl count", false, ""};
  SpectrumOptions opt;
  opt.h = o.quick ? 1.0 / 32 : 1.0 / 64;
  opt.seed = o.seed;
  const double lambda = o.quick ? 60.0 : 100.0;
  const StadiumGeometry g(1.0);
  const auto n = static_cast<double>(count_eigenvalues_below(g, lambda, opt));
  const double estimate = weyl_estimate(g, lambda);
  res.passed = std::abs(n - estimate) <= 0.1 * estimate;
  res.detail = fmt("N(%g) = %g, estimate %.2f", lambda, n, estimate);
  return res;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  std::vector<CheckResult> out;
  using Check = CheckResult (*)(const ValidationOptions&);
  const std::pair<const char*, Check> checks[] = {{"rectangle dense oracle", rectangle_oracle},
                                                  {"disk Bessel convergence", disk_convergence},
                                                  {"quadrant/full consistency", quadrant_full},
                                                  {"Weyl count", weyl}};
  for (const auto& [name, check] : checks) {
    try {
      out.push_back(check(options));
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  }
  return out;
}

int cmd_validate(const ValidationOptions& options, std::ostream& out) {
  const auto results = run_validation(options);
  bool ok = true;
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %-4s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    out << line;
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitValidation;
}

}  // namespace stadium::cli
