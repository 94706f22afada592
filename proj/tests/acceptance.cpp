// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [work-dir]   (a given work dir is kept, so the long sweep resumes)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "stadium/contour.hpp"
#include "stadium/eigensolve.hpp"
#include "stadium/oracle/bessel.hpp"
#include "stadium/oracle/dense_jacobi.hpp"
#include "stadium/serialize.hpp"
#include "stadium/spectra.hpp"
#include "stadium_cli/cli.hpp"

using namespace stadium;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

Outcome rectangle_dense() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid = build_grid(RectangleGeometry(1.0, 1.0), GridSpec::full(1.0 / 8));
  const auto solved = smallest_k(assemble_laplacian(grid), 8, SolveOptions{1e-10, kDefaultSeed, 0});
  const double elapsed = seconds_since(t0);
  std::vector<std::array<double, 2>> nodes;
  for (const Point& p : grid.points()) nodes.push_back({p.x, p.y});
  const auto dense = oracle::jacobi_eigen(oracle::dense_five_point(nodes, grid.h()));
  double worst = 0.0;
  for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, rel(solved.pairs[i].lambda, dense.values[i]));
  return {grid.size() <= 64 && solved.report.converged && worst <= 1e-8 && elapsed < 1.0,
          fmt("n=%zu, max rel err %.2e, %.3f s", grid.size(), worst, elapsed)};
}

Outcome disk_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const double exact = oracle::disk_eigenvalue(0, 1);
  double errs[3];
  const double hs[3] = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  for (int i = 0; i < 3; ++i) {
    const Grid grid = build_grid(StadiumGeometry(0.0), GridSpec::quadrant(hs[i], SymmetryClass::EE));
    const auto solved = smallest_k(assemble_laplacian(grid), 1);
    if (!solved.report.converged) return {false, fmt("no convergence at h=%g", hs[i])};
    errs[i] = rel(solved.pairs[0].lambda, exact);
  }
  const double elapsed = seconds_since(t0);
  const bool ok = errs[0] <= 0.05 && errs[1] <= 0.02 && errs[1] < errs[0] && errs[2] < errs[1] && elapsed < 120;
  return {ok, fmt("rel err %.3f%% / %.3f%% / %.3f%% at h=1/32,1/64,1/128 (j01^2=%.6f), %.1f s", 100 * errs[0],
                  100 * errs[1], 100 * errs[2], exact, elapsed)};
}

Outcome disk_ee() {
  const double ref[3] = {oracle::disk_eigenvalue(0, 1), oracle::disk_eigenvalue(2, 1), oracle::disk_eigenvalue(0, 2)};
  const double listed[3] = {5.7832, 26.3746, 30.4713};
  SpectrumOptions opt;
  opt.k = 3;
  const auto s = solve_spectrum(StadiumGeometry(0.0), {SymmetryClass::EE}, opt).front();
  bool ok = s.converged && s.lambdas.size() == 3;
  double worst = 0.0;
  for (int i = 0; ok && i < 3; ++i) {
    ok = ok && std::abs(ref[i] - listed[i]) < 1e-4;
    worst = std::max(worst, rel(s.lambdas[i], ref[i]));
  }
  ok = ok && worst <= 0.02;
  return {ok, fmt("EE %.4f %.4f %.4f, max rel err %.3f%%", s.lambdas.at(0), s.lambdas.at(1), s.lambdas.at(2),
                  100 * worst)};
}

struct SweepState {
  bool ran = false;
  int sweep_code = -1;
  int crossings_code = -1;
  double sweep_seconds = 0.0;
  double crossings_seconds = 0.0;
  StoredCurves curves;
  std::vector<CrossingReport> reports;
  std::string error;
};

cli::RunConfig default_sweep(const fs::path& out) {
  cli::RunConfig c;
  c.geometry = StadiumGeometry(0.0);
  c.h = 1.0 / 64;
  c.classes = {SymmetryClass::EE};
  c.a_values = a_range(0.0, 2.0, 0.02);
  c.delta = 0.05;
  c.output = out;
  return c;
}

SweepState run_default_sweep(const fs::path& out) {
  SweepState st;
  std::ostringstream log, err;
  try {
    const cli::RunConfig c = default_sweep(out);
    auto t0 = std::chrono::steady_clock::now();
    st.sweep_code = cli::cmd_sweep(c, log, err);
    st.sweep_seconds = seconds_since(t0);
    st.curves = curve_table_from_json(read_file(out / "curves.json"));
    t0 = std::chrono::steady_clock::now();
    st.crossings_code = cli::cmd_crossings(c, {}, log, err);
    st.crossings_seconds = seconds_since(t0);
    st.reports = crossings_from_json(read_file(out / "crossings.json"));
    st.ran = true;
  } catch (const std::exception& e) {
    st.error = e.what();
  }
  std::fputs(log.str().c_str(), stderr);
  std::fputs(err.str().c_str(), stderr);
  return st;
}

// EE curves 3..5 (zero-based lower index 2 or 3) with a_star inside the window
const CrossingReport* find_crossing(const SweepState& st, double lo, double hi) {
  const CrossingReport* best = nullptr;
  for (const auto& r : st.reports) {
    if (r.symmetry != SymmetryClass::EE || r.lower < 2 || r.lower > 3) continue;
    if (r.a_star < lo || r.a_star > hi) continue;
    if (!best || r.min_gap < best->min_gap) best = &r;
  }
  return best;
}

Outcome crossings_located(const SweepState& st) {
  if (!st.ran) return {false, "sweep failed: " + st.error};
  const CrossingReport* c1 = find_crossing(st, 0.6, 1.0);
  const CrossingReport* c2 = find_crossing(st, 1.3, 1.7);
  std::string detail = fmt("sweep %.0f s, crossings %.0f s", st.sweep_seconds, st.crossings_seconds);
  bool ok = st.sweep_code == 0 && st.crossings_code == 0 && c1 && c2;
  for (const auto* c : {c1, c2}) {
    if (!c) continue;
    detail += fmt("; f%zu/f%zu a*=%.4f gap=%.4f%s", c->lower + 1, c->lower + 2, c->a_star, c->min_gap,
                  c->refined ? "" : " (unrefined)");
  }
  ok = ok && c1->refined && c2->refined && std::abs(c1->a_star - 0.785) <= 0.05 && std::abs(c2->a_star - 1.51) <= 0.05;
  return {ok, detail};
}

Outcome non_crossing(const SweepState& st) {
  if (!st.ran) return {false, "sweep failed: " + st.error};
  const CurveTable& t = st.curves.table;
  const double tol = st.curves.config.spectrum.tol;
  double worst = INFINITY;
  std::size_t holes = 0;
  bool ok = true;
  for (std::size_t j = 0; j < t.a_values().size(); ++j) {
    for (std::size_t i = 0; i + 1 < t.k(); ++i) {
      const auto lo = t.lambda(SymmetryClass::EE, i, j);
      const auto up = t.lambda(SymmetryClass::EE, i + 1, j);
      if (!lo || !up) {
        ++holes;
        continue;
      }
      const double margin = (*up - *lo) / (10 * tol * *lo);
      worst = std::min(worst, margin);
      ok = ok && margin > 1.0;
    }
  }
  ok = ok && holes == 0;
  return {ok, fmt("%zu a values x %zu gaps, min gap / (10 tol lambda) = %.3g, holes %zu", t.a_values().size(),
                  t.k() - 1, worst, holes)};
}

Outcome character_swap(const SweepState& st) {
  if (!st.ran) return {false, "sweep failed: " + st.error};
  std::string detail;
  bool ok = true;
  for (const auto& [lo, hi] : {std::pair{0.6, 1.0}, std::pair{1.3, 1.7}}) {
    const CrossingReport* c = find_crossing(st, lo, hi);
    if (!c || !c->swap) {
      ok = false;
      detail += fmt("[%.1f,%.1f]: no diagnostic; ", lo, hi);
      continue;
    }
    const auto& s = *c->swap;
    const double diag = std::max(std::abs(s[0][0]), std::abs(s[1][1]));
    const double off = std::min(std::abs(s[0][1]), std::abs(s[1][0]));
    ok = ok && off > diag;
    detail += fmt("a*=%.3f |S|=[[%.3f %.3f][%.3f %.3f]]; ", c->a_star, std::abs(s[0][0]), std::abs(s[0][1]),
                  std::abs(s[1][0]), std::abs(s[1][1]));
  }
  return {ok, detail + "delta 0.05"};
}

Outcome quadrant_full() {
  double worst = 0.0;
  bool ok = true;
  std::string detail;
  for (double a : {0.0, 0.5, 1.0}) {
    SpectrumOptions opt;
    opt.k = 5;
    opt.mode = GridMode::Quadrant;
    const auto q = solve_spectrum(StadiumGeometry(a), {SymmetryClass::EE}, opt).front();
    opt.mode = GridMode::FullDomain;
    const auto f = solve_spectrum(StadiumGeometry(a), {SymmetryClass::EE}, opt).front();
    ok = ok && q.converged && f.converged && q.lambdas.size() == 5 && f.lambdas.size() == 5;
    double w = 0.0;
    for (std::size_t i = 0; ok && i < 5; ++i) w = std::max(w, rel(q.lambdas[i], f.lambdas[i]));
    worst = std::max(worst, w);
    detail += fmt("a=%.1f %.1e; ", a, w);
  }
  return {ok && worst <= 0.005, detail + "h=1/64"};
}

Outcome weyl() {
  const double a = 1.0;
  const double r = 1.0;
  const double area = 4 * a * r + std::numbers::pi * r * r;
  const double perimeter = 4 * a + 2 * std::numbers::pi * r;
  const double estimate = area / (4 * std::numbers::pi) * 100 - perimeter / (4 * std::numbers::pi) * 10;
  SpectrumOptions opt;
  const auto n = static_cast<double>(count_eigenvalues_below(StadiumGeometry(a, r), 100.0, opt));
  return {std::abs(n - estimate) <= 0.1 * estimate, fmt("N(100) = %.0f, estimate %.2f", n, estimate)};
}

Outcome determinism(const fs::path& work) {
  cli::RunConfig c;
  c.h = 1.0 / 32;
  c.classes = {SymmetryClass::EE, SymmetryClass::OE};
  c.a_values = {0.0, 0.5, 1.0};
  c.threads = 1;
  std::ostringstream log, err;
  const fs::path one = work / "det_one";
  const fs::path two = work / "det_two";
  fs::remove_all(one);
  fs::remove_all(two);
  c.output = one;
  const int r1 = cli::cmd_sweep(c, log, err);
  c.output = two;
  const int r2 = cli::cmd_sweep(c, log, err);
  bool same = r1 == 0 && r2 == 0;
  std::size_t bytes = 0;
  for (const char* name : {"curves.csv", "curves.json", "correlation_EE.svg", "correlation_OE.svg"}) {
    const std::string x = read_file(one / name);
    same = same && x == read_file(two / name);
    bytes += x.size();
  }
  return {same, fmt("2 fresh runs, 4 files, %zu bytes identical", bytes)};
}

Outcome marching_squares_oracle() {
  const double h = 2.0 / 128;
  const double zero = 0.0;
  const auto line = LatticeField::from_function(-1.0, -1.0, h, 129, 129, [](double x, double) { return x; });
  const auto circle =
      LatticeField::from_function(-1.0, -1.0, h, 129, 129, [](double x, double y) { return x * x + y * y - 0.25; });
  const auto ls = marching_squares(line, std::span(&zero, 1));
  const auto cs = marching_squares(circle, std::span(&zero, 1));
  double line_err = 0.0;
  std::size_t line_pts = 0;
  for (const auto& p : ls.levels.at(0).polylines) {
    for (const Point& q : p.points) line_err = std::max(line_err, std::abs(q.x)), ++line_pts;
  }
  double circle_err = 0.0;
  std::size_t circle_pts = 0;
  for (const auto& p : cs.levels.at(0).polylines) {
    for (const Point& q : p.points) circle_err = std::max(circle_err, std::abs(std::hypot(q.x, q.y) - 0.5)), ++circle_pts;
  }
  const bool ok = line_pts > 0 && circle_pts > 0 && line_err <= 1e-12 && circle_err <= h;
  return {ok, fmt("line max |x| %.1e (%zu pts), circle max |r-0.5| %.2e <= h (%zu pts)", line_err, line_pts,
                  circle_err, circle_pts)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work;
  bool keep = argc > 1;
  if (keep) {
    work = argv[1];
  } else {
    std::random_device rd;
    work = fs::temp_directory_path() / ("stadium_acceptance_" + std::to_string(rd()));
  }
  fs::create_directories(work);

  const auto guarded = [](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  SweepState sweep;
  bool all = true;
  const auto report = [&](int n, const char* name, const Outcome& o) {
    std::printf("%s criterion %2d: %-32s %s\n", o.passed ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.passed;
  };
  report(1, "rectangle dense oracle", guarded(rectangle_dense));
  report(2, "disk convergence", guarded(disk_convergence));
  report(3, "disk EE sequence", guarded(disk_ee));
  sweep = run_default_sweep(work / "sweep");
  report(4, "avoided crossings located", guarded([&] { return crossings_located(sweep); }));
  report(5, "non-crossing gaps", guarded([&] { return non_crossing(sweep); }));
  report(6, "character swap", guarded([&] { return character_swap(sweep); }));
  report(7, "quadrant/full consistency", guarded(quadrant_full));
  report(8, "Weyl count", guarded(weyl));
  report(9, "sweep determinism", guarded([&] { return determinism(work); }));
  report(10, "marching squares oracle", guarded(marching_squares_oracle));

  if (!keep) {
    std::error_code ec;
    fs::remove_all(work, ec);
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
