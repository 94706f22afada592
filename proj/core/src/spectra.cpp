#include "stadium/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <thread>

#include "stadium/discretize.hpp"
#include "stadium/error.hpp"

namespace stadium {

namespace {

SolveOptions solver_options(const SpectrumOptions& options) {
  SolveOptions s;
  s.tol = options.tol;
  s.seed = options.seed;
  return s;
}

std::vector<ClassSpectrum> solve_quadrants(const Geometry& geometry, const std::vector<SymmetryClass>& classes,
                                           const SpectrumOptions& options) {
  std::shared_ptr<const Grid> full;
  if (options.keep_fields) {
    full = std::make_shared<const Grid>(build_grid(geometry, GridSpec::full(options.h)));
  }
  std::vector<ClassSpectrum> out;
  for (SymmetryClass cls : classes) {
    auto grid = std::make_shared<const Grid>(build_grid(geometry, GridSpec::quadrant(options.h, cls)));
    const SparseSymMatrix m = assemble_laplacian(*grid);
    const SolveResult solved = smallest_k(m, std::min(options.k, m.n()), solver_options(options));
    ClassSpectrum spectrum;
    spectrum.symmetry = cls;
    spectrum.converged = solved.report.converged;
    for (const auto& pair : solved.pairs) {
      spectrum.lambdas.push_back(pair.lambda);
      if (options.keep_fields) {
        spectrum.fields.push_back(unfold_quadrant(ScalarField(grid, pair.vector), full));
      }
    }
    out.push_back(std::move(spectrum));
  }
  return out;
}

std::vector<ClassSpectrum> solve_full(const Geometry& geometry, const std::vector<SymmetryClass>& classes,
                                      const SpectrumOptions& options) {
  auto grid = std::make_shared<const Grid>(build_grid(geometry, GridSpec::full(options.h)));
  const SparseSymMatrix m = assemble_laplacian(*grid);
  const std::size_t n = m.n();
  std::size_t total = std::min(n, 4 * options.k + 4);
  while (true) {
    const SolveResult solved = smallest_k(m, total, solver_options(options));
    const auto modes = classify_modes(grid, solved.pairs, m, options.tol, options.threshold);
    // The top cluster may be missing a degenerate partner; only trust modes below it.
    const double top = solved.pairs.back().lambda;
    const double cut = total == n ? std::numeric_limits<double>::infinity() : top * (1.0 - 10.0 * options.tol);
    std::vector<ClassSpectrum> out;
    bool complete = true;
    for (SymmetryClass cls : classes) {
      ClassSpectrum spectrum;
      spectrum.symmetry = cls;
      spectrum.converged = solved.report.converged;
      for (const auto& mode : modes) {
        if (mode.symmetry != cls || !(mode.lambda < cut) || spectrum.lambdas.size() == options.k) continue;
        spectrum.lambdas.push_back(mode.lambda);
        if (options.keep_fields) spectrum.fields.push_back(mode.field);
      }
      complete = complete && spectrum.lambdas.size() == options.k;
      out.push_back(std::move(spectrum));
    }
    if (complete || total == n) return out;
    total = std::min(n, 2 * total);
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ClassSpectrum> solve_spectrum(const Geometry& geometry, const std::vector<SymmetryClass>& classes,
                                          const SpectrumOptions& options) {
  if (options.k == 0) throw InvalidArgument("k must be >= 1");
  return options.mode == GridMode::Quadrant ? solve_quadrants(geometry, classes, options)
                                            : solve_full(geometry, classes, options);
}

void SweepConfig::validate() const {
  if (a_values.empty()) throw InvalidArgument("sweep: no a values");
  for (std::size_t j = 0; j < a_values.size(); ++j) {
    if (!std::isfinite(a_values[j]) || a_values[j] < 0.0) throw InvalidArgument("sweep: a values must be >= 0");
    if (j > 0 && !(a_values[j] > a_values[j - 1])) throw InvalidArgument("sweep: a values must be strictly ascending");
  }
  if (classes.empty()) throw InvalidArgument("sweep: no symmetry classes");
  std::set<SymmetryClass> seen;
  for (SymmetryClass c : classes) {
    if (c == SymmetryClass::Ambiguous) throw InvalidArgument("sweep: classes must be EE, EO, OE or OO");
    if (!seen.insert(c).second) throw InvalidArgument("sweep: duplicate symmetry class");
  }
  if (spectrum.k == 0) throw InvalidArgument("sweep: k must be >= 1");
  if (!(spectrum.h > 0.0) || !std::isfinite(spectrum.h)) throw InvalidArgument("sweep: h must be > 0");
  if (!(spectrum.r > 0.0) || !std::isfinite(spectrum.r)) throw InvalidArgument("sweep: r must be > 0");
  if (!(spectrum.tol > 0.0) || spectrum.tol > 1e-2) throw InvalidArgument("sweep: tol must be in (0, 1e-2]");
  if (!(spectrum.threshold > 0.5 && spectrum.threshold < 1.0)) {
    throw InvalidArgument("sweep: symmetry threshold must be in (0.5, 1)");
  }
  if (threads == 0) throw InvalidArgument("sweep: threads must be >= 1");
}

std::vector<double> a_range(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw InvalidArgument("a_range: need step > 0 and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    values.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return values;
}

std::string config_hash(const SweepConfig& config) {
  std::string text = "a=";
  for (double a : config.a_values) text += fmt17(a) + ",";
  text += ";classes=";
  for (SymmetryClass c : config.classes) text += std::string(to_string(c)) + ",";
  const auto& s = config.spectrum;
  text += ";r=" + fmt17(s.r) + ";h=" + fmt17(s.h) + ";mode=" + std::string(to_string(s.mode)) +
          ";k=" + std::to_string(s.k) + ";tol=" + fmt17(s.tol) + ";seed=" + std::to_string(s.seed) +
          ";threshold=" + fmt17(s.threshold);
  return hash_text(text);
}

std::string hash_text(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CurveTable::CurveTable(std::vector<double> a_values, std::vector<SymmetryClass> classes, std::size_t k,
                       std::string provenance)
    : a_values_(std::move(a_values)), classes_(std::move(classes)), k_(k), provenance_(std::move(provenance)) {
  for (SymmetryClass c : classes_) {
    curves_[c].assign(k_, std::vector<std::optional<double>>(a_values_.size()));
  }
}

std::optional<double> CurveTable::lambda(SymmetryClass cls, std::size_t curve, std::size_t a_index) const {
  const auto it = curves_.find(cls);
  if (it == curves_.end() || curve >= k_ || a_index >= a_values_.size()) {
    throw IndexError("curve table index out of range");
  }
  return it->second[curve][a_index];
}

void CurveTable::set(SymmetryClass cls, std::size_t curve, std::size_t a_index, std::optional<double> value) {
  const auto it = curves_.find(cls);
  if (it == curves_.end() || curve >= k_ || a_index >= a_values_.size()) {
    throw IndexError("curve table index out of range");
  }
  it->second[curve][a_index] = value;
}

std::vector<std::optional<double>> CurveTable::curve(SymmetryClass cls, std::size_t curve) const {
  const auto it = curves_.find(cls);
  if (it == curves_.end() || curve >= k_) throw IndexError("curve table index out of range");
  return it->second[curve];
}

SweepResult run_sweep(const SweepConfig& config, SweepCache* cache) {
  config.validate();
  const std::size_t count = config.a_values.size();
  std::vector<SweepPoint> points(count);
  std::vector<char> from_cache(count, 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j = next++; j < count; j = next++) {
      const double a = config.a_values[j];
      if (cache != nullptr) {
        if (auto hit = cache->load(j, a)) {
          points[j] = std::move(*hit);
          from_cache[j] = 1;
          continue;
        }
      }
      SweepPoint point;
      point.a_index = j;
      point.a = a;
      try {
        const auto spectra =
            solve_spectrum(StadiumGeometry(a, config.spectrum.r), config.classes, config.spectrum);
        point.ok = true;
        for (const auto& s : spectra) {
          point.ok = point.ok && s.converged;
          point.lambdas[s.symmetry] = s.lambdas;
          if (config.spectrum.keep_fields) point.fields[s.symmetry] = s.fields;
        }
        if (!point.ok) point.error = "eigensolver did not converge";
      } catch (const Error& e) {
        point.ok = false;
        point.error = e.what();
      }
      if (cache != nullptr) cache->store(point);
      points[j] = std::move(point);
    }
  };

  const std::size_t threads = std::min(config.threads, count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  result.table = CurveTable(config.a_values, config.classes, config.spectrum.k, config_hash(config));
  for (std::size_t j = 0; j < count; ++j) {
    const SweepPoint& p = points[j];
    if (from_cache[j] != 0) {
      ++result.cached;
    } else {
      ++result.computed;
    }
    if (!p.ok) {
      ++result.failed;
      continue;
    }
    for (const auto& [cls, lambdas] : p.lambdas) {
      if (!result.table.has_class(cls)) continue;
      for (std::size_t i = 0; i < lambdas.size() && i < config.spectrum.k; ++i) result.table.set(cls, i, j, lambdas[i]);
    }
  }
  result.points = std::move(points);
  return result;
}

std::vector<std::optional<double>> gaps(const CurveTable& table, SymmetryClass cls, std::size_t i) {
  if (!table.has_class(cls) || i + 1 >= table.k()) throw IndexError("gaps: curve pair out of range");
  const auto lower = table.curve(cls, i);
  const auto upper = table.curve(cls, i + 1);
  std::vector<std::optional<double>> g(lower.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (lower[j] && upper[j]) g[j] = *upper[j] - *lower[j];
  }
  return g;
}

std::vector<CrossingReport> detect_avoided_crossings(const CurveTable& table, SymmetryClass cls,
                                                     double min_prominence) {
  std::vector<CrossingReport> reports;
  if (!table.has_class(cls) || table.k() < 2) return reports;
  const auto& a = table.a_values();
  for (std::size_t i = 0; i + 1 < table.k(); ++i) {
    const auto series = gaps(table, cls, i);
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < series.size(); ++j) {
      if (series[j]) idx.push_back(j);
    }
    if (idx.size() < 3) continue;
    auto g = [&](std::size_t p) { return *series[idx[p]]; };
    for (std::size_t p = 1; p + 1 < idx.size(); ++p) {
      if (!(g(p) < g(p - 1) && g(p) <= g(p + 1))) continue;
      double left_peak = g(p);
      for (std::size_t q = p; q-- > 0;) {
        if (g(q) < g(p)) break;
        left_peak = std::max(left_peak, g(q));
      }
      double right_peak = g(p);
      for (std::size_t q = p + 1; q < idx.size(); ++q) {
        if (g(q) < g(p)) break;
        right_peak = std::max(right_peak, g(q));
      }
      const double prominence = std::min(left_peak, right_peak) - g(p);
      if (prominence <= 1e-12 * std::abs(g(p)) || prominence < min_prominence) continue;  // roundoff is not a dip
      CrossingReport r;
      r.symmetry = cls;
      r.lower = i;
      r.a_index = idx[p];
      r.a_star = a[idx[p]];
      r.min_gap = g(p);
      r.prominence = prominence;
      r.bracket_lo = a[idx[p - 1]];
      r.bracket_hi = a[idx[p + 1]];
      reports.push_back(r);
    }
  }
  return reports;
}

CrossingReport refine_crossing(const CrossingReport& report, const CurveTable& table, const GapFunction& gap,
                               const RefineOptions& options) {
  const auto series = gaps(table, report.symmetry, report.lower);
  if (!series[report.a_index]) throw InvalidArgument("refine_crossing: report points at a hole");
  const auto& a = table.a_values();
  std::size_t left = report.a_index;
  while (left > 0 && !series[--left]) {
  }
  std::size_t right = report.a_index;
  while (right + 1 < a.size() && !series[++right]) {
  }
  if (left == report.a_index || right == report.a_index || !series[left] || !series[right]) {
    CrossingReport lost = report;
    lost.lost_bracket = true;
    return lost;
  }

  struct Sample {
    double a;
    double g;
  };
  std::vector<Sample> samples{{a[left], *series[left]}, {a[right], *series[right]}};
  double lo = a[left];
  double hi = a[right];
  try {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = gap(x1);
    double f2 = gap(x2);
    samples.push_back({x1, f1});
    samples.push_back({x2, f2});
    while (hi - lo > options.width) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = gap(x1);
        samples.push_back({x1, f1});
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = gap(x2);
        samples.push_back({x2, f2});
      }
    }
  } catch (const Error&) {
    CrossingReport lost = report;
    lost.lost_bracket = true;
    return lost;
  }

  std::sort(samples.begin(), samples.end(), [](const Sample& s, const Sample& t) { return s.a < t.a; });
  std::size_t best = 0;
  for (std::size_t s = 1; s < samples.size(); ++s) {
    if (samples[s].g < samples[best].g) best = s;
  }
  bool unimodal = best > 0 && best + 1 < samples.size();
  for (std::size_t s = 1; unimodal && s < samples.size(); ++s) {
    const double slack = options.noise * std::max(std::abs(samples[s].g), std::abs(samples[s - 1].g));
    if (s <= best && samples[s].g > samples[s - 1].g + slack) unimodal = false;
    if (s > best && samples[s].g < samples[s - 1].g - slack) unimodal = false;
  }
  if (!unimodal) {
    CrossingReport lost = report;
    lost.lost_bracket = true;
    return lost;
  }

  // Parabola through the best sample and its neighbours.
  const Sample p0 = samples[best - 1];
  const Sample p1 = samples[best];
  const Sample p2 = samples[best + 1];
  const double d01 = (p1.g - p0.g) / (p1.a - p0.a);
  const double d12 = (p2.g - p1.g) / (p2.a - p1.a);
  const double curvature = (d12 - d01) / (p2.a - p0.a);
  CrossingReport refined = report;
  refined.refined = true;
  refined.bracket_lo = a[left];
  refined.bracket_hi = a[right];
  if (curvature > 0.0) {
    // g(x) = p1.g + b (x - p1.a) + curvature (x - p1.a)^2 with b the slope at p1.
    const double b = d01 + curvature * (p1.a - p0.a);
    const double offset = std::clamp(-b / (2.0 * curvature), p0.a - p1.a, p2.a - p1.a);
    refined.a_star = p1.a + offset;
    refined.min_gap = p1.g + b * offset + curvature * offset * offset;
  } else {
    refined.a_star = p1.a;
    refined.min_gap = p1.g;
  }
  return refined;
}

GapFunction make_gap_function(const SweepConfig& config, SymmetryClass cls, std::size_t lower) {
  SpectrumOptions options = config.spectrum;
  options.keep_fields = false;
  options.k = lower + 3;  // the pair plus one guard vector
  return [options, cls, lower](double a) {
    const auto spectra = solve_spectrum(StadiumGeometry(a, options.r), {cls}, options);
    const ClassSpectrum& s = spectra.front();
    if (!s.converged) throw Error("gap evaluation did not converge");
    if (s.lambdas.size() < lower + 2) throw Error("gap evaluation returned too few eigenvalues");
    return s.lambdas[lower + 1] - s.lambdas[lower];
  };
}

std::size_t count_eigenvalues_below(const Geometry& geometry, double lambda_max, const SpectrumOptions& options) {
  std::size_t total = 0;
  for (SymmetryClass cls : kDefiniteClasses) {
    const Grid grid = build_grid(geometry, GridSpec::quadrant(options.h, cls));
    const SparseSymMatrix m = assemble_laplacian(grid);
    SolveOptions solve;
    solve.tol = options.tol;
    solve.seed = options.seed;
    std::size_t k = std::min<std::size_t>(m.n(), std::max<std::size_t>(options.k, 8));
    while (true) {
      const SolveResult solved = smallest_k(m, k, solve);
      if (!solved.report.converged) throw Error("eigenvalue count: solver did not converge");
      if (solved.pairs.back().lambda > lambda_max || k == m.n()) {
        total += static_cast<std::size_t>(std::count_if(solved.pairs.begin(), solved.pairs.end(),
                                                        [&](const EigenPair& p) { return p.lambda <= lambda_max; }));
        break;
      }
      k = std::min(m.n(), 2 * k);
    }
  }
  return total;
}

double weyl_estimate(const Geometry& geometry, double lambda) {
  const double four_pi = 4.0 * std::numbers::pi;
  return area(geometry) / four_pi * lambda - perimeter(geometry) / four_pi * std::sqrt(lambda);
}

}  // namespace stadium
