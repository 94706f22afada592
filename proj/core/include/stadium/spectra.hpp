#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stadium/eigensolve.hpp"
#include "stadium/fields.hpp"
#include "stadium/geometry.hpp"

namespace stadium {

/// Solver and discretisation settings shared by every stadium in a sweep.
struct SpectrumOptions {
  double r = 1.0;
  double h = 1.0 / 64.0;
  GridMode mode = GridMode::Quadrant;
  std::size_t k = 8;
  double tol = kDefaultTolerance;
  std::uint64_t seed = kDefaultSeed;
  double threshold = kDefaultSymmetryThreshold;
  /// Keep full-domain eigenfunctions (quadrant solutions are unfolded).
  bool keep_fields = false;
};

struct ClassSpectrum {
  SymmetryClass symmetry = SymmetryClass::EE;
  /// Ascending; fewer than k entries only if the class has fewer modes on this grid.
  std::vector<double> lambdas;
  std::vector<ScalarField> fields;
  bool converged = false;
};

/// k smallest eigenvalues of each requested class for one geometry.
///
/// Quadrant mode solves one folded problem per class. Full-domain mode solves the whole
/// grid, classifies the eigenvectors and widens the solve until each class has k modes.
std::vector<ClassSpectrum> solve_spectrum(const Geometry& geometry, const std::vector<SymmetryClass>& classes,
                                          const SpectrumOptions& options);

struct SweepConfig {
  std::vector<double> a_values;
  std::vector<SymmetryClass> classes{SymmetryClass::EE};
  SpectrumOptions spectrum;
  std::size_t threads = 1;

  /// Throws InvalidArgument on an unusable configuration.
  void validate() const;
};

/// start, start + step, ... up to stop inclusive, computed as start + i * step and rounded
/// to 12 decimals so that 0.02-type steps land on their decimal values.
std::vector<double> a_range(double start, double stop, double step);

/// Stable 64-bit FNV-1a hash of every science parameter of a sweep, as 16 hex digits.
std::string config_hash(const SweepConfig& config);
/// FNV-1a of arbitrary text, same formatting as config_hash.
std::string hash_text(std::string_view text);

/// Per-class eigenvalue curves lambda[i][j]: the i-th smallest eigenvalue of the class at
/// a_values[j]. Missing entries are holes left by failed sweep points.
class CurveTable {
 public:
  CurveTable() = default;
  CurveTable(std::vector<double> a_values, std::vector<SymmetryClass> classes, std::size_t k,
             std::string provenance = {});

  const std::vector<double>& a_values() const noexcept { return a_values_; }
  const std::vector<SymmetryClass>& classes() const noexcept { return classes_; }
  std::size_t k() const noexcept { return k_; }
  const std::string& provenance() const noexcept { return provenance_; }
  bool has_class(SymmetryClass cls) const noexcept { return curves_.count(cls) != 0; }
  bool empty() const noexcept { return a_values_.empty() || classes_.empty() || k_ == 0; }

  std::optional<double> lambda(SymmetryClass cls, std::size_t curve, std::size_t a_index) const;
  void set(SymmetryClass cls, std::size_t curve, std::size_t a_index, std::optional<double> value);
  std::vector<std::optional<double>> curve(SymmetryClass cls, std::size_t curve) const;

 private:
  std::vector<double> a_values_;
  std::vector<SymmetryClass> classes_;
  std::size_t k_ = 0;
  std::string provenance_;
  std::map<SymmetryClass, std::vector<std::vector<std::optional<double>>>> curves_;
};

/// Everything computed for one sweep abscissa.
struct SweepPoint {
  std::size_t a_index = 0;
  double a = 0.0;
  bool ok = false;
  std::string error;
  std::map<SymmetryClass, std::vector<double>> lambdas;
  std::map<SymmetryClass, std::vector<ScalarField>> fields;
};

/// Persistence hook used to resume sweeps; implementations must be thread-safe.
class SweepCache {
 public:
  virtual ~SweepCache() = default;
  virtual std::optional<SweepPoint> load(std::size_t a_index, double a) = 0;
  virtual void store(const SweepPoint& point) = 0;
};

struct SweepResult {
  CurveTable table;
  std::vector<SweepPoint> points;
  std::size_t computed = 0;
  std::size_t cached = 0;
  std::size_t failed = 0;
};

/// Solves every sweep point (concurrently when threads > 1) and assembles the curve table
/// in a index order, so the output does not depend on scheduling.
SweepResult run_sweep(const SweepConfig& config, SweepCache* cache = nullptr);

/// lambda[i + 1] - lambda[i] along the sweep; holes propagate. Throws IndexError.
std::vector<std::optional<double>> gaps(const CurveTable& table, SymmetryClass cls, std::size_t i);

struct CrossingReport {
  SymmetryClass symmetry = SymmetryClass::EE;
  std::size_t lower = 0;  ///< curves (lower, lower + 1), zero-based
  std::size_t a_index = 0;
  double a_star = 0.0;
  double min_gap = 0.0;
  double prominence = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool refined = false;
  bool lost_bracket = false;
  std::optional<SwapMatrix> swap;
};

/// Interior local minima of every adjacent-curve gap series of one class whose
/// topographic prominence is at least min_prominence. Sweep endpoints are never reported.
std::vector<CrossingReport> detect_avoided_crossings(const CurveTable& table, SymmetryClass cls,
                                                     double min_prominence);

using GapFunction = std::function<double(double a)>;

struct RefineOptions {
  double width = 1e-3;
  /// The masked operator only changes when a node enters or leaves the domain, so g(a) is a
  /// staircase; rises smaller than noise * g do not count against unimodality.
  double noise = 1e-2;
};

/// Golden-section search of gap(a) over the sampled bracket around report.a_star, then a
/// parabola through the best evaluated point and its neighbours. If an evaluation fails or
/// the samples stop being unimodal the input report comes back with lost_bracket set.
CrossingReport refine_crossing(const CrossingReport& report, const CurveTable& table, const GapFunction& gap,
                               const RefineOptions& options = {});

/// Gap between curves (lower, lower + 1) of one class from fresh solves at any a.
GapFunction make_gap_function(const SweepConfig& config, SymmetryClass cls, std::size_t lower);

/// Number of eigenvalues <= lambda_max over all four symmetry classes (quadrant solves).
std::size_t count_eigenvalues_below(const Geometry& geometry, double lambda_max, const SpectrumOptions& options);

/// Two-term Weyl estimate (A / 4 pi) lambda - (L / 4 pi) sqrt(lambda).
double weyl_estimate(const Geometry& geometry, double lambda);

}  // namespace stadium
