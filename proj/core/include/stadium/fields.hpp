#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "stadium/eigensolve.hpp"
#include "stadium/geometry.hpp"

namespace stadium {

/// Discrete function on a grid. The inner product is h^2-weighted:
/// <u, v> = h^2 sum_k u_k v_k.
class ScalarField {
 public:
  ScalarField(std::shared_ptr<const Grid> grid, std::vector<double> values);

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// Samples f(x, y) at every grid node.
template <class F>
ScalarField sample(std::shared_ptr<const Grid> grid, F&& f) {
  std::vector<double> values;
  values.reserve(grid->size());
  for (const Point& p : grid->points()) values.push_back(f(p.x, p.y));
  return ScalarField(std::move(grid), std::move(values));
}

/// <u, v>; throws GridMismatchError unless both live on the same grid.
double inner(const ScalarField& u, const ScalarField& v);
double norm(const ScalarField& f);

/// Scales to h^2 sum v^2 = 1. Throws ZeroFieldError.
ScalarField normalize(const ScalarField& f);

/// Permutes values through the grid's mirror map. Throws NotReflectionClosedError on quadrant grids.
ScalarField reflect(const ScalarField& f, Axis axis);

struct SymmetryScore {
  double s_x = 0.0;  ///< <f, reflect(f, X)> / <f, f>
  double s_y = 0.0;  ///< <f, reflect(f, Y)> / <f, f>
};

SymmetryScore symmetry_scores(const ScalarField& f);

inline constexpr double kDefaultSymmetryThreshold = 0.9;

/// Even about an axis if s >= threshold, odd if s <= -threshold; anything else is Ambiguous.
/// Throws InvalidArgument unless threshold is in (0.5, 1).
SymmetryClass classify(const SymmetryScore& s, double threshold = kDefaultSymmetryThreshold);

/// Flips the sign so that the largest-magnitude entry (lowest index on ties) is positive.
ScalarField fix_sign(const ScalarField& f);

enum class Combination { Sum, Difference };

/// (u +- v) / sqrt(2), renormalised and sign-fixed. Throws GridMismatchError or ZeroFieldError.
ScalarField combine(const ScalarField& u, const ScalarField& v, Combination sign);

/// <u, v~> where v~ is v resampled bilinearly onto u's nodes, zero outside v's domain.
double overlap(const ScalarField& u, const ScalarField& v);

/// Value of f at an arbitrary point: bilinear on the staggered lattice, missing nodes
/// count as zero, and points outside the domain give zero.
double sample_bilinear(const ScalarField& f, Point p);

/// S[p][q] = |overlap(before[p], after[q])| for a pair of adjacent curves.
using SwapMatrix = std::array<std::array<double, 2>, 2>;
SwapMatrix swap_diagnostic(const std::array<ScalarField, 2>& before, const std::array<ScalarField, 2>& after);

/// True when both off-diagonal magnitudes exceed both diagonal ones.
bool is_swapped(const SwapMatrix& s) noexcept;

/// Normalised, sign-fixed field from a solver eigenvector.
ScalarField field_from_eigenvector(std::shared_ptr<const Grid> grid, std::span<const double> vector);

/// Extends a quadrant-grid field to the full domain with the grid's forced parities.
/// The result is normalised and sign-fixed. `full` must be the matching full-domain grid.
ScalarField unfold_quadrant(const ScalarField& quadrant_field, std::shared_ptr<const Grid> full);

/// h^2-orthogonal projection onto the functions of one definite symmetry class.
ScalarField project_symmetry(const ScalarField& f, SymmetryClass cls);

struct ClassifiedMode {
  double lambda = 0.0;
  SymmetryClass symmetry = SymmetryClass::Ambiguous;
  SymmetryScore score;
  ScalarField field;
};

/// Classifies full-domain eigenpairs. Clusters whose relative gaps are below
/// 10 * tol are re-diagonalised against the four reflection projectors first, so
/// degenerate partners (e.g. the cos/sin pair of a disk mode) come out with definite
/// symmetry. Output order follows ascending lambda.
std::vector<ClassifiedMode> classify_modes(std::shared_ptr<const Grid> grid, const std::vector<EigenPair>& pairs,
                                           const SparseSymMatrix& matrix, double tol,
                                           double threshold = kDefaultSymmetryThreshold);

}  // namespace stadium
