#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stadium/fields.hpp"
#include "stadium/geometry.hpp"

namespace stadium {

struct Polyline {
  std::vector<Point> points;
  /// Closed polylines do not repeat their first point at the end.
  bool closed = false;
};

struct ContourLevel {
  double level = 0.0;
  std::vector<Polyline> polylines;
};

struct ContourSet {
  std::vector<ContourLevel> levels;

  std::size_t polyline_count() const noexcept;
};

/// Samples on a regular lattice, node (i, j) at (x0 + i h, y0 + j h), stored row-major.
/// Cells touching an invalid node are skipped.
struct LatticeField {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;
  std::vector<char> valid;

  double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
  bool is_valid(std::size_t i, std::size_t j) const { return valid[j * nx + i] != 0; }

  template <class F>
  static LatticeField from_function(double x0, double y0, double h, std::size_t nx, std::size_t ny, F&& f) {
    LatticeField field{x0, y0, h, nx, ny, std::vector<double>(nx * ny), std::vector<char>(nx * ny, 1)};
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        field.values[j * nx + i] = f(x0 + static_cast<double>(i) * h, y0 + static_cast<double>(j) * h);
      }
    }
    return field;
  }
};

/// Lattice covering a full-domain field; lattice positions without a grid node are invalid.
LatticeField to_lattice(const ScalarField& field);

/// Marching squares with linear edge interpolation. A corner is "above" when its value
/// exceeds the level; the two saddle cases are split by the mean of the four corners.
/// Segments are joined into polylines at coincident end points.
ContourSet marching_squares(const LatticeField& field, std::span<const double> levels);
ContourSet marching_squares(const ScalarField& field, std::span<const double> levels);

/// Zero plus 8 evenly spaced interior levels between the field's minimum and maximum.
std::vector<double> default_levels(const ScalarField& field);

}  // namespace stadium
