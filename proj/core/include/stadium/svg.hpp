#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "stadium/contour.hpp"
#include "stadium/fields.hpp"
#include "stadium/spectra.hpp"

namespace stadium {

struct FieldPlotStyle {
  int width = 900;
  int height = 450;
  int margin = 40;
  std::string title;
  /// Emitted verbatim inside an XML comment (run provenance).
  std::string comment;
};

struct ChartStyle {
  int width = 900;
  int height = 600;
  int margin = 40;
  std::string title;
  std::string comment;
};

/// 6 significant digits, "%.6g"; "-0" is printed as "0".
std::string svg_number(double value);

/// Domain outline plus one <path> per contour polyline. The zero level is drawn heavy,
/// positive levels solid and negative levels dashed. Output bytes depend only on inputs.
std::string render_contours_svg(const Geometry& geometry, const ContourSet& contours,
                                const FieldPlotStyle& style = {});

/// Contours of a full-domain field at the given levels.
std::string render_field_svg(const ScalarField& field, std::span<const double> levels,
                             const FieldPlotStyle& style = {});

/// Eigenvalue-versus-a line chart for the given zero-based curve indices of one class.
/// Throws EmptyTableError when there is nothing to plot, IndexError on bad curve indices.
std::string render_correlation_svg(const CurveTable& table, SymmetryClass cls,
                                   std::span<const std::size_t> curves, const ChartStyle& style = {});

}  // namespace stadium
