#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stadium {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct BoundingBox {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;
};

/// Two semicircular caps of radius r joined by straight segments of length 2a.
/// a = 0 is the disk of radius r.
class StadiumGeometry {
 public:
  explicit StadiumGeometry(double a, double r = 1.0);

  double a() const noexcept { return a_; }
  double r() const noexcept { return r_; }

  friend bool operator==(const StadiumGeometry&, const StadiumGeometry&) = default;

 private:
  double a_;
  double r_;
};

/// Axis-aligned rectangle centred at the origin; used as an analytic reference domain.
class RectangleGeometry {
 public:
  RectangleGeometry(double lx, double ly);

  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }

  friend bool operator==(const RectangleGeometry&, const RectangleGeometry&) = default;

 private:
  double lx_;
  double ly_;
};

using Geometry = std::variant<StadiumGeometry, RectangleGeometry>;

/// Strict interior test (the domain is an open set).
bool contains(const Geometry& geometry, Point p) noexcept;
double area(const Geometry& geometry) noexcept;
double perimeter(const Geometry& geometry) noexcept;
BoundingBox bounding_box(const Geometry& geometry) noexcept;
std::string describe(const Geometry& geometry);

/// Axis of a reflection. Reflection about the x-axis maps (x, y) to (x, -y);
/// reflection about the y-axis maps (x, y) to (-x, y).
enum class Axis { X, Y };

enum class Parity { Even, Odd };

/// Reflection symmetry of an eigenfunction. The first letter is the parity under
/// reflection about the x-axis, the second the parity under reflection about the y-axis.
enum class SymmetryClass { EE, EO, OE, OO, Ambiguous };

inline constexpr SymmetryClass kDefiniteClasses[] = {SymmetryClass::EE, SymmetryClass::EO,
                                                     SymmetryClass::OE, SymmetryClass::OO};

Parity parity(SymmetryClass cls, Axis axis);
SymmetryClass make_class(Parity about_x, Parity about_y) noexcept;
std::string_view to_string(SymmetryClass cls) noexcept;
std::optional<SymmetryClass> parse_symmetry_class(std::string_view text);

enum class GridMode { FullDomain, Quadrant };

std::string_view to_string(GridMode mode) noexcept;

struct GridSpec {
  double h = 1.0 / 64.0;
  GridMode mode = GridMode::FullDomain;
  /// Parity forced on the symmetry axes in quadrant mode; ignored for full grids.
  SymmetryClass symmetry = SymmetryClass::EE;

  static GridSpec full(double h) { return {h, GridMode::FullDomain, SymmetryClass::EE}; }
  static GridSpec quadrant(double h, SymmetryClass cls) { return {h, GridMode::Quadrant, cls}; }
};

struct LatticeIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

/// Staggered lattice position ((i + 1/2) h, (j + 1/2) h).
inline Point lattice_point(LatticeIndex idx, double h) noexcept {
  return {(idx.i + 0.5) * h, (idx.j + 0.5) * h};
}

/// Interior nodes of a staggered lattice restricted to a domain.
///
/// Nodes are ordered row-major by (j, i). No node lies on a symmetry axis, so the
/// reflection of lattice index i about the y-axis is -1 - i (likewise for j), and in
/// full-domain mode every node has a reflected partner in the grid.
class Grid {
 public:
  /// Builds a grid from an explicit lattice index list (e.g. a deserialized dump).
  /// Indices are sorted into canonical order; each must be strictly inside the domain.
  static Grid from_lattice(Geometry geometry, GridSpec spec, std::vector<LatticeIndex> nodes);

  const Geometry& geometry() const noexcept { return geometry_; }
  const GridSpec& spec() const noexcept { return spec_; }
  double h() const noexcept { return spec_.h; }
  GridMode mode() const noexcept { return spec_.mode; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::span<const LatticeIndex> lattice() const noexcept { return nodes_; }
  std::span<const Point> points() const noexcept { return points_; }
  LatticeIndex lattice(std::size_t k) const { return nodes_.at(k); }
  Point point(std::size_t k) const { return points_.at(k); }

  /// Node index of lattice position (i, j), or nullopt when it is not an interior node.
  std::optional<std::size_t> index_of(int i, int j) const noexcept;
  bool reflection_closed() const noexcept { return spec_.mode == GridMode::FullDomain; }
  /// Index of the mirror image of node k. Throws NotReflectionClosedError on quadrant grids.
  std::size_t reflected(std::size_t k, Axis axis) const;

  /// Lattice index range covered by the lookup table, inclusive.
  int i_min() const noexcept { return i_min_; }
  int i_max() const noexcept { return i_max_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }

 private:
  Grid(Geometry geometry, GridSpec spec) : geometry_(std::move(geometry)), spec_(spec) {}
  void index_nodes();

  Geometry geometry_;
  GridSpec spec_;
  std::vector<LatticeIndex> nodes_;
  std::vector<Point> points_;
  int i_min_ = 0, i_max_ = -1, j_min_ = 0, j_max_ = -1;
  std::vector<std::int32_t> lookup_;

  friend Grid build_grid(const Geometry& geometry, const GridSpec& spec);
};

/// All staggered lattice points strictly inside the domain (x > 0, y > 0 only in
/// quadrant mode). Throws EmptyGridError when there are none, InvalidArgument for h <= 0.
Grid build_grid(const Geometry& geometry, const GridSpec& spec);

}  // namespace stadium
