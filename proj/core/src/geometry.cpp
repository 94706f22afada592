#include "stadium/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stadium/error.hpp"

namespace stadium {

StadiumGeometry::StadiumGeometry(double a, double r) : a_(a), r_(r) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("stadium: a must be finite and >= 0");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("stadium: r must be finite and > 0");
}

RectangleGeometry::RectangleGeometry(double lx, double ly) : lx_(lx), ly_(ly) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw InvalidArgument("rectangle: side lengths must be finite and > 0");
  }
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

bool contains(const Geometry& geometry, Point p) noexcept {
  return std::visit(
      Overloaded{
          [p](const StadiumGeometry& s) {
            const double ax = std::abs(p.x);
            if (ax <= s.a() && std::abs(p.y) < s.r()) return true;
            const double dx = ax - s.a();
            return dx * dx + p.y * p.y < s.r() * s.r();
          },
          [p](const RectangleGeometry& rect) {
            return std::abs(p.x) < 0.5 * rect.lx() && std::abs(p.y) < 0.5 * rect.ly();
          }},
      geometry);
}

double area(const Geometry& geometry) noexcept {
  return std::visit(Overloaded{[](const StadiumGeometry& s) {
                                 return std::numbers::pi * s.r() * s.r() + 4.0 * s.a() * s.r();
                               },
                               [](const RectangleGeometry& r) { return r.lx() * r.ly(); }},
                    geometry);
}

double perimeter(const Geometry& geometry) noexcept {
  return std::visit(
      Overloaded{[](const StadiumGeometry& s) { return 2.0 * std::numbers::pi * s.r() + 4.0 * s.a(); },
                 [](const RectangleGeometry& r) { return 2.0 * (r.lx() + r.ly()); }},
      geometry);
}

BoundingBox bounding_box(const Geometry& geometry) noexcept {
  return std::visit(Overloaded{[](const StadiumGeometry& s) {
                                 const double hx = s.a() + s.r();
                                 return BoundingBox{-hx, hx, -s.r(), s.r()};
                               },
                               [](const RectangleGeometry& r) {
                                 return BoundingBox{-0.5 * r.lx(), 0.5 * r.lx(), -0.5 * r.ly(),
                                                    0.5 * r.ly()};
                               }},
                    geometry);
}

std::string describe(const Geometry& geometry) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{[&os](const StadiumGeometry& s) { os << "stadium(a=" << s.a() << ", r=" << s.r() << ")"; },
                        [&os](const RectangleGeometry& r) {
                          os << "rectangle(lx=" << r.lx() << ", ly=" << r.ly() << ")";
                        }},
             geometry);
  return os.str();
}

Parity parity(SymmetryClass cls, Axis axis) {
  switch (cls) {
    case SymmetryClass::EE: return Parity::Even;
    case SymmetryClass::OO: return Parity::Odd;
    case SymmetryClass::EO: return axis == Axis::X ? Parity::Even : Parity::Odd;
    case SymmetryClass::OE: return axis == Axis::X ? Parity::Odd : Parity::Even;
    case SymmetryClass::Ambiguous: break;
  }
  throw InvalidArgument("parity: ambiguous symmetry class has no parity");
}

SymmetryClass make_class(Parity about_x, Parity about_y) noexcept {
  if (about_x == Parity::Even) return about_y == Parity::Even ? SymmetryClass::EE : SymmetryClass::EO;
  return about_y == Parity::Even ? SymmetryClass::OE : SymmetryClass::OO;
}

std::string_view to_string(SymmetryClass cls) noexcept {
  switch (cls) {
    case SymmetryClass::EE: return "EE";
    case SymmetryClass::EO: return "EO";
    case SymmetryClass::OE: return "OE";
    case SymmetryClass::OO: return "OO";
    case SymmetryClass::Ambiguous: return "Ambiguous";
  }
  return "Ambiguous";
}

std::optional<SymmetryClass> parse_symmetry_class(std::string_view text) {
  for (SymmetryClass cls : kDefiniteClasses) {
    const auto name = to_string(cls);
    if (text.size() == name.size() &&
        std::equal(text.begin(), text.end(), name.begin(),
                   [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; })) {
      return cls;
    }
  }
  return std::nullopt;
}

std::string_view to_string(GridMode mode) noexcept {
  return mode == GridMode::FullDomain ? "full" : "quadrant";
}

std::optional<std::size_t> Grid::index_of(int i, int j) const noexcept {
  if (i < i_min_ || i > i_max_ || j < j_min_ || j > j_max_) return std::nullopt;
  const auto width = static_cast<std::size_t>(i_max_ - i_min_ + 1);
  const std::int32_t k = lookup_[static_cast<std::size_t>(j - j_min_) * width +
                                 static_cast<std::size_t>(i - i_min_)];
  if (k < 0) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::size_t Grid::reflected(std::size_t k, Axis axis) const {
  if (!reflection_closed()) throw NotReflectionClosedError("reflection requires a full-domain grid");
  const LatticeIndex n = nodes_.at(k);
  const auto mirror = axis == Axis::X ? index_of(n.i, -1 - n.j) : index_of(-1 - n.i, n.j);
  // Full grids of reflection-symmetric domains always contain the mirror node.
  if (!mirror) throw NotReflectionClosedError("grid is not closed under reflection");
  return *mirror;
}

void Grid::index_nodes() {
  std::sort(nodes_.begin(), nodes_.end(), [](LatticeIndex a, LatticeIndex b) {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  });
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  if (nodes_.empty()) throw EmptyGridError("no interior lattice node at h = " + std::to_string(spec_.h));

  i_min_ = i_max_ = nodes_.front().i;
  j_min_ = nodes_.front().j;
  j_max_ = nodes_.back().j;
  for (const auto& n : nodes_) {
    i_min_ = std::min(i_min_, n.i);
    i_max_ = std::max(i_max_, n.i);
  }
  const auto width = static_cast<std::size_t>(i_max_ - i_min_ + 1);
  const auto height = static_cast<std::size_t>(j_max_ - j_min_ + 1);
  lookup_.assign(width * height, -1);
  points_.clear();
  points_.reserve(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto& n = nodes_[k];
    lookup_[static_cast<std::size_t>(n.j - j_min_) * width + static_cast<std::size_t>(n.i - i_min_)] =
        static_cast<std::int32_t>(k);
    points_.push_back(lattice_point(n, spec_.h));
  }
}

Grid Grid::from_lattice(Geometry geometry, GridSpec spec, std::vector<LatticeIndex> nodes) {
  if (!(spec.h > 0.0)) throw InvalidArgument("grid spacing must be > 0");
  Grid grid(std::move(geometry), spec);
  for (const auto& n : nodes) {
    const Point p = lattice_point(n, spec.h);
    if (!contains(grid.geometry_, p)) throw InvalidArgument("lattice node outside the domain");
    if (spec.mode == GridMode::Quadrant && (n.i < 0 || n.j < 0)) {
      throw InvalidArgument("quadrant grid node outside the first quadrant");
    }
  }
  grid.nodes_ = std::move(nodes);
  grid.index_nodes();
  return grid;
}

Grid build_grid(const Geometry& geometry, const GridSpec& spec) {
  if (!(spec.h > 0.0) || !std::isfinite(spec.h)) throw InvalidArgument("grid spacing must be > 0");
  if (spec.mode == GridMode::Quadrant && spec.symmetry == SymmetryClass::Ambiguous) {
    throw InvalidArgument("quadrant grids need a definite symmetry class");
  }
  const BoundingBox box = bounding_box(geometry);
  const int ni = static_cast<int>(std::ceil(box.xmax / spec.h)) + 1;
  const int nj = static_cast<int>(std::ceil(box.ymax / spec.h)) + 1;
  const bool quadrant = spec.mode == GridMode::Quadrant;

  Grid grid(geometry, spec);
  for (int j = quadrant ? 0 : -nj - 1; j <= nj; ++j) {
    for (int i = quadrant ? 0 : -ni - 1; i <= ni; ++i) {
      if (contains(geometry, lattice_point({i, j}, spec.h))) grid.nodes_.push_back({i, j});
    }
  }
  grid.index_nodes();
  return grid;
}

}  // namespace stadium
