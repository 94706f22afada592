#include "stadium/contour.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "stadium/error.hpp"

namespace stadium {

std::size_t ContourSet::polyline_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : levels) n += l.polylines.size();
  return n;
}

LatticeField to_lattice(const ScalarField& field) {
  const Grid& grid = field.grid();
  if (!grid.reflection_closed()) throw InvalidArgument("contouring needs a full-domain field");
  LatticeField lattice;
  lattice.h = grid.h();
  lattice.nx = static_cast<std::size_t>(grid.i_max() - grid.i_min() + 1);
  lattice.ny = static_cast<std::size_t>(grid.j_max() - grid.j_min() + 1);
  const Point origin = lattice_point({grid.i_min(), grid.j_min()}, grid.h());
  lattice.x0 = origin.x;
  lattice.y0 = origin.y;
  lattice.values.assign(lattice.nx * lattice.ny, 0.0);
  lattice.valid.assign(lattice.nx * lattice.ny, 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const LatticeIndex n = grid.lattice(k);
    const auto idx = static_cast<std::size_t>(n.j - grid.j_min()) * lattice.nx +
                     static_cast<std::size_t>(n.i - grid.i_min());
    lattice.values[idx] = field[k];
    lattice.valid[idx] = 1;
  }
  return lattice;
}

namespace {

enum Edge : int { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

struct Segment {
  Point a;
  Point b;
};

struct PointKey {
  std::uint64_t x;
  std::uint64_t y;
  friend bool operator==(const PointKey&, const PointKey&) = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const noexcept {
    return static_cast<std::size_t>(k.x * 0x9E3779B97F4A7C15ULL ^ (k.y + 0x7F4A7C159E3779B9ULL));
  }
};

PointKey key_of(Point p) {
  // +0.0 and -0.0 must meet.
  const double x = p.x == 0.0 ? 0.0 : p.x;
  const double y = p.y == 0.0 ? 0.0 : p.y;
  return {std::bit_cast<std::uint64_t>(x), std::bit_cast<std::uint64_t>(y)};
}

// Interpolated crossing on the lattice edge from node (i0, j0) to node (i1, j1), always
// evaluated from the lower node so both cells sharing the edge get identical bits.
Point edge_point(const LatticeField& f, std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1,
                 double level) {
  const double va = f.at(i0, j0);
  const double vb = f.at(i1, j1);
  const Point pa{f.x0 + static_cast<double>(i0) * f.h, f.y0 + static_cast<double>(j0) * f.h};
  const Point pb{f.x0 + static_cast<double>(i1) * f.h, f.y0 + static_cast<double>(j1) * f.h};
  const double t = std::clamp((level - va) / (vb - va), 0.0, 1.0);
  if (t == 0.0) return pa;
  if (t == 1.0) return pb;
  return {pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)};
}

Point cell_edge_point(const LatticeField& f, std::size_t i, std::size_t j, int edge, double level) {
  switch (edge) {
    case kBottom: return edge_point(f, i, j, i + 1, j, level);
    case kRight: return edge_point(f, i + 1, j, i + 1, j + 1, level);
    case kTop: return edge_point(f, i, j + 1, i + 1, j + 1, level);
    default: return edge_point(f, i, j, i, j + 1, level);
  }
}

// Edge pairs per case; corners bit0 = (i, j), bit1 = (i+1, j), bit2 = (i+1, j+1), bit3 = (i, j+1).
// Saddles 5 and 10 are listed for a centre value below the level.
constexpr std::array<std::array<int, 4>, 16> kCases{{
    {-1, -1, -1, -1},
    {kLeft, kBottom, -1, -1},
    {kBottom, kRight, -1, -1},
    {kLeft, kRight, -1, -1},
    {kRight, kTop, -1, -1},
    {kLeft, kBottom, kRight, kTop},
    {kBottom, kTop, -1, -1},
    {kLeft, kTop, -1, -1},
    {kTop, kLeft, -1, -1},
    {kBottom, kTop, -1, -1},
    {kBottom, kRight, kTop, kLeft},
    {kRight, kTop, -1, -1},
    {kLeft, kRight, -1, -1},
    {kBottom, kRight, -1, -1},
    {kLeft, kBottom, -1, -1},
    {-1, -1, -1, -1},
}};

std::vector<Polyline> chain(const std::vector<Segment>& segments) {
  struct End {
    std::size_t segment;
    bool is_a;
  };
  std::unordered_map<PointKey, std::vector<End>, PointKeyHash> incident;
  std::vector<PointKey> order;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (bool is_a : {true, false}) {
      const PointKey k = key_of(is_a ? segments[s].a : segments[s].b);
      auto [it, inserted] = incident.try_emplace(k);
      if (inserted) order.push_back(k);
      it->second.push_back({s, is_a});
    }
  }
  std::vector<char> used(segments.size(), 0);

  auto walk = [&](Point start) {
    Polyline line;
    line.points.push_back(start);
    Point current = start;
    while (true) {
      auto& ends = incident[key_of(current)];
      const auto next = std::find_if(ends.begin(), ends.end(), [&](const End& e) { return used[e.segment] == 0; });
      if (next == ends.end()) break;
      used[next->segment] = 1;
      const Segment& seg = segments[next->segment];
      current = next->is_a ? seg.b : seg.a;
      line.points.push_back(current);
    }
    if (line.points.size() > 2 && key_of(line.points.front()) == key_of(line.points.back())) {
      line.points.pop_back();
      line.closed = true;
    }
    return line;
  };

  std::vector<Polyline> lines;
  for (const PointKey& k : order) {
    const auto& ends = incident[k];
    if (ends.size() % 2 == 0) continue;
    while (std::any_of(ends.begin(), ends.end(), [&](const End& e) { return used[e.segment] == 0; })) {
      const End& e = ends.front();
      const Segment& seg = segments[e.segment];
      lines.push_back(walk(e.is_a ? seg.a : seg.b));
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s] == 0) lines.push_back(walk(segments[s].a));
  }
  return lines;
}

}  // namespace

ContourSet marching_squares(const LatticeField& f, std::span<const double> levels) {
  if (f.values.size() != f.nx * f.ny || f.valid.size() != f.nx * f.ny) {
    throw DimensionError("lattice field arrays do not match nx * ny");
  }
  ContourSet set;
  for (double level : levels) {
    if (!std::isfinite(level)) throw InvalidArgument("contour levels must be finite");
    std::vector<Segment> segments;
    for (std::size_t j = 0; j + 1 < f.ny; ++j) {
      for (std::size_t i = 0; i + 1 < f.nx; ++i) {
        if (!f.is_valid(i, j) || !f.is_valid(i + 1, j) || !f.is_valid(i + 1, j + 1) || !f.is_valid(i, j + 1)) {
          continue;
        }
        const std::array<double, 4> v{f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1)};
        int index = 0;
        for (int c = 0; c < 4; ++c) index |= (v[static_cast<std::size_t>(c)] > level ? 1 : 0) << c;
        std::array<int, 4> edges = kCases[static_cast<std::size_t>(index)];
        if (index == 5 || index == 10) {
          const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
          if (centre > level) edges = kCases[static_cast<std::size_t>(index == 5 ? 10 : 5)];
        }
        for (std::size_t e = 0; e < 4 && edges[e] >= 0; e += 2) {
          Segment s{cell_edge_point(f, i, j, edges[e], level), cell_edge_point(f, i, j, edges[e + 1], level)};
          if (key_of(s.a) == key_of(s.b)) continue;
          segments.push_back(s);
        }
      }
    }
    set.levels.push_back({level, chain(segments)});
  }
  return set;
}

ContourSet marching_squares(const ScalarField& field, std::span<const double> levels) {
  return marching_squares(to_lattice(field), levels);
}

std::vector<double> default_levels(const ScalarField& field) {
  const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
  std::vector<double> levels{0.0};
  if (lo == field.values().end() || !(*hi > *lo)) return levels;
  for (int s = 1; s <= 8; ++s) {
    const double level = *lo + (*hi - *lo) * s / 9.0;
    if (level != 0.0) levels.push_back(level);
  }
  return levels;
}

}  // namespace stadium
