#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stadium/error.hpp"
#include "stadium/geometry.hpp"

using namespace stadium;

TEST_CASE("contains is strict") {
  const Geometry s = StadiumGeometry(1.0, 1.0);
  CHECK(contains(s, {0.0, 0.0}));
  CHECK_FALSE(contains(s, {2.0, 0.0}));
  CHECK(contains(s, {1.5, 0.5}));
  CHECK_FALSE(contains(s, {0.0, 1.0}));
  CHECK_FALSE(contains(s, {-2.0, 0.0}));
  CHECK(contains(s, {-1.0, 0.999}));

  const Geometry rect = RectangleGeometry(1.0, 2.0);
  CHECK(contains(rect, {0.49, 0.99}));
  CHECK_FALSE(contains(rect, {0.5, 0.0}));
}

TEST_CASE("area and perimeter") {
  using std::numbers::pi;
  CHECK(area(StadiumGeometry(0.0)) == doctest::Approx(pi));
  CHECK(area(StadiumGeometry(1.0)) == doctest::Approx(pi + 4.0));
  CHECK(area(RectangleGeometry(1.0, 1.0)) == doctest::Approx(1.0));
  CHECK(perimeter(StadiumGeometry(0.0)) == doctest::Approx(2 * pi));
  CHECK(perimeter(StadiumGeometry(1.0)) == doctest::Approx(2 * pi + 4.0));
  CHECK(perimeter(RectangleGeometry(1.0, 2.0)) == doctest::Approx(6.0));
}

TEST_CASE("area matches a Monte-Carlo estimate") {
  std::mt19937_64 rng(7);
  for (double a : {0.0, 0.5, 1.3}) {
    const Geometry g = StadiumGeometry(a, 1.0);
    const BoundingBox b = bounding_box(g);
    std::uniform_real_distribution<double> ux(b.xmin, b.xmax), uy(b.ymin, b.ymax);
    const int samples = 1000000;
    int hits = 0;
    for (int s = 0; s < samples; ++s) hits += contains(g, {ux(rng), uy(rng)}) ? 1 : 0;
    const double box = (b.xmax - b.xmin) * (b.ymax - b.ymin);
    CHECK(box * hits / samples == doctest::Approx(area(g)).epsilon(1e-3));
  }
}

TEST_CASE("perimeter matches a polygonal estimate") {
  for (double a : {0.0, 0.7, 2.0}) {
    const int m = 20000;
    double len = 4.0 * a;
    for (int i = 0; i < m; ++i) {
      const double t0 = std::numbers::pi * i / m, t1 = std::numbers::pi * (i + 1) / m;
      len += 2.0 * std::hypot(std::cos(t1) - std::cos(t0), std::sin(t1) - std::sin(t0));
    }
    CHECK(len == doctest::Approx(perimeter(StadiumGeometry(a))).epsilon(1e-3));
  }
}

TEST_CASE("invalid geometries") {
  CHECK_THROWS_AS(StadiumGeometry(-0.1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(StadiumGeometry(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(RectangleGeometry(0.0, 1.0), InvalidArgument);
}

TEST_CASE("disk grid at h = 0.5") {
  const Grid full = build_grid(StadiumGeometry(0.0), GridSpec::full(0.5));
  CHECK(full.size() == 12);
  for (const Point& p : full.points()) CHECK(p.x * p.x + p.y * p.y < 1.0);
  CHECK_FALSE(full.index_of(1, 1).has_value());  // (0.75, 0.75)

  const Grid quad = build_grid(StadiumGeometry(0.0), GridSpec::quadrant(0.5, SymmetryClass::EE));
  REQUIRE(quad.size() == 3);
  // row-major by (j, i)
  CHECK(quad.point(0).x == 0.25);
  CHECK(quad.point(0).y == 0.25);
  CHECK(quad.point(1).x == 0.75);
  CHECK(quad.point(1).y == 0.25);
  CHECK(quad.point(2).x == 0.25);
  CHECK(quad.point(2).y == 0.75);

  CHECK_THROWS_AS(build_grid(StadiumGeometry(0.0), GridSpec::full(3.0)), EmptyGridError);
  CHECK_THROWS_AS(build_grid(StadiumGeometry(0.0), GridSpec::full(0.0)), InvalidArgument);
}

TEST_CASE("grid holds exactly the interior staggered points") {
  for (double a : {0.0, 0.35, 1.0}) {
    for (double h : {0.5, 0.25, 0.1}) {
      const Geometry g = StadiumGeometry(a);
      const Grid grid = build_grid(g, GridSpec::full(h));
      const BoundingBox b = bounding_box(g);
      std::size_t expected = 0;
      const int lo = static_cast<int>(std::floor(b.xmin / h)) - 2, hi = static_cast<int>(std::ceil(b.xmax / h)) + 2;
      for (int j = lo; j <= hi; ++j) {
        for (int i = lo; i <= hi; ++i) {
          const Point p = lattice_point({i, j}, h);
          const bool inside = contains(g, p);
          expected += inside ? 1 : 0;
          CHECK(grid.index_of(i, j).has_value() == inside);
        }
      }
      CHECK(grid.size() == expected);
      for (const Point& p : grid.points()) CHECK(contains(g, p));
    }
  }
}

TEST_CASE("reflections are bijections on full grids") {
  const Grid grid = build_grid(StadiumGeometry(0.8), GridSpec::full(0.1));
  for (Axis axis : {Axis::X, Axis::Y}) {
    std::vector<int> hit(grid.size(), 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const std::size_t r = grid.reflected(k, axis);
      ++hit[r];
      CHECK(grid.reflected(r, axis) == k);
      const Point p = grid.point(k), q = grid.point(r);
      if (axis == Axis::X) {
        CHECK(q.x == p.x);
        CHECK(q.y == -p.y);
      } else {
        CHECK(q.x == -p.x);
        CHECK(q.y == p.y);
      }
    }
    CHECK(std::all_of(hit.begin(), hit.end(), [](int c) { return c == 1; }));
  }
  const Grid quad = build_grid(StadiumGeometry(0.8), GridSpec::quadrant(0.1, SymmetryClass::EE));
  CHECK_THROWS_AS(quad.reflected(0, Axis::X), NotReflectionClosedError);
}

TEST_CASE("quadrant count is a quarter of the full count") {
  for (double a : {0.0, 0.4, 1.7}) {
    for (double h : {0.2, 1.0 / 16, 1.0 / 64}) {
      const std::size_t full = build_grid(StadiumGeometry(a), GridSpec::full(h)).size();
      for (SymmetryClass cls : kDefiniteClasses) {
        CHECK(4 * build_grid(StadiumGeometry(a), GridSpec::quadrant(h, cls)).size() == full);
      }
    }
  }
}

TEST_CASE("symmetry class names") {
  CHECK(parse_symmetry_class("ee") == SymmetryClass::EE);
  CHECK(parse_symmetry_class("Oe") == SymmetryClass::OE);
  CHECK_FALSE(parse_symmetry_class("EX").has_value());
  CHECK(to_string(SymmetryClass::EO) == "EO");
  CHECK(parity(SymmetryClass::EO, Axis::X) == Parity::Even);
  CHECK(parity(SymmetryClass::EO, Axis::Y) == Parity::Odd);
  CHECK(make_class(Parity::Odd, Parity::Even) == SymmetryClass::OE);
}
