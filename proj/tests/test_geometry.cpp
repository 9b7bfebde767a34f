#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oddson/geometry.hpp"

using namespace oddson;

TEST_CASE("orientation basic cases") {
  CHECK(orientation(pt(0, 0), pt(1, 0), pt(0, 1)) == Orient::Left);
  CHECK(orientation(pt(0, 0), pt(1, 1), pt(2, 2)) == Orient::Collinear);
  CHECK(orientation(pt(0, 0), pt(0, 1), pt(1, 1)) == Orient::Right);
}

TEST_CASE("segment intersection basic cases") {
  CHECK(segments_intersect(pt(0, 0), pt(2, 2), pt(0, 2), pt(2, 0), SegMode::Strict));
  CHECK_FALSE(
      segments_intersect(pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 1), SegMode::Strict));
  // Shared endpoint: every predicate is non-strict, so the strict test fails
  // but the closed test reports a touch.
  CHECK_FALSE(
      segments_intersect(pt(0, 0), pt(1, 1), pt(1, 1), pt(2, 0), SegMode::Strict));
  CHECK(segments_intersect(pt(0, 0), pt(1, 1), pt(1, 1), pt(2, 0), SegMode::Closed));
}

TEST_CASE("strict mode rejects degenerate segments") {
  CHECK_THROWS_AS(
      segments_intersect(pt(1, 1), pt(1, 1), pt(0, 0), pt(2, 2), SegMode::Strict),
      std::invalid_argument);
  CHECK_NOTHROW(
      segments_intersect(pt(1, 1), pt(1, 1), pt(0, 0), pt(2, 2), SegMode::Closed));
}

namespace {

// Independent evaluation of the left/right-conjunction formula for a proper
// crossing of u-w and x-y.
bool strict_formula(const Point& u, const Point& w, const Point& x, const Point& y) {
  auto left = [](const Point& a, const Point& b, const Point& c) {
    return orientation(a, b, c) == Orient::Left;
  };
  auto right = [](const Point& a, const Point& b, const Point& c) {
    return orientation(a, b, c) == Orient::Right;
  };
  const bool all_left = left(u, w, y) && left(x, y, u) && left(w, u, x) && left(y, x, w);
  const bool all_right =
      right(u, w, y) && right(x, y, u) && right(w, u, x) && right(y, x, w);
  return all_left || all_right;
}

}  // namespace

TEST_CASE("strict intersection equals the conjunction formula on random input") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> uni(-10, 10);
  for (int i = 0; i < 10000; ++i) {
    const Point u = pt(uni(rng), uni(rng)), w = pt(uni(rng), uni(rng));
    const Point x = pt(uni(rng), uni(rng)), y = pt(uni(rng), uni(rng));
    CHECK(segments_intersect(u, w, x, y, SegMode::Strict) == strict_formula(u, w, x, y));
  }
}

TEST_CASE("clip of the unit square") {
  const ConvexRegion square = ConvexRegion::box(0, 0, 1, 1);

  SUBCASE("x <= 0.5 keeps the left half") {
    const ConvexRegion half = square.clipped(HalfPlane(1, 0, 0.5));
    CHECK_FALSE(half.empty());
    REQUIRE(half.vertices().size() == 4);
    for (const Point& want :
         {pt(0, 0), pt(0.5, 0), pt(0.5, 1), pt(0, 1)}) {
      bool found = false;
      for (const Point& v : half.vertices())
        found = found || (std::abs(v[0] - want[0]) < 1e-9 &&
                          std::abs(v[1] - want[1]) < 1e-9);
      CHECK(found);
    }
    CHECK(half.area() == doctest::Approx(0.5));
  }
  SUBCASE("x <= -1 empties the region") {
    CHECK(square.clipped(HalfPlane(1, 0, -1)).empty());
  }
  SUBCASE("x <= 2 is redundant") {
    const ConvexRegion same = square.clipped(HalfPlane(1, 0, 2));
    CHECK_FALSE(same.empty());
    CHECK(same.area() == doctest::Approx(1.0));
  }
}

TEST_CASE("containment is closed") {
  const ConvexRegion square = ConvexRegion::box(0, 0, 1, 1);
  CHECK(square.contains(pt(0.5, 0.5)));
  CHECK(square.contains(pt(1, 1)));
  CHECK_FALSE(square.contains(pt(1.0000001, 0)));
}

TEST_CASE("clip then contains agrees with contains AND halfplane") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    const ConvexRegion region =
        ConvexRegion::box(uni(rng) - 5, uni(rng) - 5, uni(rng) + 5, uni(rng) + 5);
    double nx = uni(rng), ny = uni(rng);
    if (std::abs(nx) + std::abs(ny) < 1e-9) nx = 1;
    const HalfPlane h(nx, ny, uni(rng));
    const Point p = pt(uni(rng), uni(rng));
    // Skip points within tolerance of the cut so the closed test is unambiguous.
    if (std::abs(h.eval(p)) < 1e-6) continue;
    CHECK(region.clipped(h).contains(p) == (region.contains(p) && h.contains(p)));
  }
}

TEST_CASE("triangulation") {
  SUBCASE("triangle maps to itself") {
    const ConvexRegion tri =
        ConvexRegion::from_ccw_vertices({pt(0, 0), pt(2, 0), pt(0, 2)});
    CHECK(tri.triangulate().size() == 1);
  }
  SUBCASE("square fans into two triangles from the smallest vertex") {
    const ConvexRegion square = ConvexRegion::box(0, 0, 1, 1);
    const auto tris = square.triangulate();
    REQUIRE(tris.size() == 2);
    for (const auto& t : tris) {
      CHECK(t[0][0] == doctest::Approx(0.0));
      CHECK(t[0][1] == doctest::Approx(0.0));
    }
  }
  SUBCASE("hexagon area is conserved") {
    std::vector<Point> hex;
    for (int k = 0; k < 6; ++k)
      hex.push_back(pt(std::cos(k * M_PI / 3), std::sin(k * M_PI / 3)));
    const ConvexRegion region = ConvexRegion::from_ccw_vertices(hex);
    const auto tris = region.triangulate();
    CHECK(tris.size() == 4);
    double total = 0;
    for (const auto& t : tris) total += triangle_area(t[0], t[1], t[2]);
    CHECK(total == doctest::Approx(region.area()).epsilon(1e-9));
  }
  SUBCASE("unbounded region throws") {
    const ConvexRegion slab({HalfPlane(1, 0, 1)});
    CHECK_THROWS_AS(slab.triangulate(), std::invalid_argument);
  }
}

TEST_CASE("triangulation covers sampled interior points exactly once") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-3, 3);
  for (int rep = 0; rep < 50; ++rep) {
    ConvexRegion region = ConvexRegion::box(-4, -4, 4, 4);
    for (int c = 0; c < 4; ++c) {
      double nx = uni(rng), ny = uni(rng);
      if (std::abs(nx) + std::abs(ny) < 1e-9) nx = 1;
      region = region.clipped(HalfPlane(nx, ny, std::abs(uni(rng)) + 1));
    }
    if (region.empty() || region.vertices().size() < 3 || region.area() < 1e-6)
      continue;
    const auto tris = region.triangulate();
    for (int s = 0; s < 100; ++s) {
      const Point p = sample_point(region, rng);
      int hits = 0;
      bool on_edge = false;
      for (const auto& t : tris) {
        const auto o1 = orientation(t[0], t[1], p);
        const auto o2 = orientation(t[1], t[2], p);
        const auto o3 = orientation(t[2], t[0], p);
        if (o1 == Orient::Left && o2 == Orient::Left && o3 == Orient::Left) ++hits;
        if (o1 == Orient::Collinear || o2 == Orient::Collinear ||
            o3 == Orient::Collinear)
          on_edge = true;
      }
      CHECK((hits == 1 || on_edge));
    }
  }
}

TEST_CASE("box region behaves as a closed box") {
  const BoxRegion box = BoxRegion::cube(4, 10);
  CHECK(box.contains({0, 0, 0, 0}));
  CHECK(box.contains({10, -10, 10, -10}));
  CHECK_FALSE(box.contains({10.1, 0, 0, 0}));
  const BoxRegion half = BoxRegion::half(4, 2, true, 3);  // {p[2] >= 3}
  const BoxRegion cut = box.intersect(half);
  CHECK(cut.lo()[2] == doctest::Approx(3));
  CHECK(cut.hi()[0] == doctest::Approx(10));
  CHECK_FALSE(cut.empty());
  CHECK(BoxRegion({1, 1}, {0, 2}).empty());
}

TEST_CASE("double round-trip through decimal strings is exact") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(-1e9, 1e9);
  for (int i = 0; i < 1000; ++i) {
    const double v = uni(rng);
    CHECK(parse_double(fmt_double(v)) == v);
  }
  CHECK(parse_double(fmt_double(0.1)) == 0.1);
  CHECK(parse_double(fmt_double(-kWorkingBoxHalf)) == -kWorkingBoxHalf);
}
