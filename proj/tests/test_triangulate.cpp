#include <doctest.h>

#include "massfit/triangulate.hpp"

using namespace massfit;

namespace {

double tri_area(const std::vector<Vec2>& pts, const std::array<int, 3>& t) {
  return 0.5 * cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]);
}

double total_area(const std::vector<std::vector<Vec2>>& rings,
                  const std::vector<std::array<int, 3>>& tris) {
  std::vector<Vec2> pts;
  for (const auto& r : rings) pts.insert(pts.end(), r.begin(), r.end());
  double a = 0.0;
  for (const auto& t : tris) a += tri_area(pts, t);
  return a;
}

}  // namespace

TEST_CASE("triangulate convex") {
  std::vector<std::vector<Vec2>> rings = {{{0, 0}, {2, 0}, {2, 1}, {0, 1}}};
  auto tris = triangulate_polygon(rings);
  CHECK(tris.size() == 2);
  CHECK(total_area(rings, tris) == doctest::Approx(2.0));
  for (const auto& t : tris) {
    std::vector<Vec2> pts = rings[0];
    CHECK(tri_area(pts, t) > 0.0);  // CCW output
  }
}

TEST_CASE("triangulate L shape") {
  std::vector<std::vector<Vec2>> rings = {
      {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
  auto tris = triangulate_polygon(rings);
  CHECK(total_area(rings, tris) == doctest::Approx(3.0));
}

TEST_CASE("triangulate with hole") {
  std::vector<std::vector<Vec2>> rings = {
      {{0, 0}, {4, 0}, {4, 4}, {0, 4}},
      {{1, 1}, {1, 3}, {3, 3}, {3, 1}},  // CW hole
  };
  auto tris = triangulate_polygon(rings);
  CHECK(total_area(rings, tris) == doctest::Approx(12.0));
}

TEST_CASE("triangulate with two holes") {
  std::vector<std::vector<Vec2>> rings = {
      {{0, 0}, {8, 0}, {8, 4}, {0, 4}},
      {{1, 1}, {1, 2}, {2, 2}, {2, 1}},
      {{5, 1}, {5, 3}, {7, 3}, {7, 1}},
  };
  auto tris = triangulate_polygon(rings);
  CHECK(total_area(rings, tris) == doctest::Approx(32.0 - 1.0 - 4.0));
}

TEST_CASE("collinear boundary vertices are preserved") {
  // Extra vertex in the middle of the top edge must stay a triangulation
  // vertex (no T-vertices for mesh neighbours).
  std::vector<std::vector<Vec2>> rings = {{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}}};
  auto tris = triangulate_polygon(rings);
  CHECK(total_area(rings, tris) == doctest::Approx(2.0));
  bool uses_mid = false;
  for (const auto& t : tris) {
    for (int c : t) uses_mid |= c == 3;
  }
  CHECK(uses_mid);
  for (const auto& t : tris) {
    std::vector<Vec2> pts = rings[0];
    CHECK(tri_area(pts, t) > 1e-12);
  }
}

TEST_CASE("degenerate input throws") {
  std::vector<std::vector<Vec2>> rings = {{{0, 0}, {1, 0}}};
  CHECK_THROWS_AS(triangulate_polygon(rings), Error);
}
