#include "test_support.hpp"

#include "massfit/arrangement.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

SweepEdge sweep(Vec2 a, Vec2 b) {
  SweepEdge s;
  s.segment = {a, b};
  s.supported_area = 100.0;
  return s;
}

Polygon2 box_poly(double x0, double y0, double x1, double y1) {
  return Polygon2::rect(x0, y0, x1, y1);
}

}  // namespace

TEST_CASE("two crossing sweeps quarter the box") {
  auto arr = fracture_plane({sweep({-5, 0}, {5, 0}), sweep({0, -5}, {0, 5})},
                            box_poly(-5, -5, 5, 5));
  CHECK(arr.polygons.size() == 4);
  CHECK(arr.cell_area_sum() == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("single sweep halves the box, shared edge is sweep") {
  auto arr = fracture_plane({sweep({-5, 0}, {5, 0})}, box_poly(-5, -5, 5, 5));
  CHECK(arr.polygons.size() == 2);
  bool found = false;
  for (const auto& e : arr.edges) {
    if (e.left != kOutside && e.right != kOutside) {
      CHECK(e.is_sweep);
      CHECK(e.in_sweep_extent);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("four sweeps tracing a rectangle give a 3x3 grid") {
  std::vector<SweepEdge> sweeps = {
      sweep({0, 0}, {10, 0}), sweep({10, 0}, {10, 6}),
      sweep({10, 6}, {0, 6}), sweep({0, 6}, {0, 0})};
  auto arr = fracture_plane(sweeps, box_poly(-5, -5, 15, 11));
  CHECK(arr.polygons.size() == 9);
  CHECK(arr.cell_area_sum() == doctest::Approx(20.0 * 16.0).epsilon(1e-6));

  // Sweep extents covered by flagged fragments.
  for (size_t si = 0; si < sweeps.size(); ++si) {
    double covered = 0.0;
    for (const auto& e : arr.edges) {
      if (e.sweep_origin == (int)si) covered += e.length;
    }
    CHECK(covered == doctest::Approx(sweeps[si].segment.length()).epsilon(1e-6));
  }
  for (const auto& e : arr.edges) CHECK(e.length > 1e-6);
}

TEST_CASE("zero sweeps yield the bbox as one polygon") {
  auto arr = fracture_plane({}, box_poly(0, 0, 4, 3));
  REQUIRE(arr.polygons.size() == 1);
  CHECK(arr.polygons[0].area == doctest::Approx(12.0));
}

TEST_CASE("fracture is deterministic") {
  std::vector<SweepEdge> sweeps = {
      sweep({0, 0}, {10, 0}), sweep({10, 0}, {10, 6}),
      sweep({10, 6}, {0, 6}), sweep({0, 6}, {0, 0})};
  auto a = fracture_plane(sweeps, box_poly(-5, -5, 15, 11));
  auto b = fracture_plane(sweeps, box_poly(-5, -5, 15, 11));
  REQUIRE(a.polygons.size() == b.polygons.size());
  for (size_t i = 0; i < a.polygons.size(); ++i) {
    CHECK(a.polygons[i].id == b.polygons[i].id);
    CHECK(a.polygons[i].area == doctest::Approx(b.polygons[i].area));
    CHECK(near(a.polygons[i].poly.centroid(), b.polygons[i].poly.centroid(), 1e-12));
  }
}

TEST_CASE("near-duplicate sweep lines are merged before insertion") {
  auto arr = fracture_plane({sweep({-5, 0}, {5, 0}), sweep({-5, 0.02}, {5, 0.02})},
                            box_poly(-5, -5, 5, 5));
  CHECK(arr.polygons.size() == 2);  // one line, not two
}

TEST_CASE("continuation flag follows the config switch") {
  // Sweep extent covers only x in [0,10]; the line continues across the box.
  FractureParams strict;
  strict.continuations_count_as_sweep = false;
  auto arr = fracture_plane({sweep({0, 0}, {10, 0}), sweep({0, -8}, {0, 8})},
                            box_poly(-20, -8, 20, 8), strict);
  bool saw_extent = false, saw_continuation = false;
  for (const auto& e : arr.edges) {
    // Fragments of the horizontal sweep line (y = 0).
    if (e.line_id < 0 || std::abs(e.segment.midpoint().y) > 1e-9) continue;
    if (e.in_sweep_extent) {
      CHECK(e.is_sweep);
      saw_extent = true;
    } else {
      CHECK(!e.is_sweep);
      saw_continuation = true;
    }
  }
  CHECK(saw_extent);
  CHECK(saw_continuation);

  auto paper = fracture_plane({sweep({0, 0}, {10, 0}), sweep({0, -8}, {0, 8})},
                              box_poly(-20, -8, 20, 8));
  for (const auto& e : paper.edges) {
    if (e.line_id >= 0) CHECK(e.is_sweep);
  }
}

TEST_CASE("classify keeps the GIS cell") {
  std::vector<SweepEdge> sweeps = {
      sweep({0, 0}, {10, 0}), sweep({10, 0}, {10, 6}),
      sweep({10, 6}, {0, 6}), sweep({0, 6}, {0, 0})};
  auto arr = fracture_plane(sweeps, box_poly(-5, -5, 15, 11));
  TriMesh empty;
  ClassifyParams cp;
  cp.gis_dilation = 0.5;
  cp.h_min = 100.0;
  classify_polygons(arr, {box_poly(0, 0, 10, 6)}, empty, cp);
  CHECK(arr.kept_count() == 1);
  const ArrPolygon* kept = nullptr;
  for (const auto& p : arr.polygons) {
    if (p.kept) kept = &p;
  }
  REQUIRE(kept != nullptr);
  CHECK(kept->poly.contains({5, 3}));
  // Adjacency of removed polygons became OUTSIDE.
  for (const auto& e : arr.edges) {
    CHECK((e.left == kOutside || arr.polygons[e.left].kept));
    CHECK((e.right == kOutside || arr.polygons[e.right].kept));
  }
}

TEST_CASE("classify keeps everything when GIS covers the box") {
  auto arr = fracture_plane({sweep({-5, 0}, {5, 0})}, box_poly(-5, -5, 5, 5));
  TriMesh empty;
  classify_polygons(arr, {box_poly(-10, -10, 10, 10)}, empty, {});
  CHECK(arr.kept_count() == 2);
}

TEST_CASE("classify keeps tall-mesh cells without GIS") {
  auto arr = fracture_plane({sweep({0, -5}, {0, 5})}, box_poly(-5, -5, 5, 5));
  // Flat mesh at z=3 covering the left half only.
  TriMesh left;
  left.vertices = {{-5, -5, 3}, {0, -5, 3}, {0, 5, 3}, {-5, 5, 3}};
  left.triangles = {{0, 1, 2}, {0, 2, 3}};
  left.build();
  ClassifyParams cp;
  cp.h_min = 1.0;
  classify_polygons(arr, {}, left, cp);
  CHECK(arr.kept_count() == 1);
  for (const auto& p : arr.polygons) {
    if (p.kept) CHECK(p.poly.centroid().x < 0.0);
  }
}

TEST_CASE("classify throws when nothing is inside") {
  auto arr = fracture_plane({sweep({-5, 0}, {5, 0})}, box_poly(-5, -5, 5, 5));
  TriMesh empty;
  ClassifyParams cp;
  cp.gis_dilation = 0.1;
  CHECK_THROWS_AS(classify_polygons(arr, {box_poly(100, 100, 101, 101)}, empty, cp), Error);
}

TEST_CASE("height differences across a wall") {
  // Box roof at 6 m with walls at x=0/4, y=0/4; fracture so the wall edge
  // fragment matches the wall extent.
  TriMesh box = make_box(0, 0, 0, 4, 4, 6);
  std::vector<SweepEdge> sweeps = {
      sweep({0, 0}, {4, 0}), sweep({4, 0}, {4, 4}),
      sweep({4, 4}, {0, 4}), sweep({0, 4}, {0, 0})};
  auto arr = fracture_plane(sweeps, box_poly(-4, -4, 8, 8));
  classify_polygons(arr, {box_poly(0, 0, 4, 4)}, box, {});
  compute_height_diffs(arr, box);
  bool checked_wall = false, checked_roof_interior = false;
  for (const auto& e : arr.edges) {
    Vec2 mid = e.segment.midpoint();
    if (e.line_id >= 0 && std::abs(mid.x - 4.0) < 1e-9 && mid.y > 0.1 && mid.y < 3.9) {
      CHECK(e.height_diff == doctest::Approx(6.0).epsilon(1e-6));
      checked_wall = true;
    }
    if (e.left == kOutside && e.right == kOutside) {
      CHECK(e.height_diff == 0.0);
    }
  }
  CHECK(checked_wall);

  // An edge strictly inside one flat roof has no height difference: fracture
  // with an extra line through the middle of the box.
  auto arr2 = fracture_plane({sweep({0, 2}, {4, 2}), sweep({0, 0}, {4, 0}),
                              sweep({4, 0}, {4, 4}), sweep({4, 4}, {0, 4}),
                              sweep({0, 4}, {0, 0})},
                             box_poly(-4, -4, 8, 8));
  classify_polygons(arr2, {box_poly(0, 0, 4, 4)}, box, {});
  compute_height_diffs(arr2, box);
  for (const auto& e : arr2.edges) {
    Vec2 mid = e.segment.midpoint();
    if (std::abs(mid.y - 2.0) < 1e-9 && mid.x > 0.5 && mid.x < 3.5) {
      CHECK(e.height_diff == doctest::Approx(0.0).epsilon(1e-9));
      checked_roof_interior = true;
    }
  }
  CHECK(checked_roof_interior);
}
