#include <algorithm>
#include <map>

#include "test_support.hpp"

#include "massfit/sweep.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

SweepParams params;

std::vector<SweepEdge> box_sweeps(const TriMesh& mesh, double gamma,
                                  const std::vector<Polygon2>& gis = {}) {
  auto contours = extract_contours(mesh, params.slice_interval);
  contours = align_to_gis(contours, gis, params.theta_snap, params.dist_snap);
  auto clusters = cluster_contours(contours, params.theta_tol, params.dist_tol,
                                   params.slice_interval);
  return sweep_edges_from_clusters(clusters, gamma, gis, params.gis_clip_margin);
}

}  // namespace

TEST_CASE("extract_contours on a box") {
  TriMesh box = make_box(0, 0, 0, 10, 6, 3);
  auto contours = extract_contours(box, 0.2);
  std::map<double, double> length_per_level;
  for (const auto& c : contours) length_per_level[c.level] += c.length;
  CHECK(length_per_level.size() == 14);  // 0.2 .. 2.8
  CHECK(length_per_level.begin()->first == doctest::Approx(0.2));
  CHECK(length_per_level.rbegin()->first == doctest::Approx(2.8));
  for (const auto& [level, len] : length_per_level) {
    CHECK(len == doctest::Approx(32.0).epsilon(1e-9));
  }
}

TEST_CASE("extract_contours of flat ground is empty") {
  TriMesh ground;
  ground.vertices = {{0, 0, 0}, {50, 0, 0}, {50, 50, 0}, {0, 50, 0}};
  ground.triangles = {{0, 1, 2}, {0, 2, 3}};
  ground.build();
  CHECK(extract_contours(ground, 0.2).empty());
}

TEST_CASE("gable prism levels shrink above the eaves") {
  TriMesh g = make_gable(10, 8, 2, 3);
  auto contours = extract_contours(g, 0.2);
  std::map<double, double> per_level;
  for (const auto& c : contours) per_level[c.level] += c.length;
  CHECK(per_level.at(1.0) == doctest::Approx(36.0).epsilon(1e-9));
  CHECK(per_level.at(2.6) < per_level.at(1.0));
}

TEST_CASE("align_to_gis snaps close directions only") {
  std::vector<Polygon2> gis = {Polygon2::rect(0, 0, 10, 6)};
  SliceContour near_contour;
  double one_deg = kPi / 180.0;
  Vec2 mid{5.0, 0.3};
  Vec2 d{std::cos(one_deg), std::sin(one_deg)};
  near_contour.segment = {mid - d * 2.0, mid + d * 2.0};
  near_contour.level = 0.2;
  near_contour.length = 4.0;

  SliceContour far_contour = near_contour;
  Vec2 d45{std::cos(kPi / 4), std::sin(kPi / 4)};
  far_contour.segment = {mid - d45 * 2.0, mid + d45 * 2.0};

  auto out = align_to_gis({near_contour, far_contour}, gis, 10 * kPi / 180.0, 1.0);
  CHECK(canonical_angle(out[0].segment.b - out[0].segment.a) == doctest::Approx(0.0));
  CHECK(canonical_angle(out[1].segment.b - out[1].segment.a) == doctest::Approx(kPi / 4));

  auto unchanged = align_to_gis({near_contour}, {}, 10 * kPi / 180.0, 1.0);
  CHECK(canonical_angle(unchanged[0].segment.b - unchanged[0].segment.a) ==
        doctest::Approx(one_deg));
}

TEST_CASE("cluster_contours groups one wall into one cluster") {
  std::vector<SliceContour> contours;
  for (int i = 1; i <= 14; ++i) {
    SliceContour c;
    c.segment = {{0, 0}, {8, 0}};
    c.level = 0.2 * i;
    c.length = 8.0;
    contours.push_back(c);
  }
  auto clusters = cluster_contours(contours, params.theta_tol, params.dist_tol, 0.2);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].supported_area == doctest::Approx(8.0 * 14 * 0.2));
  CHECK(clusters[0].members.size() == 14);
}

TEST_CASE("perpendicular and parallel-but-distant walls stay separate") {
  SliceContour wall_a;
  wall_a.segment = {{0, 0}, {8, 0}};
  wall_a.level = 0.2;
  wall_a.length = 8.0;
  SliceContour wall_b = wall_a;
  wall_b.segment = {{0, 0}, {0, 8}};
  auto clusters = cluster_contours({wall_a, wall_b}, params.theta_tol, params.dist_tol, 0.2);
  CHECK(clusters.size() == 2);

  SliceContour wall_c = wall_a;
  wall_c.segment = {{0, 6}, {8, 6}};  // parallel, 6 m away
  clusters = cluster_contours({wall_a, wall_c}, params.theta_tol, 0.5, 0.2);
  CHECK(clusters.size() == 2);
}

TEST_CASE("gamma filters clusters by supported area") {
  DirectionCluster weak;
  weak.direction = 0.0;
  weak.offset = 0.0;
  weak.supported_area = 8.4;
  SliceContour m;
  m.segment = {{0, 0}, {2, 0}};
  m.length = 2.0;
  weak.members = {m};
  weak.id = 0;
  CHECK(sweep_edges_from_clusters({weak}, 10.0).empty());
  CHECK(sweep_edges_from_clusters({weak}, 0.0).size() == 1);
}

TEST_CASE("box mesh yields four wall sweep edges") {
  TriMesh box = make_box(0, 0, 0, 10, 6, 3);
  std::vector<Polygon2> gis = {Polygon2::rect(0, 0, 10, 6)};
  auto sweeps = box_sweeps(box, 10.0, gis);
  REQUIRE(sweeps.size() == 4);
  // Each true wall line has a sweep within 0.3 m of it.
  std::vector<Segment2> walls = {{{0, 0}, {10, 0}}, {{10, 0}, {10, 6}},
                                 {{10, 6}, {0, 6}}, {{0, 6}, {0, 0}}};
  for (const auto& w : walls) {
    bool found = false;
    for (const auto& s : sweeps) {
      double d = point_segment_distance(w.midpoint(), s.segment.a, s.segment.b);
      // Clean input snapped to GIS: directions match exactly (mod fp noise).
      if (d < 0.3 &&
          angle_diff_mod_pi(canonical_angle(w.b - w.a),
                            canonical_angle(s.segment.b - s.segment.a)) < 1e-9) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("gamma monotonicity: higher threshold keeps a subset") {
  TriMesh box = make_box(0, 0, 0, 10, 6, 3);
  auto low = box_sweeps(box, 10.0);   // all four walls (areas 28 and 16.8)
  auto high = box_sweeps(box, 20.0);  // only the two long walls
  CHECK(low.size() == 4);
  CHECK(high.size() == 2);
  for (const auto& h : high) {
    bool contained = false;
    for (const auto& l : low) {
      if (near(h.segment.a, l.segment.a, 1e-9) && near(h.segment.b, l.segment.b, 1e-9)) {
        contained = true;
      }
    }
    CHECK(contained);
  }
}

TEST_CASE("clustering is independent of triangle order") {
  TriMesh box = make_box(0, 0, 0, 10, 6, 3);
  TriMesh permuted = box;
  std::rotate(permuted.triangles.begin(), permuted.triangles.begin() + 5,
              permuted.triangles.end());
  auto a = box_sweeps(box, 10.0);
  auto b = box_sweeps(permuted, 10.0);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(near(a[i].segment.a, b[i].segment.a, 1e-9));
    CHECK(near(a[i].segment.b, b[i].segment.b, 1e-9));
  }
}
