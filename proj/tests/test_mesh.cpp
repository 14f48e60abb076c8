#include <map>
#include <random>

#include "test_support.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

double total_length(const std::vector<Segment2>& segs) {
  double s = 0.0;
  for (const auto& seg : segs) s += seg.length();
  return s;
}

// Every endpoint shared by exactly two segments (closed loops).
bool forms_closed_loops(const std::vector<Segment2>& segs, double tol) {
  std::vector<Vec2> pts;
  std::vector<int> count;
  auto bump = [&](const Vec2& p) {
    for (size_t i = 0; i < pts.size(); ++i) {
      if (near(pts[i], p, tol)) {
        ++count[i];
        return;
      }
    }
    pts.push_back(p);
    count.push_back(1);
  };
  for (const auto& s : segs) {
    bump(s.a);
    bump(s.b);
  }
  for (int c : count) {
    if (c != 2) return false;
  }
  return true;
}

// Independent oracle: vertical ray cast per triangle (Moller-Trumbore).
std::optional<double> raycast_height(const TriMesh& mesh, const Vec2& p) {
  std::optional<double> best;
  Vec3 orig{p.x, p.y, 50.0};  // near the mesh so z = orig.z - t stays precise
  Vec3 dir{0, 0, -1};
  for (const auto& t : mesh.triangles) {
    Vec3 v0 = mesh.vertices[t[0]], v1 = mesh.vertices[t[1]], v2 = mesh.vertices[t[2]];
    Vec3 e1 = v1 - v0, e2 = v2 - v0;
    Vec3 h = cross(dir, e2);
    double a = dot(e1, h);
    if (std::abs(a) < 1e-12) continue;
    Vec3 s = orig - v0;
    double u = dot(s, h) / a;
    if (u < -1e-9 || u > 1 + 1e-9) continue;
    Vec3 q = cross(s, e1);
    double v = dot(dir, q) / a;
    if (v < -1e-9 || u + v > 1 + 1e-9) continue;
    double tt = dot(e2, q) / a;
    double z = orig.z - tt;
    if (!best || z > *best) best = z;
  }
  return best;
}

}  // namespace

TEST_CASE("build cleans degenerate triangles and welds") {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1e-9, 1e-9, 0}, {0.5, 0.5, 0}};
  m.triangles = {{0, 1, 2}, {0, 1, 3}, {0, 1, 1}};  // degenerate area, repeated index
  m.build();
  CHECK(m.triangles.size() == 1);
  CHECK(m.vertices.size() < 5);  // near-duplicate welded
}

TEST_CASE("horizontal slice of unit cube") {
  TriMesh cube = make_box(0, 0, 0, 1, 1, 1);
  auto segs = slice_mesh_horizontal(cube, 0.5);
  CHECK(total_length(segs) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(forms_closed_loops(segs, 1e-6));

  CHECK(slice_mesh_horizontal(cube, 2.0).empty());
  CHECK(slice_mesh_horizontal(cube, -1.0).empty());
}

TEST_CASE("horizontal slice of single triangle") {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}};
  m.triangles = {{0, 1, 2}};
  m.build();
  auto segs = slice_mesh_horizontal(m, 0.5);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].length() == doctest::Approx(0.5));
  double min_x = std::min(segs[0].a.x, segs[0].b.x);
  double max_x = std::max(segs[0].a.x, segs[0].b.x);
  CHECK(min_x == doctest::Approx(0.0));
  CHECK(max_x == doctest::Approx(0.5));
}

TEST_CASE("touching contacts are dropped") {
  TriMesh cube = make_box(0, 0, 0, 1, 1, 1);
  // Slicing exactly at the top touches the top facets edge-on.
  auto segs = slice_mesh_horizontal(cube, 1.0);
  CHECK(segs.empty());
}

TEST_CASE("vertical slice of unit cube is a square outline") {
  TriMesh cube = make_box(0, 0, 0, 1, 1, 1);
  auto segs = slice_mesh_vertical(cube, {0.5, 0.0}, {0, 1});
  CHECK(total_length(segs) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(forms_closed_loops(segs, 1e-6));
  BBox2 box;
  for (const auto& s : segs) {
    box.expand(s.a);
    box.expand(s.b);
  }
  CHECK(box.min.x == doctest::Approx(0.0));
  CHECK(box.max.x == doctest::Approx(1.0));
  CHECK(box.min.y == doctest::Approx(0.0));
  CHECK(box.max.y == doctest::Approx(1.0));

  CHECK(slice_mesh_vertical(cube, {0.5, 5.0}, {1, 0}).empty());
}

TEST_CASE("vertical slice across a gable ridge") {
  TriMesh g = make_gable(4, 2, 1, 2);
  auto segs = slice_mesh_vertical(g, {2.0, 0.0}, {0, 1});
  double max_h = 0, eave_h = 0;
  for (const auto& s : segs) {
    max_h = std::max({max_h, s.a.y, s.b.y});
  }
  CHECK(max_h == doctest::Approx(2.0));
  // apex at mid width
  for (const auto& s : segs) {
    if (approx(s.a.y, 2.0, 1e-9)) CHECK(s.a.x == doctest::Approx(1.0));
    if (approx(s.b.y, 2.0, 1e-9)) CHECK(s.b.x == doctest::Approx(1.0));
    eave_h = std::max({eave_h, approx(s.a.x, 0.0, 1e-9) ? s.a.y : 0.0});
  }
  CHECK(eave_h == doctest::Approx(1.0));
}

TEST_CASE("height field query") {
  TriMesh cube = make_box(0, 0, 0, 1, 1, 1);
  auto h = height_field_query(cube, {0.5, 0.5});
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(1.0));
  CHECK(!height_field_query(cube, {5, 5}).has_value());

  TriMesh slant;
  slant.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 1}};
  slant.triangles = {{0, 1, 2}};
  slant.build();
  auto hs = height_field_query(slant, {0.25, 0.5});
  REQUIRE(hs.has_value());
  CHECK(*hs == doctest::Approx(0.5));
}

TEST_CASE("height field agrees with ray casting oracle") {
  TriMesh g = make_gable(6, 4, 2, 3.5);
  HeightField hf(g);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dx(-1.0, 7.0), dy(-1.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    Vec2 p{dx(rng), dy(rng)};
    auto a = height_field_query(g, p);
    auto b = raycast_height(g, p);
    auto c = hf.query(p);
    REQUIRE(a.has_value() == b.has_value());
    REQUIRE(a.has_value() == c.has_value());
    if (a) {
      CHECK(*a == doctest::Approx(*b).epsilon(1e-12));
      CHECK(*a == doctest::Approx(*c).epsilon(1e-12));
    }
  }
}

TEST_CASE("slice length is continuous in z away from horizontal faces") {
  TriMesh cube = make_box(0, 0, 0, 2, 3, 1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dz(0.05, 0.95);
  for (int i = 0; i < 10; ++i) {
    double z = dz(rng);
    double l0 = total_length(slice_mesh_horizontal(cube, z));
    double l1 = total_length(slice_mesh_horizontal(cube, z + 1e-9));
    CHECK(std::abs(l0 - l1) < 1e-6);
  }
}

TEST_CASE("manifold checks") {
  TriMesh cube = make_box(0, 0, 0, 1, 1, 1);
  CHECK(is_closed_manifold(cube));
  CHECK(euler_characteristic(cube) == 2);
  CHECK(signed_volume(cube) == doctest::Approx(1.0));

  TriMesh gable = make_gable(4, 2, 1, 2);
  CHECK(is_closed_manifold(gable));
  CHECK(euler_characteristic(gable) == 2);

  TriMesh open = cube;
  open.triangles.pop_back();
  CHECK(!is_closed_manifold(open));
}
