#include "test_support.hpp"

#include "massfit/io.hpp"
#include "massfit/synth.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

SceneSpec box_scene(double sigma, double dropout) {
  SceneSpec spec;
  BuildingSpec b;
  b.footprint = Polygon2::rect(0, 0, 10, 6);
  b.wall_height = 3.0;
  b.roof = RoofType::kFlat;
  spec.buildings.push_back(b);
  spec.sigma = sigma;
  spec.dropout = dropout;
  return spec;
}

}  // namespace

TEST_CASE("noise-free box scene is exactly 3 m tall") {
  SceneTruth t = synth_generate(box_scene(0.0, 0.0), 1);
  CHECK(t.noisy_mesh.max_z() == doctest::Approx(3.0));
  CHECK(t.clean_mesh.max_z() == doctest::Approx(3.0));
  CHECK(is_closed_manifold(t.clean_mesh));
  REQUIRE(t.gis.size() == 1);
  CHECK(t.gis[0].area() == doctest::Approx(60.0));
  // Resampled to roughly the target edge length.
  CHECK(t.noisy_mesh.triangles.size() > 1000);
}

TEST_CASE("same seed reproduces the mesh bit for bit") {
  SceneTruth a = synth_generate(box_scene(0.05, 0.1), 42);
  SceneTruth b = synth_generate(box_scene(0.05, 0.1), 42);
  REQUIRE(a.noisy_mesh.vertices.size() == b.noisy_mesh.vertices.size());
  REQUIRE(a.noisy_mesh.triangles.size() == b.noisy_mesh.triangles.size());
  for (size_t i = 0; i < a.noisy_mesh.vertices.size(); ++i) {
    CHECK(a.noisy_mesh.vertices[i].x == b.noisy_mesh.vertices[i].x);
    CHECK(a.noisy_mesh.vertices[i].y == b.noisy_mesh.vertices[i].y);
    CHECK(a.noisy_mesh.vertices[i].z == b.noisy_mesh.vertices[i].z);
  }
  SceneTruth c = synth_generate(box_scene(0.05, 0.1), 43);
  bool differs = c.noisy_mesh.vertices.size() != a.noisy_mesh.vertices.size();
  if (!differs) {
    for (size_t i = 0; i < a.noisy_mesh.vertices.size() && !differs; ++i) {
      differs = a.noisy_mesh.vertices[i].z != c.noisy_mesh.vertices[i].z;
    }
  }
  CHECK(differs);
}

TEST_CASE("dropout removes roughly the requested fraction") {
  SceneTruth none = synth_generate(box_scene(0.0, 0.0), 5);
  SceneTruth some = synth_generate(box_scene(0.0, 0.2), 5);
  double kept = (double)some.noisy_mesh.triangles.size() / none.noisy_mesh.triangles.size();
  CHECK(kept == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("gable scene hits the requested ridge height") {
  SceneSpec spec;
  BuildingSpec b;
  b.footprint = Polygon2::rect(0, 0, 12, 8);
  b.wall_height = 3.0;
  b.roof = RoofType::kGable;
  b.ridge_height = 5.0;
  spec.buildings.push_back(b);
  spec.sigma = 0.02;
  SceneTruth t = synth_generate(spec, 9);
  CHECK(t.clean_mesh.max_z() == doctest::Approx(5.0));
  CHECK(t.noisy_mesh.max_z() == doctest::Approx(5.0).epsilon(0.05));
  // Ridge runs along the long axis at mid-width.
  auto h = height_field_query(t.clean_mesh, {6.0, 4.0});
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(5.0));
}

TEST_CASE("scene JSON round trip") {
  SceneSpec spec = box_scene(0.05, 0.1);
  spec.buildings[0].roof = RoofType::kMansard;
  spec.buildings[0].ridge_height = 6.0;
  spec.buildings[0].mansard_break_offset = 1.2;
  spec.buildings[0].mansard_break_height = 4.5;
  std::string text = scene_to_json(spec);
  SceneSpec parsed = scene_from_json(text);
  CHECK(parsed.sigma == spec.sigma);
  CHECK(parsed.dropout == spec.dropout);
  REQUIRE(parsed.buildings.size() == 1);
  CHECK(parsed.buildings[0].roof == RoofType::kMansard);
  CHECK(parsed.buildings[0].ridge_height == 6.0);
  CHECK(scene_to_json(parsed) == text);
  CHECK_THROWS_AS(scene_from_json("{"), Error);
  CHECK_THROWS_AS(scene_from_json(R"({"buildings":[]})"), Error);
}

TEST_CASE("invalid specs are rejected") {
  SceneSpec spec = box_scene(-1.0, 0.0);
  CHECK_THROWS_AS(synth_generate(spec, 1), Error);
  SceneSpec gable = box_scene(0.0, 0.0);
  gable.buildings[0].roof = RoofType::kGable;
  gable.buildings[0].ridge_height = 1.0;  // below the wall
  CHECK_THROWS_AS(synth_generate(gable, 1), Error);
}
