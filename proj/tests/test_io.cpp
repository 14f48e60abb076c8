#include <filesystem>

#include "test_support.hpp"

#include "massfit/io.hpp"
#include "massfit/pipeline.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

std::string tmp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "massfit_io_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("OBJ round trip preserves geometry") {
  TriMesh box = make_box(0, 0, 0, 10, 6, 3);
  std::string path = tmp_dir() + "/box.obj";
  save_obj(path, box);
  TriMesh loaded = load_obj(path);
  CHECK(loaded.vertices.size() == box.vertices.size());
  CHECK(loaded.triangles.size() == box.triangles.size());
  CHECK(loaded.max_z() == doctest::Approx(3.0));
}

TEST_CASE("quad faces are triangulated on load") {
  std::string path = tmp_dir() + "/quad.obj";
  write_text_file(path,
                  "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                  "v 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
                  "f 1 2 3 4\nf 5 6 7 8\n");
  TriMesh m = load_obj(path);
  CHECK(m.triangles.size() == 4);  // face count doubles
}

TEST_CASE("OBJ with slash face syntax") {
  std::string path = tmp_dir() + "/slash.obj";
  write_text_file(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n");
  TriMesh m = load_obj(path);
  CHECK(m.triangles.size() == 1);
}

TEST_CASE("missing or faceless OBJ throws") {
  CHECK_THROWS_AS(load_obj("/nonexistent/file.obj"), Error);
  std::string path = tmp_dir() + "/empty.obj";
  write_text_file(path, "v 0 0 0\n");
  CHECK_THROWS_AS(load_obj(path), Error);
}

TEST_CASE("GeoJSON in metric coordinates passes through") {
  std::string path = tmp_dir() + "/meters.geojson";
  write_text_file(path, R"({"type":"Polygon","coordinates":[[[0,0],[10,0],[10,6],[0,6],[0,0]]]})");
  auto polys = load_geojson_footprints(path);
  REQUIRE(polys.size() == 1);
  CHECK(polys[0].area() == doctest::Approx(60.0));
  CHECK(ring_area(polys[0].outer) > 0.0);  // normalized CCW
}

TEST_CASE("geographic GeoJSON is projected to local meters") {
  // A ~20 m x ~14 m building near (51.5173, -0.1420).
  std::string path = tmp_dir() + "/geo.geojson";
  write_text_file(path, R"({"type":"FeatureCollection","features":[{"type":"Feature",
    "properties":{},
    "geometry":{"type":"Polygon","coordinates":[[
      [-0.14210,51.51720],[-0.14184,51.51720],[-0.14184,51.51733],[-0.14210,51.51733],[-0.14210,51.51720]
    ]]}}]})");
  auto polys = load_geojson_footprints(path);
  REQUIRE(polys.size() == 1);
  // Vertex centroid lands at the origin.
  Vec2 c{0, 0};
  for (const auto& v : polys[0].outer) c += v;
  c = c / (double)polys[0].outer.size();
  CHECK(std::abs(c.x) < 1e-6);
  CHECK(std::abs(c.y) < 1e-6);
  // Extents are building-scale meters.
  BBox2 box = polys[0].bbox();
  CHECK(box.size().x == doctest::Approx(18.0).epsilon(0.1));
  CHECK(box.size().y == doctest::Approx(14.4).epsilon(0.1));
}

TEST_CASE("MultiPolygon and Feature wrappers") {
  std::string path = tmp_dir() + "/multi.geojson";
  write_text_file(path, R"({"type":"MultiPolygon","coordinates":[
    [[[0,0],[5,0],[5,5],[0,5],[0,0]]],
    [[[10,0],[15,0],[15,5],[10,5],[10,0]]]]})");
  CHECK(load_geojson_footprints(path).size() == 2);

  std::string bad = tmp_dir() + "/bad.geojson";
  write_text_file(bad, R"({"type":"Point","coordinates":[0,0]})");
  CHECK_THROWS_AS(load_geojson_footprints(bad), Error);
}

TEST_CASE("GeoJSON write/read round trip") {
  Polygon2 donut = Polygon2::rect(0, 0, 8, 8);
  donut.holes.push_back({{3, 3}, {3, 5}, {5, 5}, {5, 3}});
  std::string path = tmp_dir() + "/rt.geojson";
  save_geojson_footprints(path, {donut});
  auto polys = load_geojson_footprints(path);
  REQUIRE(polys.size() == 1);
  CHECK(polys[0].holes.size() == 1);
  CHECK(polys[0].area() == doctest::Approx(60.0));
}

TEST_CASE("stats CSV uses the fixed schema") {
  RunStats s;
  s.name = "glasgow-small";
  s.sweep_edges = 10;
  s.variables = 466;
  s.time_sec = 0.04;
  s.error_m2 = 0.348;
  std::string path = tmp_dir() + "/stats.csv";
  save_stats_csv(path, {s});
  std::string text = read_text_file(path);
  CHECK(text.substr(0, text.find('\n')) == "name,sweep_edges,variables,time_sec,error_m2");
  CHECK(text.find("glasgow-small,10,466,0.04,0.348") != std::string::npos);
}

TEST_CASE("error grid CSV and PGM") {
  ErrorGrid g;
  g.origin = {1.0, 2.0};
  g.cell = 0.5;
  g.rows = 2;
  g.cols = 3;
  g.sq_error = {0, 1, 2, 3, 4, 0};
  g.valid = {1, 1, 1, 1, 1, 0};
  std::string csv = tmp_dir() + "/grid.csv";
  std::string pgm = tmp_dir() + "/grid.pgm";
  save_error_grid_csv(csv, g);
  save_error_grid_pgm(pgm, g);
  std::string ct = read_text_file(csv);
  CHECK(ct.find("origin_x=1") != std::string::npos);
  CHECK(ct.find("cell=0.5") != std::string::npos);
  CHECK(ct.find("nan") != std::string::npos);
  std::string pt = read_text_file(pgm);
  CHECK(pt.substr(0, 2) == "P2");
  CHECK(pt.find("3 2") != std::string::npos);
}

TEST_CASE("profiles CSV") {
  EdgeProfileRecord rec;
  rec.footprint_id = 0;
  rec.edge_id = 2;
  rec.profile.points = {{0, 0}, {0, 3}, {2, 4}};
  std::string path = tmp_dir() + "/profiles.csv";
  save_profiles_csv(path, {rec});
  std::string text = read_text_file(path);
  CHECK(text.find("footprint_id,edge_id,point_index,offset_m,height_m") == 0);
  CHECK(text.find("0,2,1,0,3") != std::string::npos);
}

TEST_CASE("config serialize/parse is a fixed point") {
  PipelineConfig cfg;
  cfg.gamma = 30.0;
  cfg.alpha = 90.0;
  cfg.profile_quality = "moderate";
  cfg.continuations_count_as_sweep = false;
  cfg.seed = 99;
  std::string once = cfg.serialize();
  PipelineConfig parsed = PipelineConfig::parse(once);
  CHECK(parsed.serialize() == once);
  CHECK(parsed.gamma == 30.0);
  CHECK(parsed.alpha == 90.0);
  CHECK(parsed.profile_quality == "moderate");
  CHECK(parsed.continuations_count_as_sweep == false);
  CHECK(parsed.seed == 99);
  CHECK_THROWS_AS(PipelineConfig::parse("nonsense_key=1\n"), Error);
  CHECK_THROWS_AS(PipelineConfig::parse("gamma 10\n"), Error);
}

TEST_CASE("mass model OBJ reloads with the same geometry") {
  Polygon2 sq = Polygon2::rect(0, 0, 4, 3);
  Profile pitch;
  pitch.points = {{0, 0}, {0, 1}, {1.5, 2.5}};
  MassModel m = extrude(sq, std::vector<Profile>(4, pitch), 2.5);
  std::string path = tmp_dir() + "/model.obj";
  save_mass_model_obj(path, m);
  TriMesh reloaded = load_obj(path);
  // Weld-tolerant: counts survive the round trip.
  CHECK(reloaded.vertices.size() == m.mesh.vertices.size());
  CHECK(reloaded.triangles.size() == m.mesh.triangles.size());
  CHECK(is_closed_manifold(reloaded));
}
