#pragma once

#include <string>

#include "massfit/extrude.hpp"
#include "massfit/metrics.hpp"

namespace massfit {

// Wavefront OBJ; polygonal faces are fan-triangulated on load.
TriMesh load_obj(const std::string& path);
void save_obj(const std::string& path, const TriMesh& mesh);

// One model per OBJ with wall/roof/floor/cap material groups; writes a small
// .mtl next to it once.
void save_mass_model_obj(const std::string& path, const MassModel& model);

// GeoJSON Polygon / MultiPolygon (optionally wrapped in Feature /
// FeatureCollection). Geographic coordinates are detected by extent and
// projected to local tangent-plane meters about the vertex centroid.
std::vector<Polygon2> load_geojson_footprints(const std::string& path);
void save_geojson_footprints(const std::string& path, const std::vector<Polygon2>& polys);

void save_error_grid_csv(const std::string& path, const ErrorGrid& grid);
void save_error_grid_pgm(const std::string& path, const ErrorGrid& grid);
void save_stats_csv(const std::string& path, const std::vector<RunStats>& stats);

struct EdgeProfileRecord {
  int footprint_id = 0;
  int edge_id = 0;
  Profile profile;
};
void save_profiles_csv(const std::string& path, const std::vector<EdgeProfileRecord>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Deterministic float formatting shared by all exports.
std::string format_double(double v);

}  // namespace massfit
