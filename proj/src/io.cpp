#include "massfit/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace massfit {

namespace {
using nlohmann::json;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v == 0.0 ? 0.0 : v);  // normalize -0
  return buf;
}

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read OBJ: " + path);
  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() < 2) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Vec3 v;
      ss >> v.x >> v.y >> v.z;
      if (!ss) throw Error("bad vertex line in " + path);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        size_t slash = tok.find('/');
        if (slash != std::string::npos) tok = tok.substr(0, slash);
        int i = std::stoi(tok);
        if (i < 0) i = (int)mesh.vertices.size() + i + 1;
        idx.push_back(i - 1);
      }
      if (idx.size() < 3) throw Error("bad face line in " + path);
      for (size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
      }
    }
  }
  if (mesh.triangles.empty()) throw Error("OBJ has no faces: " + path);
  mesh.build();
  return mesh;
}

void save_obj(const std::string& path, const TriMesh& mesh) {
  std::ostringstream out;
  for (const auto& v : mesh.vertices) {
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z)
        << '\n';
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  write_text_file(path, out.str());
}

void save_mass_model_obj(const std::string& path, const MassModel& model) {
  namespace fs = std::filesystem;
  fs::path p(path);
  fs::path mtl = p.parent_path() / "massfit.mtl";
  if (!fs::exists(mtl)) {
    std::ostringstream m;
    for (const char* name : {"wall", "roof", "floor", "cap"}) {
      m << "newmtl " << name << "\n";
    }
    write_text_file(mtl.string(), m.str());
  }
  std::ostringstream out;
  out << "mtllib massfit.mtl\n";
  out << "o model_" << model.footprint_id << '\n';
  for (const auto& v : model.mesh.vertices) {
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z)
        << '\n';
  }
  const char* names[4] = {"wall", "roof", "floor", "cap"};
  for (int lab = 0; lab < 4; ++lab) {
    bool any = false;
    for (size_t t = 0; t < model.faces.size(); ++t) {
      if ((int)model.faces[t].label != lab) continue;
      if (!any) {
        out << "g " << names[lab] << "\nusemtl " << names[lab] << '\n';
        any = true;
      }
      const auto& tri = model.mesh.triangles[t];
      out << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
    }
  }
  write_text_file(path, out.str());
}

namespace {

std::vector<std::vector<Vec2>> rings_from_json(const json& coords) {
  std::vector<std::vector<Vec2>> rings;
  for (const auto& ring : coords) {
    std::vector<Vec2> r;
    for (const auto& pt : ring) {
      if (!pt.is_array() || pt.size() < 2) throw Error("GeoJSON: bad coordinate");
      r.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (r.size() >= 2 && near(r.front(), r.back(), 1e-12)) r.pop_back();
    if (r.size() >= 3) rings.push_back(std::move(r));
  }
  return rings;
}

void collect_polygons(const json& geom, std::vector<Polygon2>& out) {
  std::string type = geom.value("type", "");
  if (type == "Polygon") {
    auto rings = rings_from_json(geom.at("coordinates"));
    if (rings.empty()) return;
    Polygon2 poly;
    poly.outer = rings[0];
    for (size_t i = 1; i < rings.size(); ++i) poly.holes.push_back(rings[i]);
    poly.normalize_orientation();
    out.push_back(std::move(poly));
  } else if (type == "MultiPolygon") {
    for (const auto& part : geom.at("coordinates")) {
      auto rings = rings_from_json(part);
      if (rings.empty()) continue;
      Polygon2 poly;
      poly.outer = rings[0];
      for (size_t i = 1; i < rings.size(); ++i) poly.holes.push_back(rings[i]);
      poly.normalize_orientation();
      out.push_back(std::move(poly));
    }
  } else if (type == "Feature") {
    if (geom.contains("geometry") && geom["geometry"].is_object()) {
      collect_polygons(geom["geometry"], out);
    }
  } else if (type == "FeatureCollection") {
    for (const auto& f : geom.at("features")) collect_polygons(f, out);
  } else if (type == "GeometryCollection") {
    for (const auto& g : geom.at("geometries")) collect_polygons(g, out);
  } else {
    throw Error("GeoJSON: unsupported geometry type '" + type + "'");
  }
}

}  // namespace

std::vector<Polygon2> load_geojson_footprints(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error("GeoJSON parse error in " + path + ": " + e.what());
  }
  std::vector<Polygon2> polys;
  collect_polygons(doc, polys);
  if (polys.empty()) throw Error("GeoJSON has no polygons: " + path);

  // Geographic inputs: plausible lon/lat ranges and building-scale extent in
  // degrees. Metric inputs near the origin have extents far above 0.01.
  BBox2 box;
  for (const auto& p : polys) box.expand(p.bbox());
  bool in_range = box.min.x >= -180.0 && box.max.x <= 180.0 && box.min.y >= -90.0 &&
                  box.max.y <= 90.0;
  bool tiny = std::max(box.size().x, box.size().y) <= 0.01;
  if (in_range && tiny) {
    // Local tangent plane about the vertex centroid (equirectangular).
    const double R = 6378137.0;
    Vec2 c{0, 0};
    size_t count = 0;
    for (const auto& p : polys) {
      for (const auto& v : p.outer) {
        c += v;
        ++count;
      }
    }
    c = c / (double)count;
    double cos_lat = std::cos(c.y * kPi / 180.0);
    auto project = [&](Vec2 ll) {
      return Vec2{(ll.x - c.x) * kPi / 180.0 * R * cos_lat, (ll.y - c.y) * kPi / 180.0 * R};
    };
    for (auto& p : polys) {
      for (auto& v : p.outer) v = project(v);
      for (auto& h : p.holes) {
        for (auto& v : h) v = project(v);
      }
    }
  }
  return polys;
}

void save_geojson_footprints(const std::string& path, const std::vector<Polygon2>& polys) {
  json features = json::array();
  for (const auto& p : polys) {
    json rings = json::array();
    auto dump_ring = [&](const std::vector<Vec2>& r) {
      json ring = json::array();
      for (const auto& v : r) ring.push_back({v.x, v.y});
      ring.push_back({r.front().x, r.front().y});
      rings.push_back(ring);
    };
    dump_ring(p.outer);
    for (const auto& h : p.holes) dump_ring(h);
    features.push_back({{"type", "Feature"},
                        {"properties", json::object()},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  write_text_file(path, doc.dump(2) + "\n");
}

void save_error_grid_csv(const std::string& path, const ErrorGrid& grid) {
  std::ostringstream out;
  out << "# origin_x=" << format_double(grid.origin.x) << " origin_y="
      << format_double(grid.origin.y) << " cell=" << format_double(grid.cell)
      << " rows=" << grid.rows << " cols=" << grid.cols << "\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out << ',';
      out << (grid.valid_at(r, c) ? format_double(grid.at(r, c)) : std::string("nan"));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void save_error_grid_pgm(const std::string& path, const ErrorGrid& grid) {
  double max_err = 0.0;
  for (size_t i = 0; i < grid.sq_error.size(); ++i) {
    if (grid.valid[i]) max_err = std::max(max_err, grid.sq_error[i]);
  }
  std::ostringstream out;
  out << "P2\n" << grid.cols << ' ' << grid.rows << "\n255\n";
  for (int r = grid.rows - 1; r >= 0; --r) {  // image rows top-down
    for (int c = 0; c < grid.cols; ++c) {
      int v = 0;
      if (grid.valid_at(r, c) && max_err > 0.0) {
        v = (int)std::lround(255.0 * grid.at(r, c) / max_err);
      }
      out << v << (c + 1 < grid.cols ? ' ' : '\n');
    }
  }
  write_text_file(path, out.str());
}

void save_stats_csv(const std::string& path, const std::vector<RunStats>& stats) {
  std::ostringstream out;
  out << "name,sweep_edges,variables,time_sec,error_m2\n";
  for (const auto& s : stats) {
    out << s.name << ',' << s.sweep_edges << ',' << s.variables << ','
        << format_double(s.time_sec) << ',' << format_double(s.error_m2) << '\n';
  }
  write_text_file(path, out.str());
}

void save_profiles_csv(const std::string& path, const std::vector<EdgeProfileRecord>& records) {
  std::ostringstream out;
  out << "footprint_id,edge_id,point_index,offset_m,height_m\n";
  for (const auto& rec : records) {
    for (size_t i = 0; i < rec.profile.points.size(); ++i) {
      out << rec.footprint_id << ',' << rec.edge_id << ',' << i << ','
          << format_double(rec.profile.points[i].offset) << ','
          << format_double(rec.profile.points[i].height) << '\n';
    }
  }
  write_text_file(path, out.str());
}

}  // namespace massfit
