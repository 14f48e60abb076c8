#include "massfit/synth.hpp"

#include <json.hpp>

namespace massfit {

uint64_t SynthRng::next_u64() {
  // splitmix64: identical streams on every platform.
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SynthRng::uniform() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

double SynthRng::gauss() {
  if (have_spare) {
    have_spare = false;
    return spare;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare = r * std::sin(2.0 * kPi * u2);
  have_spare = true;
  return r * std::cos(2.0 * kPi * u2);
}

namespace {

// Direction of the longest outer edge: the ridge axis for gables.
Vec2 ridge_axis(const Polygon2& fp) {
  double best = -1.0;
  Vec2 dir{1, 0};
  const size_t n = fp.outer.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = fp.outer[i], b = fp.outer[(i + 1) % n];
    double len = dist(a, b);
    if (len > best) {
      best = len;
      dir = (b - a).normalized();
    }
  }
  return dir;
}

// Footprint extent perpendicular to dir.
double cross_span(const Polygon2& fp, const Vec2& dir) {
  Vec2 n = dir.perp();
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (const auto& p : fp.outer) {
    double t = dot(n, p);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo;
}

}  // namespace

std::vector<Profile> building_profiles(const BuildingSpec& b) {
  Polygon2 fp = b.footprint;
  fp.normalize_orientation();
  if (b.roof != RoofType::kFlat && b.ridge_height <= b.wall_height) {
    throw Error("building spec: ridge_height must exceed wall_height");
  }
  std::vector<Profile> profiles;
  Vec2 axis = ridge_axis(fp);
  double across = cross_span(fp, axis);
  double half = 0.5 * across;
  BBox2 box = fp.bbox();
  double short_half = 0.5 * std::min(box.size().x, box.size().y);

  for (const auto* ring : fp.rings()) {
    const size_t n = ring->size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 d = ((*ring)[(i + 1) % n] - (*ring)[i]).normalized();
      Profile p;
      switch (b.roof) {
        case RoofType::kFlat:
          p = Profile::vertical(b.wall_height);
          break;
        case RoofType::kGable: {
          bool eave = angle_diff_mod_pi(canonical_angle(d), canonical_angle(axis)) < kPi / 4.0;
          if (eave) {
            p.points = {{0.0, 0.0}, {0.0, b.wall_height}, {half, b.ridge_height}};
          } else {
            p = Profile::vertical(b.ridge_height);  // gable end wall
          }
          break;
        }
        case RoofType::kHip:
          p.points = {{0.0, 0.0}, {0.0, b.wall_height}, {short_half, b.ridge_height}};
          break;
        case RoofType::kMansard: {
          double bh = b.mansard_break_height > b.wall_height ? b.mansard_break_height
                                                             : 0.5 * (b.wall_height + b.ridge_height);
          double bo = std::min(b.mansard_break_offset, short_half * 0.9);
          p.points = {{0.0, 0.0},
                      {0.0, b.wall_height},
                      {bo, bh},
                      {std::max(short_half, bo + 0.1), b.ridge_height}};
          break;
        }
      }
      p.validate();
      profiles.push_back(std::move(p));
    }
  }
  return profiles;
}

namespace {

void subdivide_triangle(const Vec3& a, const Vec3& b, const Vec3& c, double target, int depth,
                        std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& tris) {
  double longest = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
  if (longest <= target || depth >= 8) {
    int base = (int)verts.size();
    verts.push_back(a);
    verts.push_back(b);
    verts.push_back(c);
    tris.push_back({base, base + 1, base + 2});
    return;
  }
  Vec3 ab = (a + b) * 0.5, bc = (b + c) * 0.5, ca = (c + a) * 0.5;
  subdivide_triangle(a, ab, ca, target, depth + 1, verts, tris);
  subdivide_triangle(ab, b, bc, target, depth + 1, verts, tris);
  subdivide_triangle(ca, bc, c, target, depth + 1, verts, tris);
  subdivide_triangle(ab, bc, ca, target, depth + 1, verts, tris);
}

}  // namespace

SceneTruth synth_generate(const SceneSpec& spec, uint64_t seed) {
  if (spec.buildings.empty()) throw Error("synth_generate: no buildings in scene");
  if (spec.sigma < 0.0 || spec.dropout < 0.0 || spec.dropout >= 1.0 || spec.target_edge <= 0.0) {
    throw Error("synth_generate: invalid noise parameters");
  }
  SceneTruth truth;
  truth.spec = spec;
  truth.seed = seed;

  TriMesh combined;
  for (size_t bi = 0; bi < spec.buildings.size(); ++bi) {
    const BuildingSpec& b = spec.buildings[bi];
    std::vector<Profile> profiles = building_profiles(b);
    double h_cap = b.roof == RoofType::kFlat ? b.wall_height : b.ridge_height;
    MassModel model = extrude_with_retry(b.footprint, profiles, h_cap, (int)bi);
    Polygon2 fp = b.footprint;
    fp.normalize_orientation();
    truth.gis.push_back(fp);
    int offset = (int)combined.vertices.size();
    combined.vertices.insert(combined.vertices.end(), model.mesh.vertices.begin(),
                             model.mesh.vertices.end());
    for (const auto& t : model.mesh.triangles) {
      combined.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    }
    truth.clean_models.push_back(std::move(model));
  }
  combined.build();
  truth.clean_mesh = combined;

  // Resample the visible surface to roughly uniform triangles.
  TriMesh dense_all;
  std::vector<int> owner;  // building index per dense triangle
  for (size_t bi = 0; bi < truth.clean_models.size(); ++bi) {
    const MassModel& m = truth.clean_models[bi];
    for (size_t ti = 0; ti < m.mesh.triangles.size(); ++ti) {
      if (m.faces[ti].label == FaceLabel::kFloor) continue;
      const auto& t = m.mesh.triangles[ti];
      size_t before = dense_all.triangles.size();
      subdivide_triangle(m.mesh.vertices[t[0]], m.mesh.vertices[t[1]], m.mesh.vertices[t[2]],
                         spec.target_edge, 0, dense_all.vertices, dense_all.triangles);
      owner.insert(owner.end(), dense_all.triangles.size() - before, (int)bi);
    }
  }
  // Hidden-surface removal: a scan never sees the part of a party wall buried
  // inside the neighbouring building.
  std::vector<HeightField> height_of;
  height_of.reserve(truth.clean_models.size());
  for (const auto& m : truth.clean_models) height_of.emplace_back(m.mesh);
  TriMesh dense;
  dense.vertices = dense_all.vertices;
  for (size_t ti = 0; ti < dense_all.triangles.size(); ++ti) {
    const auto& t = dense_all.triangles[ti];
    Vec3 c = (dense_all.vertices[t[0]] + dense_all.vertices[t[1]] + dense_all.vertices[t[2]]) *
             (1.0 / 3.0);
    bool hidden = false;
    for (size_t bi = 0; bi < truth.clean_models.size() && !hidden; ++bi) {
      if ((int)bi == owner[ti] || !truth.gis[bi].contains(c.xy())) continue;
      auto h = height_of[bi].query(c.xy());
      if (h && c.z < *h - 0.01) hidden = true;
    }
    if (!hidden) dense.triangles.push_back(t);
  }
  dense.build();

  SynthRng rng(seed);
  for (auto& v : dense.vertices) {
    v.x += spec.sigma * rng.gauss();
    v.y += spec.sigma * rng.gauss();
    v.z += spec.sigma * rng.gauss();
  }
  TriMesh noisy;
  noisy.vertices = dense.vertices;
  for (const auto& t : dense.triangles) {
    if (rng.uniform() < spec.dropout) continue;
    noisy.triangles.push_back(t);
  }
  noisy.build();
  if (noisy.empty()) throw Error("synth_generate: dropout removed the whole mesh");
  truth.noisy_mesh = std::move(noisy);
  return truth;
}

namespace {
using nlohmann::json;

RoofType roof_from_string(const std::string& s) {
  if (s == "flat") return RoofType::kFlat;
  if (s == "gable") return RoofType::kGable;
  if (s == "hip") return RoofType::kHip;
  if (s == "mansard") return RoofType::kMansard;
  throw Error("scene: unknown roof type '" + s + "'");
}

std::string roof_to_string(RoofType t) {
  switch (t) {
    case RoofType::kFlat: return "flat";
    case RoofType::kGable: return "gable";
    case RoofType::kHip: return "hip";
    default: return "mansard";
  }
}

}  // namespace

SceneSpec scene_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("scene JSON parse error: ") + e.what());
  }
  SceneSpec spec;
  spec.sigma = doc.value("sigma", 0.0);
  spec.dropout = doc.value("dropout", 0.0);
  spec.target_edge = doc.value("target_edge", 0.3);
  for (const auto& b : doc.at("buildings")) {
    BuildingSpec bs;
    for (const auto& pt : b.at("footprint")) {
      bs.footprint.outer.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (bs.footprint.outer.size() < 3) throw Error("scene: footprint needs >= 3 vertices");
    bs.wall_height = b.value("wall_height", 3.0);
    bs.roof = roof_from_string(b.value("roof", "flat"));
    bs.ridge_height = b.value("ridge_height", 0.0);
    bs.mansard_break_offset = b.value("mansard_break_offset", 1.0);
    bs.mansard_break_height = b.value("mansard_break_height", 0.0);
    spec.buildings.push_back(std::move(bs));
  }
  if (spec.buildings.empty()) throw Error("scene: no buildings");
  return spec;
}

std::string scene_to_json(const SceneSpec& spec) {
  json buildings = json::array();
  for (const auto& b : spec.buildings) {
    json fp = json::array();
    for (const auto& v : b.footprint.outer) fp.push_back({v.x, v.y});
    buildings.push_back({{"footprint", fp},
                         {"wall_height", b.wall_height},
                         {"roof", roof_to_string(b.roof)},
                         {"ridge_height", b.ridge_height},
                         {"mansard_break_offset", b.mansard_break_offset},
                         {"mansard_break_height", b.mansard_break_height}});
  }
  json doc = {{"sigma", spec.sigma},
              {"dropout", spec.dropout},
              {"target_edge", spec.target_edge},
              {"buildings", buildings}};
  return doc.dump(2) + "\n";
}

}  // namespace massfit
