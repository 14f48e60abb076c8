#include "massfit/mesh.hpp"

#include <map>
#include <set>
#include <unordered_map>

namespace massfit {

namespace {

double tri_area3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * cross(b - a, c - a).norm();
}

struct GridKey {
  long long gx, gy, gz;
  bool operator<(const GridKey& o) const {
    if (gx != o.gx) return gx < o.gx;
    if (gy != o.gy) return gy < o.gy;
    return gz < o.gz;
  }
};

}  // namespace

void TriMesh::build() {
  for (const auto& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw Error("TriMesh: non-finite vertex coordinate");
    }
  }
  // Weld vertices within 1e-6 m via grid snapping.
  const double weld = 1e-6;
  std::map<GridKey, int> grid;
  std::vector<int> remap(vertices.size(), -1);
  std::vector<Vec3> out_verts;
  out_verts.reserve(vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) {
    const Vec3& v = vertices[i];
    GridKey k{(long long)std::llround(v.x / weld), (long long)std::llround(v.y / weld),
              (long long)std::llround(v.z / weld)};
    auto it = grid.find(k);
    if (it == grid.end()) {
      grid.emplace(k, (int)out_verts.size());
      remap[i] = (int)out_verts.size();
      out_verts.push_back(v);
    } else {
      remap[i] = it->second;
    }
  }
  std::vector<std::array<int, 3>> out_tris;
  out_tris.reserve(triangles.size());
  for (const auto& t : triangles) {
    for (int c : t) {
      if (c < 0 || c >= (int)vertices.size()) throw Error("TriMesh: triangle index out of range");
    }
    std::array<int, 3> m{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (m[0] == m[1] || m[1] == m[2] || m[0] == m[2]) continue;
    if (tri_area3(out_verts[m[0]], out_verts[m[1]], out_verts[m[2]]) < kAreaEps) continue;
    out_tris.push_back(m);
  }
  vertices = std::move(out_verts);
  triangles = std::move(out_tris);
}

double TriMesh::max_z() const {
  double m = std::numeric_limits<double>::lowest();
  for (const auto& t : triangles) {
    for (int c : t) m = std::max(m, vertices[c].z);
  }
  return m;
}

double TriMesh::min_z() const {
  double m = std::numeric_limits<double>::max();
  for (const auto& t : triangles) {
    for (int c : t) m = std::min(m, vertices[c].z);
  }
  return m;
}

BBox2 TriMesh::bbox_xy() const {
  BBox2 b;
  for (const auto& t : triangles) {
    for (int c : t) b.expand(vertices[c].xy());
  }
  return b;
}

namespace {

// Shared plane-slice core: signed distances s[i] of the triangle corners to
// the plane; emits the crossing segment via `emit(p, q)` on 3D points.
template <typename Emit>
void slice_triangle(const Vec3& v0, const Vec3& v1, const Vec3& v2, double s0, double s1,
                    double s2, Emit&& emit) {
  const double eps = 1e-12;
  const Vec3 v[3] = {v0, v1, v2};
  const double s[3] = {s0, s1, s2};
  int pos = 0, neg = 0, zero = 0;
  for (double d : s) {
    if (d > eps) {
      ++pos;
    } else if (d < -eps) {
      ++neg;
    } else {
      ++zero;
    }
  }
  // Touch-only contacts: all on one side, a single vertex on the plane, or the
  // whole triangle coplanar ("edge-on") produce nothing.
  if (pos == 0 || neg == 0) return;
  std::vector<Vec3> pts;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    if (std::abs(s[i]) <= eps) {
      pts.push_back(v[i]);
      continue;
    }
    if ((s[i] > eps && s[j] < -eps) || (s[i] < -eps && s[j] > eps)) {
      double t = s[i] / (s[i] - s[j]);
      pts.push_back(v[i] + (v[j] - v[i]) * t);
    }
  }
  if (pts.size() >= 2) emit(pts[0], pts[1]);
}

}  // namespace

std::vector<Segment2> slice_mesh_horizontal(const TriMesh& mesh, double z) {
  if (!std::isfinite(z)) throw Error("slice_mesh_horizontal: non-finite z");
  std::vector<Segment2> out;
  for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    double zmin = std::min({a.z, b.z, c.z});
    double zmax = std::max({a.z, b.z, c.z});
    if (z < zmin - 1e-12 || z > zmax + 1e-12) continue;
    slice_triangle(a, b, c, a.z - z, b.z - z, c.z - z, [&](const Vec3& p, const Vec3& q) {
      Segment2 s{p.xy(), q.xy()};
      if (s.length() > kLengthEps) {
        s.level = z;
        s.source_tri = (int)ti;
        out.push_back(s);
      }
    });
  }
  return out;
}

std::vector<Segment2> slice_mesh_vertical(const TriMesh& mesh, const Vec2& origin,
                                          const Vec2& direction) {
  Vec2 d = direction;
  if (std::abs(d.norm() - 1.0) > 1e-6) d = d.normalized();
  if (d.norm() < 0.5) throw Error("slice_mesh_vertical: zero direction");
  Vec2 n = d.perp();
  std::vector<Segment2> out;
  auto plane_dist = [&](const Vec3& v) { return dot(v.xy() - origin, n); };
  for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    slice_triangle(a, b, c, plane_dist(a), plane_dist(b), plane_dist(c),
                   [&](const Vec3& p, const Vec3& q) {
                     Vec2 pp{dot(p.xy() - origin, d), p.z};
                     Vec2 qq{dot(q.xy() - origin, d), q.z};
                     Segment2 s{pp, qq};
                     if (s.length() > kLengthEps) {
                       s.source_tri = (int)ti;
                       out.push_back(s);
                     }
                   });
  }
  return out;
}

namespace {

std::optional<double> triangle_height_at(const TriMesh& mesh, int ti, const Vec2& p) {
  const auto& t = mesh.triangles[ti];
  Vec2 a = mesh.vertices[t[0]].xy();
  Vec2 b = mesh.vertices[t[1]].xy();
  Vec2 c = mesh.vertices[t[2]].xy();
  double den = cross(b - a, c - a);
  if (std::abs(den) < 1e-12) return std::nullopt;  // vertical triangle
  double w1 = cross(b - p, c - p) / den;
  double w2 = cross(c - p, a - p) / den;
  double w3 = 1.0 - w1 - w2;
  const double eps = -1e-9;
  if (w1 < eps || w2 < eps || w3 < eps) return std::nullopt;
  return w1 * mesh.vertices[t[0]].z + w2 * mesh.vertices[t[1]].z + w3 * mesh.vertices[t[2]].z;
}

}  // namespace

std::optional<double> height_field_query(const TriMesh& mesh, const Vec2& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("height_field_query: non-finite point");
  std::optional<double> best;
  for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    auto h = triangle_height_at(mesh, (int)ti, p);
    if (h && (!best || *h > *best)) best = h;
  }
  return best;
}

HeightField::HeightField(const TriMesh& mesh, double cell) : mesh_(mesh), cell_(cell) {
  box_ = mesh.bbox_xy();
  if (box_.empty()) return;
  nx_ = std::max(1, (int)std::ceil(box_.size().x / cell_));
  ny_ = std::max(1, (int)std::ceil(box_.size().y / cell_));
  cells_.resize((size_t)nx_ * ny_);
  for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    BBox2 tb;
    for (int c : mesh.triangles[ti]) tb.expand(mesh.vertices[c].xy());
    int x0 = std::clamp((int)((tb.min.x - box_.min.x) / cell_), 0, nx_ - 1);
    int x1 = std::clamp((int)((tb.max.x - box_.min.x) / cell_), 0, nx_ - 1);
    int y0 = std::clamp((int)((tb.min.y - box_.min.y) / cell_), 0, ny_ - 1);
    int y1 = std::clamp((int)((tb.max.y - box_.min.y) / cell_), 0, ny_ - 1);
    for (int gx = x0; gx <= x1; ++gx) {
      for (int gy = y0; gy <= y1; ++gy) {
        cells_[(size_t)gy * nx_ + gx].push_back((int)ti);
      }
    }
  }
}

std::optional<double> HeightField::query(const Vec2& p) const {
  if (box_.empty() || nx_ == 0) return std::nullopt;
  if (p.x < box_.min.x - 1e-9 || p.x > box_.max.x + 1e-9 || p.y < box_.min.y - 1e-9 ||
      p.y > box_.max.y + 1e-9) {
    return std::nullopt;
  }
  int gx = std::clamp((int)((p.x - box_.min.x) / cell_), 0, nx_ - 1);
  int gy = std::clamp((int)((p.y - box_.min.y) / cell_), 0, ny_ - 1);
  std::optional<double> best;
  for (int ti : cells_[(size_t)gy * nx_ + gx]) {
    auto h = triangle_height_at(mesh_, ti, p);
    if (h && (!best || *h > *best)) best = h;
  }
  return best;
}

bool is_closed_manifold(const TriMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      int u = t[i], v = t[(i + 1) % 3];
      auto key = std::make_pair(u, v);
      if (++directed[key] > 1) return false;  // duplicate directed edge
    }
  }
  for (const auto& [key, count] : directed) {
    auto twin = directed.find(std::make_pair(key.second, key.first));
    if (twin == directed.end()) return false;  // boundary edge
  }
  return true;
}

int euler_characteristic(const TriMesh& mesh) {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      verts.insert(t[i]);
      int u = t[i], v = t[(i + 1) % 3];
      edges.insert({std::min(u, v), std::max(u, v)});
    }
  }
  return (int)verts.size() - (int)edges.size() + (int)mesh.triangles.size();
}

double signed_volume(const TriMesh& mesh) {
  double vol = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    vol += dot(a, cross(b, c)) / 6.0;
  }
  return vol;
}

}  // namespace massfit
