#pragma once

#include <array>
#include <optional>

#include "massfit/geom.hpp"

namespace massfit {

// Indexed triangle mesh in meters, Z-up. Immutable after build(); all queries
// are pure and thread safe.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  // Deduplicates vertices (1e-6 m), drops degenerate triangles (1e-9 m^2) and
  // validates indices. Call after filling the raw arrays.
  void build();

  bool empty() const { return triangles.empty(); }
  double max_z() const;
  double min_z() const;
  BBox2 bbox_xy() const;

  Vec3 tri_vertex(int tri, int corner) const { return vertices[triangles[tri][corner]]; }
};

// Intersection of the plane height=z with every triangle, projected to the
// ground plane. Touch-only contacts (point or edge-on) are dropped.
std::vector<Segment2> slice_mesh_horizontal(const TriMesh& mesh, double z);

// Intersection with the vertical plane through `origin` spanned by `direction`
// (unit). Output segments are in plane coordinates: x = signed distance along
// direction from origin, y = height.
std::vector<Segment2> slice_mesh_vertical(const TriMesh& mesh, const Vec2& origin,
                                          const Vec2& direction);

// Maximum z over all triangles whose ground-plane projection contains p;
// absent if no triangle covers p.
std::optional<double> height_field_query(const TriMesh& mesh, const Vec2& p);

// Spatial grid over triangle xy-projections so repeated height queries stay
// cheap on photogrammetric meshes.
class HeightField {
 public:
  explicit HeightField(const TriMesh& mesh, double cell = 2.0);
  std::optional<double> query(const Vec2& p) const;

 private:
  const TriMesh& mesh_;
  BBox2 box_;
  double cell_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> cells_;
};

// True when every undirected edge is shared by exactly two triangles with
// opposite orientation (closed, consistently oriented 2-manifold).
bool is_closed_manifold(const TriMesh& mesh);

// V - E + F over the whole mesh (2 per genus-0 component).
int euler_characteristic(const TriMesh& mesh);

// Signed enclosed volume (positive for outward-oriented closed meshes).
double signed_volume(const TriMesh& mesh);

}  // namespace massfit
