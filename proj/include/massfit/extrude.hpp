#pragma once

#include "massfit/mesh.hpp"
#include "massfit/profile.hpp"

namespace massfit {

enum class FaceLabel { kWall, kRoof, kFloor, kCap };

struct FaceInfo {
  FaceLabel label = FaceLabel::kRoof;
  int footprint_id = -1;
  int edge_id = -1;        // source footprint edge; -1 for floor/cap closures
  double gen_slope = 0.0;  // speed of the generating profile segment
  int kind = 0;            // 0 = swept side face, 1 = floor, 2 = cap
};

// Watertight, face-labeled building mass with per-face provenance.
struct MassModel {
  TriMesh mesh;
  std::vector<FaceInfo> faces;  // parallel to mesh.triangles
  int footprint_id = -1;

  // Closed 2-manifold, outward orientation, wall verticality, floor at z=0.
  void validate() const;
};

// Unresolvable coincident wavefront events carry their location so the caller
// can perturb and retry.
struct SkeletonError : Error {
  Vec2 location;
  double height;
  SkeletonError(const std::string& what, const Vec2& loc, double h)
      : Error(what), location(loc), height(h) {}
};

// Maximum extrusion limit: highest mesh vertex plus margin.
double height_cap_from_mesh(const TriMesh& mesh, double margin = 0.5);

// Weighted straight-skeleton sweep of the footprint along per-edge profiles,
// cut off at h_cap with a horizontal cap. Footprint edge i runs from ring
// vertex i to i+1; hole edges continue the numbering after the outer ring.
MassModel extrude(const Polygon2& footprint, const std::vector<Profile>& profiles, double h_cap,
                  int footprint_id = 0);

// extrude, retrying once with a 1e-4 m vertex perturbation if coincident
// events cannot be resolved.
MassModel extrude_with_retry(const Polygon2& footprint, const std::vector<Profile>& profiles,
                             double h_cap, int footprint_id = 0);

// Assigns face labels from provenance: vertical generators are walls, sloped
// generators roofs, z=0 closures floors, h_cap closures caps.
void label_faces(MassModel& model);

}  // namespace massfit
