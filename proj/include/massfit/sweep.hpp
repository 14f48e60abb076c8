#pragma once

#include "massfit/geom.hpp"
#include "massfit/mesh.hpp"

namespace massfit {

// One horizontal slice segment tagged with its level.
struct SliceContour {
  Segment2 segment;
  double level = 0.0;
  double length = 0.0;
};

// Contours of similar direction and supporting-line offset, grouped. The
// supported area approximates the wall area the members trace out.
struct DirectionCluster {
  double direction = 0.0;  // [0, pi)
  double offset = 0.0;     // signed line offset from the origin, meters
  std::vector<SliceContour> members;
  double supported_area = 0.0;
  int id = -1;
};

// Ground-plane segment marking a probable vertical wall.
struct SweepEdge {
  Segment2 segment;
  double supported_area = 0.0;
  int cluster_id = -1;
};

struct SweepParams {
  double slice_interval = 0.2;            // m between horizontal slices
  double theta_snap = 10.0 * kPi / 180.0; // GIS direction snap
  double dist_snap = 1.0;                 // m, GIS line distance snap
  double theta_tol = 15.0 * kPi / 180.0;  // clustering direction tolerance
  double dist_tol = 0.5;                  // m, clustering offset tolerance
  double gamma = 10.0;                    // m^2, minimum supported area
  double gis_clip_margin = 2.0;           // m, extent clip around the GIS hull
};

// Slices the mesh at interval, 2*interval, ... strictly below the mesh top.
// Slice pieces are chained and straightened, and contours without a height
// step across them (roof-level streaks, ground clutter) are dropped when
// min_height_step > 0.
// min_length drops sub-meter fragments that chain breaks and dropout holes
// leave behind; real walls chain into multi-meter contours.
std::vector<SliceContour> extract_contours(const TriMesh& mesh, double interval,
                                           double min_height_step = 0.4,
                                           double min_length = 0.5);

// Rotates contours whose direction and supporting line are close to a GIS
// footprint edge onto that edge's exact direction (about the midpoint).
std::vector<SliceContour> align_to_gis(const std::vector<SliceContour>& contours,
                                       const std::vector<Polygon2>& gis, double theta_snap,
                                       double dist_snap);

// Greedy agglomerative clustering by (direction mod pi, line offset).
// Deterministic: contours are sorted by (level, length desc) first.
std::vector<DirectionCluster> cluster_contours(const std::vector<SliceContour>& contours,
                                               double theta_tol, double dist_tol,
                                               double slice_interval);

// Drops clusters below gamma and projects the survivors to ground-plane
// segments. The extent is clipped to the GIS footprints dilated by clip_margin
// along the cluster line; pass an empty gis list to skip clipping.
std::vector<SweepEdge> sweep_edges_from_clusters(const std::vector<DirectionCluster>& clusters,
                                                 double gamma,
                                                 const std::vector<Polygon2>& gis = {},
                                                 double clip_margin = 2.0);

// Signed offset of the line through p with direction angle theta.
double line_offset(const Vec2& p, double theta);

}  // namespace massfit
