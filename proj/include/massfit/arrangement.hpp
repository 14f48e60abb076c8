#pragma once

#include "massfit/geom.hpp"
#include "massfit/mesh.hpp"
#include "massfit/sweep.hpp"

namespace massfit {

constexpr int kOutside = -1;

// One edge fragment of the fractured ground plane.
struct ArrEdge {
  Segment2 segment;
  double length = 0.0;
  bool is_sweep = false;         // energy indicator (continuations included by config)
  bool in_sweep_extent = false;  // lies within the originating sweep's extent
  int sweep_origin = -1;         // sweep edge id when in_sweep_extent
  int line_id = -1;              // inserted line index, -1 for bbox boundary
  double height_diff = 0.0;      // filled by compute_height_diffs
  int left = kOutside;           // polygon id left of a->b, or kOutside
  int right = kOutside;
};

struct ArrPolygon {
  int id = -1;
  Polygon2 poly;  // convex cell, hole free
  double area = 0.0;
  bool kept = true;
};

// Planar subdivision of the working bbox by sweep lines. Cells partition the
// bbox; every edge borders exactly two cells (or a cell and OUTSIDE).
struct Arrangement {
  std::vector<ArrPolygon> polygons;
  std::vector<ArrEdge> edges;
  BBox2 bbox;
  bool classified = false;

  int kept_count() const {
    int n = 0;
    for (const auto& p : polygons) n += p.kept ? 1 : 0;
    return n;
  }
  std::vector<int> kept_ids() const {
    std::vector<int> ids;
    for (const auto& p : polygons) {
      if (p.kept) ids.push_back(p.id);
    }
    return ids;
  }
  double cell_area_sum() const {
    double s = 0.0;
    for (const auto& p : polygons) s += p.area;
    return s;
  }
};

struct FractureParams {
  double merge_dist = 0.05;                // near-duplicate line offset merge, m
  double merge_angle = 0.5 * kPi / 180.0;  // near-duplicate line angle merge
  bool continuations_count_as_sweep = true;
};

// Inserts each sweep edge's full supporting line (longest first) into the
// bbox and extracts the induced convex cells. Zero sweeps yield the bbox as a
// single polygon.
Arrangement fracture_plane(const std::vector<SweepEdge>& sweeps, const Polygon2& bbox,
                           const FractureParams& params = {});

struct ClassifyParams {
  double gis_dilation = 2.0;  // m, inside test slack
  double h_min = 1.0;         // m, mean-height keep threshold
  double h_presence = 0.25;   // m, minimum mesh evidence inside the dilated GIS
  double sample_grid = 0.5;   // m, height sampling grid
};

// Marks polygons outside the dilated GIS footprints and below the height
// threshold as removed; their adjacency becomes OUTSIDE. Throws if nothing
// remains.
void classify_polygons(Arrangement& arr, const std::vector<Polygon2>& gis, const TriMesh& mesh,
                       const ClassifyParams& params = {});

struct HeightDiffParams {
  int samples_per_edge = 8;
  double perp_offset = 0.4;  // m, sampling offset either side of the edge
};

// Mean |h_left - h_right| sampled along each edge; missing mesh counts as 0.
void compute_height_diffs(Arrangement& arr, const TriMesh& mesh,
                          const HeightDiffParams& params = {});

}  // namespace massfit
