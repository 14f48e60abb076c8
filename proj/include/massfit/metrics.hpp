#pragma once

#include "massfit/extrude.hpp"
#include "massfit/footprint_opt.hpp"

namespace massfit {

// Per-cell squared vertical error between two height fields.
struct ErrorGrid {
  Vec2 origin;
  double cell = 0.25;  // m
  int rows = 0;
  int cols = 0;
  std::vector<double> sq_error;  // row-major, rows*cols
  std::vector<uint8_t> valid;

  double& at(int r, int c) { return sq_error[(size_t)r * cols + c]; }
  double at(int r, int c) const { return sq_error[(size_t)r * cols + c]; }
  bool valid_at(int r, int c) const { return valid[(size_t)r * cols + c] != 0; }
  Vec2 cell_center(int r, int c) const {
    return origin + Vec2{(c + 0.5) * cell, (r + 0.5) * cell};
  }
};

// Run statistics in the standard reporting schema.
struct RunStats {
  std::string name;
  int sweep_edges = 0;
  long variables = 0;
  double time_sec = 0.0;
  double error_m2 = 0.0;
};

// Squared height difference between the input mesh and the model on a grid
// covering both, dilated one cell; cells valid only where both define heights.
ErrorGrid error_grid(const TriMesh& input, const TriMesh& model, double cell = 0.25);

// Mean of valid-cell squared errors; throws when no cell is valid.
double mse(const ErrorGrid& grid);

struct IouResult {
  double mean_iou = 0.0;  // over matched pairs
  int matched = 0;
  int unmatched_predicted = 0;
  int unmatched_truth = 0;
};

// Greedy area-descending matching of predicted to truth footprints; IoU by
// exact polygon intersection (via triangulation).
IouResult segmentation_iou(const std::vector<Footprint>& predicted,
                           const std::vector<Footprint>& truth);

double polygon_area_of_intersection(const Polygon2& a, const Polygon2& b);

struct RaindropResult {
  bool pass = true;
  Vec3 counterexample{0, 0, 0};  // a point whose path got stuck
  int paths_run = 0;
};

// Steepest-descent from n random roof points; passes when every path reaches
// a roof boundary edge (the gutter) within 10x the footprint diameter.
RaindropResult raindrop_check(const MassModel& model, int n, uint64_t seed);

}  // namespace massfit
