#pragma once

#include "massfit/io.hpp"
#include "massfit/metrics.hpp"
#include "massfit/synth.hpp"

namespace massfit {

// Every knob of the reconstruction, serializable as flat key=value text.
struct PipelineConfig {
  double slice_interval = 0.2;  // m
  double min_wall_step = 0.4;   // m, height step for a slice to count as wall
  double min_contour_len = 0.5; // m, shortest usable slice contour
  double gamma = 10.0;          // m^2, sweep-edge area threshold
  double alpha = 40.0;
  double beta = 60.0;
  double pair_dist = 2.0;       // m
  double pair_angle_deg = 30.0;
  int max_labels = 0;           // 0 = auto (#gis + 2)
  std::string profile_quality = "high";       // simple | moderate | high
  std::string solver = "branch_and_bound";    // exact | branch_and_bound
  double solver_budget_sec = 300.0;
  double cell = 0.25;           // m, error grid
  double theta_snap_deg = 10.0;
  double dist_snap = 1.0;
  double theta_tol_deg = 15.0;
  double dist_tol = 0.5;
  double gis_dilation = 2.0;
  double h_min = 1.0;
  double h_presence = 0.25;
  double bbox_margin = 5.0;
  bool continuations_count_as_sweep = true;
  double profile_spacing = 1.0;
  double cap_margin = 0.5;
  uint64_t seed = 1;
  bool zero_time_in_stats = false;  // deterministic exports for comparisons
  long max_bip_variables = 200000;

  static PipelineConfig parse(const std::string& text);
  std::string serialize() const;
  void set(const std::string& key, const std::string& value);

  ProfileQuality quality() const;
  SolveMode solve_mode() const;
};

struct PipelineResult {
  std::vector<MassModel> models;
  std::vector<Footprint> footprints;
  std::vector<SweepEdge> sweeps;
  Arrangement arrangement;
  Labeling labeling;
  SolveResult solve_info;
  long bip_variables = 0;
  std::vector<EdgeProfileRecord> profiles;
  TriMesh combined;  // all models merged, for metrics and block export
  ErrorGrid grid;
  RunStats stats;
};

std::pair<TriMesh, std::vector<Polygon2>> load_inputs(const std::string& mesh_path,
                                                      const std::string& gis_path);

// extract -> align -> cluster -> filter -> fracture -> classify -> heightdiff
// -> solve -> footprints -> profiles -> extrude -> metrics. Errors carry the
// failing stage name.
PipelineResult run_pipeline(const TriMesh& mesh, const std::vector<Polygon2>& gis,
                            const PipelineConfig& cfg, const std::string& name = "scene");

// model_NNN.obj per footprint, combined block.obj, stats.csv, error grid
// CSV + PGM, profiles.csv.
void export_outputs(const PipelineResult& res, const std::string& out_dir);

}  // namespace massfit
