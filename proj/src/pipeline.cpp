#include "massfit/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <sstream>

namespace massfit {

namespace {

double deg(double d) { return d * kPi / 180.0; }

template <typename T>
std::string to_cfg(const T& v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

ProfileQuality PipelineConfig::quality() const {
  if (profile_quality == "simple") return ProfileQuality::kSimple;
  if (profile_quality == "moderate") return ProfileQuality::kModerate;
  if (profile_quality == "high") return ProfileQuality::kHigh;
  throw Error("config: profile_quality must be simple|moderate|high");
}

SolveMode PipelineConfig::solve_mode() const {
  if (solver == "exact") return SolveMode::kExact;
  if (solver == "branch_and_bound") return SolveMode::kBranchAndBound;
  throw Error("config: solver must be exact|branch_and_bound");
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  auto d = [&] { return std::stod(value); };
  auto b = [&] {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error("config: boolean expected for " + key);
  };
  if (key == "slice_interval") slice_interval = d();
  else if (key == "min_wall_step") min_wall_step = d();
  else if (key == "min_contour_len") min_contour_len = d();
  else if (key == "gamma") gamma = d();
  else if (key == "alpha") alpha = d();
  else if (key == "beta") beta = d();
  else if (key == "pair_dist") pair_dist = d();
  else if (key == "pair_angle_deg") pair_angle_deg = d();
  else if (key == "max_labels") max_labels = std::stoi(value);
  else if (key == "profile_quality") profile_quality = value;
  else if (key == "solver") solver = value;
  else if (key == "solver_budget_sec") solver_budget_sec = d();
  else if (key == "cell") cell = d();
  else if (key == "theta_snap_deg") theta_snap_deg = d();
  else if (key == "dist_snap") dist_snap = d();
  else if (key == "theta_tol_deg") theta_tol_deg = d();
  else if (key == "dist_tol") dist_tol = d();
  else if (key == "gis_dilation") gis_dilation = d();
  else if (key == "h_min") h_min = d();
  else if (key == "h_presence") h_presence = d();
  else if (key == "bbox_margin") bbox_margin = d();
  else if (key == "continuations_count_as_sweep") continuations_count_as_sweep = b();
  else if (key == "profile_spacing") profile_spacing = d();
  else if (key == "cap_margin") cap_margin = d();
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "zero_time_in_stats") zero_time_in_stats = b();
  else if (key == "max_bip_variables") max_bip_variables = std::stol(value);
  else throw Error("config: unknown key '" + key + "'");
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config: missing '=' on line " + std::to_string(lineno));
    }
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string PipelineConfig::serialize() const {
  std::ostringstream out;
  out << "slice_interval=" << format_double(slice_interval) << '\n';
  out << "min_wall_step=" << format_double(min_wall_step) << '\n';
  out << "min_contour_len=" << format_double(min_contour_len) << '\n';
  out << "gamma=" << format_double(gamma) << '\n';
  out << "alpha=" << format_double(alpha) << '\n';
  out << "beta=" << format_double(beta) << '\n';
  out << "pair_dist=" << format_double(pair_dist) << '\n';
  out << "pair_angle_deg=" << format_double(pair_angle_deg) << '\n';
  out << "max_labels=" << max_labels << '\n';
  out << "profile_quality=" << profile_quality << '\n';
  out << "solver=" << solver << '\n';
  out << "solver_budget_sec=" << format_double(solver_budget_sec) << '\n';
  out << "cell=" << format_double(cell) << '\n';
  out << "theta_snap_deg=" << format_double(theta_snap_deg) << '\n';
  out << "dist_snap=" << format_double(dist_snap) << '\n';
  out << "theta_tol_deg=" << format_double(theta_tol_deg) << '\n';
  out << "dist_tol=" << format_double(dist_tol) << '\n';
  out << "gis_dilation=" << format_double(gis_dilation) << '\n';
  out << "h_min=" << format_double(h_min) << '\n';
  out << "h_presence=" << format_double(h_presence) << '\n';
  out << "bbox_margin=" << format_double(bbox_margin) << '\n';
  out << "continuations_count_as_sweep=" << (continuations_count_as_sweep ? "true" : "false")
      << '\n';
  out << "profile_spacing=" << format_double(profile_spacing) << '\n';
  out << "cap_margin=" << format_double(cap_margin) << '\n';
  out << "seed=" << seed << '\n';
  out << "zero_time_in_stats=" << (zero_time_in_stats ? "true" : "false") << '\n';
  out << "max_bip_variables=" << max_bip_variables << '\n';
  return out.str();
}

std::pair<TriMesh, std::vector<Polygon2>> load_inputs(const std::string& mesh_path,
                                                      const std::string& gis_path) {
  TriMesh mesh = load_obj(mesh_path);
  if (mesh.empty()) throw Error("input mesh is empty: " + mesh_path);
  std::vector<Polygon2> gis = load_geojson_footprints(gis_path);
  return {std::move(mesh), std::move(gis)};
}

PipelineResult run_pipeline(const TriMesh& mesh, const std::vector<Polygon2>& gis,
                            const PipelineConfig& cfg, const std::string& name) {
  auto stage = [](const std::string& which, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error("stage " + which + ": " + e.what());
    }
  };

  PipelineResult res;
  auto t_begin = std::chrono::steady_clock::now();

  std::vector<SliceContour> contours = stage("extract", [&] {
    return extract_contours(mesh, cfg.slice_interval, cfg.min_wall_step, cfg.min_contour_len);
  });
  contours = stage("align", [&] {
    return align_to_gis(contours, gis, deg(cfg.theta_snap_deg), cfg.dist_snap);
  });
  std::vector<DirectionCluster> clusters = stage("cluster", [&] {
    return cluster_contours(contours, deg(cfg.theta_tol_deg), cfg.dist_tol, cfg.slice_interval);
  });
  res.sweeps = stage("filter", [&] {
    return sweep_edges_from_clusters(clusters, cfg.gamma, gis, cfg.gis_dilation);
  });
  if (res.sweeps.empty()) {
    throw Error("stage filter: no sweep edges survived; lower gamma");
  }

  BBox2 box;
  for (const auto& g : gis) box.expand(g.bbox());
  if (box.empty()) box = mesh.bbox_xy();
  Polygon2 bbox_poly = bbox_polygon(box.dilated(cfg.bbox_margin));

  FractureParams fparams;
  fparams.continuations_count_as_sweep = cfg.continuations_count_as_sweep;
  Arrangement arr = stage("fracture", [&] { return fracture_plane(res.sweeps, bbox_poly, fparams); });
  stage("classify", [&] {
    ClassifyParams cp;
    cp.gis_dilation = cfg.gis_dilation;
    cp.h_min = cfg.h_min;
    cp.h_presence = cfg.h_presence;
    classify_polygons(arr, gis, mesh, cp);
    return 0;
  });
  stage("heightdiff", [&] {
    compute_height_diffs(arr, mesh);
    return 0;
  });

  EnergyParams eparams;
  eparams.alpha = cfg.alpha;
  eparams.beta = cfg.beta;
  eparams.pair_dist = cfg.pair_dist;
  eparams.pair_angle_deg = cfg.pair_angle_deg;
  eparams.max_labels = cfg.max_labels;
  BipBuildOptions bopt;
  bopt.gis_count = (int)gis.size();
  bopt.max_variables = (size_t)cfg.max_bip_variables;
  BipInstance bip = stage("build_bip", [&] { return build_bip(arr, eparams, bopt); });
  res.bip_variables = (long)bip.variable_count();
  res.solve_info = stage("solve", [&] {
    return solve(bip, cfg.solve_mode(), cfg.solver_budget_sec);
  });
  res.labeling = res.solve_info.labeling;

  res.footprints = stage("footprints", [&] {
    return footprints_from_labeling(arr, res.labeling);
  });
  res.arrangement = arr;

  // Per-edge profiles and extrusion, one mass model per footprint.
  double mesh_cap = height_cap_from_mesh(mesh, cfg.cap_margin);
  ProfileFitParams pf;
  pf.spacing = cfg.profile_spacing;
  for (size_t fi = 0; fi < res.footprints.size(); ++fi) {
    const Footprint& fp = res.footprints[fi];
    std::vector<Profile> profiles;
    int edge_id = 0;
    double top = 0.0;
    stage("profiles", [&] {
      for (const auto* ring : fp.poly.rings()) {
        const size_t n = ring->size();
        for (size_t i = 0; i < n; ++i) {
          Segment2 edge{(*ring)[i], (*ring)[(i + 1) % n]};
          Profile prof;
          try {
            auto noisy = extract_noisy_profiles(mesh, edge, pf);
            prof = merge_clean_profile(noisy, pf);
          } catch (const Error&) {
            prof = Profile::vertical(mesh.max_z());  // no mesh at this edge
          }
          prof = simplify_profile(prof, cfg.quality());
          top = std::max(top, prof.top_height());
          res.profiles.push_back({(int)fi, edge_id, prof});
          profiles.push_back(std::move(prof));
          ++edge_id;
        }
      }
      return 0;
    });
    // Profiles truncate at their own top; the mesh-derived cap is the
    // run-away safeguard.
    double h_cap = std::min(std::max(top, 0.5), mesh_cap);
    MassModel model = stage("extrude", [&] {
      return extrude_with_retry(fp.poly, profiles, h_cap, (int)fi);
    });
    int offset = (int)res.combined.vertices.size();
    res.combined.vertices.insert(res.combined.vertices.end(), model.mesh.vertices.begin(),
                                 model.mesh.vertices.end());
    for (const auto& t : model.mesh.triangles) {
      res.combined.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    }
    res.models.push_back(std::move(model));
  }

  res.grid = stage("metrics", [&] { return error_grid(mesh, res.combined, cfg.cell); });
  double err = 0.0;
  try {
    err = mse(res.grid);
  } catch (const Error&) {
    err = std::numeric_limits<double>::quiet_NaN();  // disjoint footprints
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  res.stats.name = name;
  res.stats.sweep_edges = (int)res.sweeps.size();
  res.stats.variables = res.bip_variables;
  res.stats.time_sec = cfg.zero_time_in_stats ? 0.0 : elapsed;
  res.stats.error_m2 = err;
  return res;
}

void export_outputs(const PipelineResult& res, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory: " + out_dir);

  for (size_t i = 0; i < res.models.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "model_%03zu.obj", i);
    save_mass_model_obj((fs::path(out_dir) / name).string(), res.models[i]);
  }
  save_obj((fs::path(out_dir) / "block.obj").string(), res.combined);
  save_stats_csv((fs::path(out_dir) / "stats.csv").string(), {res.stats});
  save_error_grid_csv((fs::path(out_dir) / "error_grid.csv").string(), res.grid);
  save_error_grid_pgm((fs::path(out_dir) / "error_grid.pgm").string(), res.grid);
  save_profiles_csv((fs::path(out_dir) / "profiles.csv").string(), res.profiles);
}

}  // namespace massfit
