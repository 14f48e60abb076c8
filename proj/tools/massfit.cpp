#include <sys/file.h>
#include <sys/stat.h>
#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "massfit/pipeline.hpp"

namespace {

using namespace massfit;

// One CLI instance per output directory.
class DirLock {
 public:
  explicit DirLock(const std::string& dir) {
    std::filesystem::create_directories(dir);
    path_ = (std::filesystem::path(dir) / "massfit.lock").string();
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      throw Error("output directory is locked by another massfit instance: " + dir);
    }
  }
  ~DirLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }

 private:
  int fd_ = -1;
  std::string path_;
};

PipelineConfig make_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  PipelineConfig cfg;
  if (!config_path.empty()) cfg = PipelineConfig::parse(read_text_file(config_path));
  for (const auto& kv : overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_reconstruct(const std::string& mesh_path, const std::string& gis_path,
                    const std::string& out_dir, const PipelineConfig& cfg) {
  TriMesh mesh;
  std::vector<Polygon2> gis;
  try {
    std::tie(mesh, gis) = load_inputs(mesh_path, gis_path);
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  try {
    DirLock lock(out_dir);
    PipelineResult res = run_pipeline(mesh, gis, cfg,
                                      std::filesystem::path(mesh_path).stem().string());
    export_outputs(res, out_dir);
    write_text_file((std::filesystem::path(out_dir) / "config.txt").string(), cfg.serialize());
    std::cout << "footprints: " << res.footprints.size() << "\n"
              << "sweep_edges: " << res.stats.sweep_edges << "\n"
              << "variables: " << res.stats.variables << "\n"
              << "mse_m2: " << format_double(res.stats.error_m2) << "\n"
              << "outputs: " << out_dir << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_synth(const std::string& scene_path, const std::string& out_dir, uint64_t seed) {
  SceneSpec spec;
  try {
    spec = scene_from_json(read_text_file(scene_path));
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  try {
    DirLock lock(out_dir);
    SceneTruth truth = synth_generate(spec, seed);
    namespace fs = std::filesystem;
    save_obj((fs::path(out_dir) / "mesh.obj").string(), truth.noisy_mesh);
    save_obj((fs::path(out_dir) / "clean.obj").string(), truth.clean_mesh);
    save_geojson_footprints((fs::path(out_dir) / "gis.geojson").string(), truth.gis);
    write_text_file((fs::path(out_dir) / "scene.json").string(), scene_to_json(spec));
    std::cout << "buildings: " << truth.clean_models.size() << "\n"
              << "noisy triangles: " << truth.noisy_mesh.triangles.size() << "\n"
              << "outputs: " << out_dir << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "synth error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_stats(const std::string& mesh_path, const std::string& gis_path,
              const PipelineConfig& cfg) {
  TriMesh mesh;
  std::vector<Polygon2> gis;
  try {
    std::tie(mesh, gis) = load_inputs(mesh_path, gis_path);
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  try {
    PipelineResult res = run_pipeline(mesh, gis, cfg,
                                      std::filesystem::path(mesh_path).stem().string());
    std::cout << "name,sweep_edges,variables,time_sec,error_m2\n"
              << res.stats.name << ',' << res.stats.sweep_edges << ',' << res.stats.variables
              << ',' << format_double(res.stats.time_sec) << ','
              << format_double(res.stats.error_m2) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_sweep_params(const std::string& mesh_path, const std::string& gis_path,
                     const std::string& param, const std::vector<std::string>& values,
                     const std::string& out_csv, const PipelineConfig& base) {
  TriMesh mesh;
  std::vector<Polygon2> gis;
  try {
    std::tie(mesh, gis) = load_inputs(mesh_path, gis_path);
    if (param != "alpha_beta" && param != "gamma") {
      throw Error("--param must be alpha_beta or gamma");
    }
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  }
  try {
    std::ostringstream out;
    out << "param,value,footprints,sweep_edges,variables,time_sec,error_m2\n";
    for (const auto& v : values) {
      PipelineConfig cfg = base;
      std::string label = v;
      if (param == "alpha_beta") {
        size_t colon = v.find(':');
        if (colon == std::string::npos) throw Error("alpha_beta values look like 40:60");
        cfg.alpha = std::stod(v.substr(0, colon));
        cfg.beta = std::stod(v.substr(colon + 1));
      } else {
        cfg.gamma = std::stod(v);
      }
      PipelineResult res = run_pipeline(mesh, gis, cfg, param + "=" + label);
      out << param << ',' << label << ',' << res.footprints.size() << ','
          << res.stats.sweep_edges << ',' << res.stats.variables << ','
          << format_double(res.stats.time_sec) << ',' << format_double(res.stats.error_m2)
          << '\n';
    }
    if (out_csv.empty()) {
      std::cout << out.str();
    } else {
      write_text_file(out_csv, out.str());
      std::cout << "wrote " << out_csv << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"massfit: building mass models from a photogrammetric mesh + GIS footprints"};
  app.require_subcommand(1);

  std::string mesh_path, gis_path, out_dir, config_path, scene_path, param, out_csv;
  std::vector<std::string> overrides, values;
  uint64_t seed = 1;

  auto add_io = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--mesh", mesh_path, "input mesh OBJ")->required();
    cmd->add_option("--gis", gis_path, "GIS footprints GeoJSON")->required();
    if (with_out) cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--config", config_path, "config file (key=value lines)");
    cmd->add_option("--set", overrides, "config override key=value (repeatable)");
  };

  CLI::App* rec = app.add_subcommand("reconstruct", "run the full reconstruction");
  add_io(rec, true);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scene");
  synth->add_option("--scene", scene_path, "scene description JSON")->required();
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--seed", seed, "random seed");

  CLI::App* stats = app.add_subcommand("stats", "run and print the statistics row");
  add_io(stats, false);

  CLI::App* sweep = app.add_subcommand("sweep-params", "run a parameter grid");
  add_io(sweep, false);
  sweep->add_option("--param", param, "alpha_beta or gamma")->required();
  sweep->add_option("--values", values, "values, e.g. 40:60 90:10 or 50 30 10")->required();
  sweep->add_option("--out-csv", out_csv, "write the table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = make_config(config_path, overrides);
    if (rec->parsed()) return cmd_reconstruct(mesh_path, gis_path, out_dir, cfg);
    if (synth->parsed()) return cmd_synth(scene_path, out_dir, seed);
    if (stats->parsed()) return cmd_stats(mesh_path, gis_path, cfg);
    if (sweep->parsed()) return cmd_sweep_params(mesh_path, gis_path, param, values, out_csv, cfg);
  } catch (const massfit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
