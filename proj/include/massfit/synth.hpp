#pragma once

#include "massfit/extrude.hpp"

namespace massfit {

enum class RoofType { kFlat, kGable, kHip, kMansard };

struct BuildingSpec {
  Polygon2 footprint;
  double wall_height = 3.0;
  RoofType roof = RoofType::kFlat;
  double ridge_height = 0.0;          // top height for gable/hip/mansard
  double mansard_break_offset = 1.0;  // inward offset of the mansard pitch break
  double mansard_break_height = 0.0;  // height of the pitch break
};

struct SceneSpec {
  std::vector<BuildingSpec> buildings;
  double sigma = 0.0;        // m, Gaussian vertex jitter
  double dropout = 0.0;      // fraction of faces removed
  double target_edge = 0.3;  // m, subdivision target for the sampled mesh
};

// Ground truth kept alongside the degraded input mesh.
struct SceneTruth {
  SceneSpec spec;
  uint64_t seed = 0;
  std::vector<Polygon2> gis;  // footprints, also the pipeline's GIS input
  std::vector<MassModel> clean_models;
  TriMesh clean_mesh;
  TriMesh noisy_mesh;
};

// Builds the clean models through the extrusion module, resamples them to
// ~target_edge triangles, jitters and drops faces. Deterministic per seed.
SceneTruth synth_generate(const SceneSpec& spec, uint64_t seed);

// Per-edge truth profiles for a building (same indexing as extrude()).
std::vector<Profile> building_profiles(const BuildingSpec& b);

SceneSpec scene_from_json(const std::string& json_text);
std::string scene_to_json(const SceneSpec& spec);

// Deterministic RNG helpers (explicit Box-Muller; identical streams per seed).
struct SynthRng {
  explicit SynthRng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next_u64();
  double uniform();  // [0, 1)
  double gauss();

 private:
  uint64_t state;
  bool have_spare = false;
  double spare = 0.0;
};

}  // namespace massfit
