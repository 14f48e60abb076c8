#include "test_support.hpp"

#include "massfit/pipeline.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

constexpr uint64_t kSeed = 1718;

struct ParamRun {
  size_t footprints;
  int selected_sweep_fragments;
  double selected_non_sweep_length;
};

ParamRun run_terrace(const SceneTruth& t, double alpha, double beta) {
  PipelineConfig cfg = terrace_config();
  cfg.alpha = alpha;
  cfg.beta = beta;
  PipelineResult res =
      run_pipeline(t.noisy_mesh, {Polygon2::rect(0, 0, 18, 8)}, cfg, "terrace");
  auto s = edge_selection(res.arrangement, res.labeling);
  ParamRun out;
  out.footprints = res.footprints.size();
  out.selected_sweep_fragments = 0;
  out.selected_non_sweep_length = 0.0;
  for (size_t i = 0; i < res.arrangement.edges.size(); ++i) {
    const ArrEdge& e = res.arrangement.edges[i];
    if (e.left == kOutside && e.right == kOutside) continue;
    if (e.left == kOutside || e.right == kOutside) continue;  // forced, constant
    if (s[i] && e.in_sweep_extent) ++out.selected_sweep_fragments;
    if (s[i] && !e.is_sweep) out.selected_non_sweep_length += e.length;
  }
  return out;
}

}  // namespace

TEST_CASE("alpha/beta drive over- and under-segmentation on the terrace") {
  SceneTruth t = synth_generate(terrace_jog_scene(), kSeed);
  ParamRun over = run_terrace(t, 90.0, 10.0);
  ParamRun mid = run_terrace(t, 40.0, 60.0);
  ParamRun under = run_terrace(t, 10.0, 90.0);
  CHECK(over.footprints >= mid.footprints);
  CHECK(mid.footprints >= under.footprints);
  CHECK(mid.footprints == 3);  // the true house count
  CHECK(over.footprints == 4);
  CHECK(under.footprints == 2);
}

TEST_CASE("selected sweep fragments are non-decreasing in alpha") {
  SceneTruth t = synth_generate(terrace_jog_scene(), kSeed);
  ParamRun lo = run_terrace(t, 10.0, 60.0);
  ParamRun mid = run_terrace(t, 40.0, 60.0);
  ParamRun hi = run_terrace(t, 90.0, 60.0);
  CHECK(lo.selected_sweep_fragments <= mid.selected_sweep_fragments);
  CHECK(mid.selected_sweep_fragments <= hi.selected_sweep_fragments);
}

TEST_CASE("selected non-sweep length is non-increasing in beta") {
  SceneTruth t = synth_generate(terrace_jog_scene(), kSeed);
  ParamRun lo = run_terrace(t, 40.0, 10.0);
  ParamRun mid = run_terrace(t, 40.0, 60.0);
  ParamRun hi = run_terrace(t, 40.0, 90.0);
  CHECK(lo.selected_non_sweep_length >= mid.selected_non_sweep_length - 1e-9);
  CHECK(mid.selected_non_sweep_length >= hi.selected_non_sweep_length - 1e-9);
}
