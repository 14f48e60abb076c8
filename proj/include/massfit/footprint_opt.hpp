#pragma once

#include <cstdint>
#include <map>

#include "massfit/arrangement.hpp"

namespace massfit {

struct EnergyParams {
  double alpha = 40.0;          // unselected sweep-edge penalty weight
  double beta = 60.0;           // selected non-sweep-edge penalty weight
  double pair_dist = 2.0;       // m, undesirable closeness for edge pairs
  double pair_angle_deg = 30.0; // undesirable sharpness for adjacent pairs
  int max_labels = 0;           // 0 = auto: min(#kept polygons, #gis + 2)

  void validate() const {
    if (alpha <= 0.0 || beta <= 0.0) throw Error("EnergyParams: alpha, beta must be > 0");
    if (pair_dist <= 0.0) throw Error("EnergyParams: pair_dist must be > 0");
    if (pair_angle_deg <= 0.0 || pair_angle_deg >= 90.0) {
      throw Error("EnergyParams: pair_angle must be in (0, 90)");
    }
  }
};

// Kept polygon id -> label (1-based, dense).
using Labeling = std::map<int, int>;

struct EnergyBreakdown {
  double selection_cost = 0.0;  // unselected sweep edges + selected non-sweep edges
  double step_cost = 0.0;       // height discontinuities left unselected
  double pair_cost = 0.0;       // undesirable close/sharp pairs both selected
  double total() const { return selection_cost + step_cost + pair_cost; }
};

// Pairs of arrangement edge indices whose joint selection is penalized:
// non-adjacent edges that come closer than pair_dist without bounding a
// common polygon, and adjacent edges meeting at less than pair_angle.
std::vector<std::pair<int, int>> undesirable_pairs(const Arrangement& arr, const EnergyParams& p);

// s_k per arrangement edge: true iff the side labels differ or one side is
// OUTSIDE. Edges with both sides OUTSIDE are never selected.
std::vector<bool> edge_selection(const Arrangement& arr, const Labeling& lab);

EnergyBreakdown evaluate_energy(const Arrangement& arr, const Labeling& lab,
                                const EnergyParams& p);

// ---------------------------------------------------------------------------
// Binary integer program

struct BipVariable {
  enum Kind { kX, kD, kS, kY };
  Kind kind;
  int a = -1;  // X: polygon id, D/S: edge index, Y: pair index
  int b = -1;  // X: label, D: label
};

struct BipConstraint {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  char relation = '<';                        // '<' => <=, '=' => ==, '>' => >=
  double rhs = 0.0;
};

// Exact linearization of O1 + O2 + O7 over per-polygon label variables.
// Labels are canonicalized (restricted growth) to break permutation symmetry.
struct BipInstance {
  std::vector<BipVariable> variables;
  std::vector<BipConstraint> constraints;
  std::vector<double> objective;  // per-variable coefficients
  double objective_constant = 0.0;

  int label_count = 0;
  std::vector<int> polygon_ids;  // kept polygons in branch order (ascending id)
  double phi = 0.0;

  // Semantic side used by the solvers: interior edges with both sides kept.
  struct EdgeTerm {
    int edge = -1;  // arrangement edge index
    int pa = -1;    // branch-order indices of the two polygons
    int pb = -1;
    double cost_selected = 0.0;    // beta term (+ folded pair constants)
    double cost_unselected = 0.0;  // alpha + heightDiff terms
  };
  std::vector<EdgeTerm> edge_terms;
  std::vector<std::pair<int, int>> pair_terms;  // indices into edge_terms

  std::map<std::pair<int, int>, int> x_index;  // (polygon id, label) -> variable
  std::map<int, int> d_index_base;             // edge index -> first d variable
  std::map<int, int> s_index;                  // edge index -> s variable
  size_t variable_count() const { return variables.size(); }

  // Dense 0/1 assignment helpers (size == variables.size()).
  double objective_value(const std::vector<uint8_t>& assign) const;
  bool feasible(const std::vector<uint8_t>& assign) const;
  std::vector<uint8_t> encode(const Arrangement& arr, const Labeling& lab) const;
  Labeling decode(const std::vector<uint8_t>& assign) const;
};

// Relabels to restricted-growth form (first polygon gets label 1, each new
// label is the next unused index). Leaves the induced selection unchanged.
Labeling canonical_labeling(const Labeling& lab);

struct BipBuildOptions {
  int gis_count = 1;             // anchors the automatic label count
  size_t max_variables = 200000; // guard mirroring the large-block remedy
};

BipInstance build_bip(const Arrangement& arr, const EnergyParams& p,
                      const BipBuildOptions& opt = {});

// ---------------------------------------------------------------------------
// Solvers

enum class SolveMode { kExact, kBranchAndBound };

struct SolveResult {
  Labeling labeling;
  double objective = 0.0;
  bool optimal = false;
  long nodes = 0;
  double seconds = 0.0;
};

// kExact enumerates all labelings up to label permutation (guarded at 2^24
// states); kBranchAndBound runs best-first search on the polygon assignment
// order using the sum of already-determined terms as the lower bound, and
// returns the incumbent when the budget runs out.
SolveResult solve(const BipInstance& bip, SolveMode mode, double budget_seconds = 300.0);

// ---------------------------------------------------------------------------
// Footprint extraction

struct Footprint {
  Polygon2 poly;
  int label = 0;
};

// Joins same-label polygons and traces their boundary rings; collinear
// vertices within 0.5 degrees are merged. Disconnected regions of one label
// yield separate footprints.
std::vector<Footprint> footprints_from_labeling(const Arrangement& arr, const Labeling& lab);

}  // namespace massfit
