#include "massfit/footprint_opt.hpp"

#include <set>

namespace massfit {

namespace {

bool participates(const ArrEdge& e) { return e.left != kOutside || e.right != kOutside; }

bool edges_adjacent(const ArrEdge& a, const ArrEdge& b, Vec2& shared, Vec2& away_a, Vec2& away_b) {
  const double eps = 1e-6;
  const Vec2 a_pts[2] = {a.segment.a, a.segment.b};
  const Vec2 b_pts[2] = {b.segment.a, b.segment.b};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (near(a_pts[i], b_pts[j], eps)) {
        shared = a_pts[i];
        away_a = (a_pts[1 - i] - shared).normalized();
        away_b = (b_pts[1 - j] - shared).normalized();
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::vector<std::pair<int, int>> undesirable_pairs(const Arrangement& arr,
                                                   const EnergyParams& p) {
  std::vector<int> cand;
  for (size_t i = 0; i < arr.edges.size(); ++i) {
    if (participates(arr.edges[i])) cand.push_back((int)i);
  }
  std::vector<std::pair<int, int>> pairs;
  const double angle_tol = p.pair_angle_deg * kPi / 180.0;
  for (size_t ii = 0; ii < cand.size(); ++ii) {
    for (size_t jj = ii + 1; jj < cand.size(); ++jj) {
      const ArrEdge& a = arr.edges[cand[ii]];
      const ArrEdge& b = arr.edges[cand[jj]];
      Vec2 shared, da, db;
      if (edges_adjacent(a, b, shared, da, db)) {
        // Sharp spike: the two edges double back on each other.
        double ang = std::atan2(std::abs(cross(da, db)), dot(da, db));
        if (ang < angle_tol) pairs.push_back({cand[ii], cand[jj]});
        continue;
      }
      // Closeness targets sliver corridors: near-parallel edges facing each
      // other. Edges bounding a common polygon are that cell's own extent,
      // not a defect of the labeling.
      double dir_diff = angle_diff_mod_pi(canonical_angle(a.segment.b - a.segment.a),
                                          canonical_angle(b.segment.b - b.segment.a));
      if (dir_diff >= angle_tol) continue;
      bool common = (a.left != kOutside && (a.left == b.left || a.left == b.right)) ||
                    (a.right != kOutside && (a.right == b.left || a.right == b.right));
      if (common) continue;
      double d = segment_segment_distance(a.segment.a, a.segment.b, b.segment.a, b.segment.b);
      if (d < p.pair_dist) pairs.push_back({cand[ii], cand[jj]});
    }
  }
  return pairs;
}

std::vector<bool> edge_selection(const Arrangement& arr, const Labeling& lab) {
  std::vector<bool> s(arr.edges.size(), false);
  for (size_t i = 0; i < arr.edges.size(); ++i) {
    const ArrEdge& e = arr.edges[i];
    if (e.left == kOutside && e.right == kOutside) continue;
    if (e.left == kOutside || e.right == kOutside) {
      s[i] = true;
      continue;
    }
    auto la = lab.find(e.left);
    auto lb = lab.find(e.right);
    if (la == lab.end() || lb == lab.end()) throw Error("edge_selection: labeling not total");
    s[i] = la->second != lb->second;
  }
  return s;
}

EnergyBreakdown evaluate_energy(const Arrangement& arr, const Labeling& lab,
                                const EnergyParams& p) {
  p.validate();
  int n_kept = arr.kept_count();
  int max_label = p.max_labels > 0 ? p.max_labels : n_kept;
  for (const auto& [pid, l] : lab) {
    if (l < 1 || l > max_label) throw Error("evaluate_energy: label out of range");
  }
  std::vector<bool> s = edge_selection(arr, lab);
  double phi = 0.0;
  for (const auto& e : arr.edges) {
    if (participates(e)) phi += e.length;
  }
  phi *= 0.5;

  EnergyBreakdown out;
  for (size_t i = 0; i < arr.edges.size(); ++i) {
    const ArrEdge& e = arr.edges[i];
    if (!participates(e)) continue;
    if (!s[i] && e.is_sweep) out.selection_cost += p.alpha * e.length;
    if (s[i] && !e.is_sweep) out.selection_cost += p.beta * e.length;
    if (!s[i]) out.step_cost += e.length * e.height_diff;
  }
  for (const auto& [i, j] : undesirable_pairs(arr, p)) {
    if (s[i] && s[j]) out.pair_cost += phi;
  }
  return out;
}

Labeling canonical_labeling(const Labeling& lab) {
  Labeling out;
  std::map<int, int> remap;
  int next = 1;
  for (const auto& [pid, l] : lab) {  // std::map iterates polygon ids ascending
    auto it = remap.find(l);
    if (it == remap.end()) it = remap.emplace(l, next++).first;
    out[pid] = it->second;
  }
  return out;
}

BipInstance build_bip(const Arrangement& arr, const EnergyParams& p,
                      const BipBuildOptions& opt) {
  p.validate();
  if (!arr.classified) throw Error("build_bip: arrangement must be classified first");
  BipInstance bip;
  bip.polygon_ids = arr.kept_ids();
  const int n = (int)bip.polygon_ids.size();
  if (n < 1) throw Error("build_bip: no kept polygons");
  int L = p.max_labels > 0 ? p.max_labels : opt.gis_count + 2;
  L = std::max(1, std::min(L, n));
  bip.label_count = L;

  std::map<int, int> branch_of;  // polygon id -> branch index
  for (int i = 0; i < n; ++i) branch_of[bip.polygon_ids[i]] = i;

  double phi = 0.0;
  for (const auto& e : arr.edges) {
    if (participates(e)) phi += e.length;
  }
  bip.phi = 0.5 * phi;

  // Edge terms and forced constants.
  double solver_constant = 0.0;
  std::map<int, int> term_of_edge;  // arr edge index -> edge_terms index, -2 = forced
  for (size_t ei = 0; ei < arr.edges.size(); ++ei) {
    const ArrEdge& e = arr.edges[ei];
    if (!participates(e)) continue;
    if (e.left == kOutside || e.right == kOutside) {
      // Forced selected: only the beta term of O1 can fire.
      if (!e.is_sweep) solver_constant += p.beta * e.length;
      term_of_edge[(int)ei] = -2;
      continue;
    }
    BipInstance::EdgeTerm t;
    t.edge = (int)ei;
    t.pa = branch_of.at(e.left);
    t.pb = branch_of.at(e.right);
    t.cost_selected = e.is_sweep ? 0.0 : p.beta * e.length;
    t.cost_unselected = (e.is_sweep ? p.alpha * e.length : 0.0) + e.length * e.height_diff;
    term_of_edge[(int)ei] = (int)bip.edge_terms.size();
    bip.edge_terms.push_back(t);
  }

  for (const auto& [i, j] : undesirable_pairs(arr, p)) {
    int ti = term_of_edge.at(i);
    int tj = term_of_edge.at(j);
    if (ti == -2 && tj == -2) {
      solver_constant += bip.phi;  // both forced: constant penalty
    } else if (ti == -2) {
      bip.edge_terms[tj].cost_selected += bip.phi;  // phi * s_j
    } else if (tj == -2) {
      bip.edge_terms[ti].cost_selected += bip.phi;
    } else {
      bip.pair_terms.push_back({ti, tj});
    }
  }

  // Variables. x(p, l) exists for l <= min(branch index + 1, L): restricted
  // growth breaks label permutations without losing any selection pattern.
  auto add_var = [&](BipVariable::Kind k, int a, int b, double obj) {
    bip.variables.push_back({k, a, b});
    bip.objective.push_back(obj);
    return (int)bip.variables.size() - 1;
  };
  for (int i = 0; i < n; ++i) {
    int pid = bip.polygon_ids[i];
    for (int l = 1; l <= std::min(i + 1, L); ++l) {
      bip.x_index[{pid, l}] = add_var(BipVariable::kX, pid, l, 0.0);
    }
  }
  // One label per polygon.
  for (int i = 0; i < n; ++i) {
    BipConstraint c;
    c.relation = '=';
    c.rhs = 1.0;
    for (int l = 1; l <= std::min(i + 1, L); ++l) {
      c.terms.push_back({bip.x_index.at({bip.polygon_ids[i], l}), 1.0});
    }
    bip.constraints.push_back(c);
  }
  // Restricted growth: label l needs some earlier polygon on label l-1.
  for (int i = 0; i < n; ++i) {
    for (int l = 2; l <= std::min(i + 1, L); ++l) {
      BipConstraint c;
      c.relation = '<';
      c.rhs = 0.0;
      c.terms.push_back({bip.x_index.at({bip.polygon_ids[i], l}), 1.0});
      for (int q = 0; q < i; ++q) {
        auto it = bip.x_index.find({bip.polygon_ids[q], l - 1});
        if (it != bip.x_index.end()) c.terms.push_back({it->second, -1.0});
      }
      bip.constraints.push_back(c);
    }
  }

  // Per-edge label-difference indicators and selection variables.
  for (size_t t = 0; t < bip.edge_terms.size(); ++t) {
    const auto& term = bip.edge_terms[t];
    int pid_a = bip.polygon_ids[term.pa];
    int pid_b = bip.polygon_ids[term.pb];
    std::vector<int> d_vars;
    bool first = true;
    for (int l = 1; l <= L; ++l) {
      auto xa = bip.x_index.find({pid_a, l});
      auto xb = bip.x_index.find({pid_b, l});
      if (xa == bip.x_index.end() && xb == bip.x_index.end()) continue;
      int d = add_var(BipVariable::kD, term.edge, l, 0.0);
      if (first) {
        bip.d_index_base[term.edge] = d;
        first = false;
      }
      d_vars.push_back(d);
      // d >= xa - xb, d >= xb - xa, d <= xa + xb, d <= 2 - xa - xb
      auto emit = [&](double ca, double cb, double cd, char rel, double rhs) {
        BipConstraint c;
        c.relation = rel;
        c.rhs = rhs;
        if (xa != bip.x_index.end() && ca != 0.0) c.terms.push_back({xa->second, ca});
        if (xb != bip.x_index.end() && cb != 0.0) c.terms.push_back({xb->second, cb});
        c.terms.push_back({d, cd});
        bip.constraints.push_back(c);
      };
      emit(1.0, -1.0, -1.0, '<', 0.0);   // xa - xb - d <= 0
      emit(-1.0, 1.0, -1.0, '<', 0.0);   // xb - xa - d <= 0
      emit(-1.0, -1.0, 1.0, '<', 0.0);   // d <= xa + xb
      emit(1.0, 1.0, 1.0, '<', 2.0);     // d <= 2 - xa - xb
    }
    int s = add_var(BipVariable::kS, term.edge, -1,
                    term.cost_selected - term.cost_unselected);
    bip.objective_constant += term.cost_unselected;
    bip.s_index[term.edge] = s;
    BipConstraint c;  // 2 s = sum_l d
    c.relation = '=';
    c.rhs = 0.0;
    c.terms.push_back({s, 2.0});
    for (int d : d_vars) c.terms.push_back({d, -1.0});
    bip.constraints.push_back(c);
    if (bip.variables.size() > opt.max_variables) {
      throw Error("build_bip: instance exceeds the variable cap; increase gamma to reduce "
                  "sweep-edge count");
    }
  }

  // Pair products.
  for (size_t pi = 0; pi < bip.pair_terms.size(); ++pi) {
    auto [ti, tj] = bip.pair_terms[pi];
    int si = bip.s_index.at(bip.edge_terms[ti].edge);
    int sj = bip.s_index.at(bip.edge_terms[tj].edge);
    int y = add_var(BipVariable::kY, (int)pi, -1, bip.phi);
    BipConstraint c1;  // y >= si + sj - 1
    c1.relation = '>';
    c1.rhs = -1.0;
    c1.terms = {{y, 1.0}, {si, -1.0}, {sj, -1.0}};
    bip.constraints.push_back(c1);
    BipConstraint c2;  // y <= si
    c2.relation = '<';
    c2.rhs = 0.0;
    c2.terms = {{y, 1.0}, {si, -1.0}};
    bip.constraints.push_back(c2);
    BipConstraint c3;  // y <= sj
    c3.relation = '<';
    c3.rhs = 0.0;
    c3.terms = {{y, 1.0}, {sj, -1.0}};
    bip.constraints.push_back(c3);
  }

  bip.objective_constant += solver_constant;
  if (bip.variables.size() > opt.max_variables) {
    throw Error("build_bip: instance exceeds the variable cap; increase gamma to reduce "
                "sweep-edge count");
  }
  return bip;
}

double BipInstance::objective_value(const std::vector<uint8_t>& assign) const {
  if (assign.size() != variables.size()) throw Error("objective_value: assignment size mismatch");
  double v = objective_constant;
  for (size_t i = 0; i < assign.size(); ++i) {
    if (assign[i]) v += objective[i];
  }
  return v;
}

bool BipInstance::feasible(const std::vector<uint8_t>& assign) const {
  if (assign.size() != variables.size()) return false;
  for (const auto& c : constraints) {
    double lhs = 0.0;
    for (const auto& [var, coef] : c.terms) lhs += coef * (assign[var] ? 1.0 : 0.0);
    const double tol = 1e-9;
    if (c.relation == '<' && lhs > c.rhs + tol) return false;
    if (c.relation == '>' && lhs < c.rhs - tol) return false;
    if (c.relation == '=' && std::abs(lhs - c.rhs) > tol) return false;
  }
  return true;
}

std::vector<uint8_t> BipInstance::encode(const Arrangement& arr, const Labeling& lab) const {
  Labeling canon = canonical_labeling(lab);
  std::vector<uint8_t> assign(variables.size(), 0);
  for (int pid : polygon_ids) {
    auto it = canon.find(pid);
    if (it == canon.end()) throw Error("encode: labeling not total over kept polygons");
    auto xv = x_index.find({pid, it->second});
    if (xv == x_index.end()) throw Error("encode: label outside the restricted-growth range");
    assign[xv->second] = 1;
  }
  // Derived variables take their semantic values.
  std::vector<uint8_t> s_of_term(edge_terms.size(), 0);
  for (size_t t = 0; t < edge_terms.size(); ++t) {
    const auto& term = edge_terms[t];
    const ArrEdge& e = arr.edges[term.edge];
    int la = canon.at(e.left);
    int lb = canon.at(e.right);
    s_of_term[t] = la != lb;
    assign[s_index.at(term.edge)] = s_of_term[t];
  }
  for (size_t v = 0; v < variables.size(); ++v) {
    if (variables[v].kind != BipVariable::kD) continue;
    int edge = variables[v].a;
    int l = variables[v].b;
    const ArrEdge& e = arr.edges[edge];
    int la = canon.at(e.left);
    int lb = canon.at(e.right);
    assign[v] = (la == l) != (lb == l);
  }
  for (size_t v = 0; v < variables.size(); ++v) {
    if (variables[v].kind != BipVariable::kY) continue;
    auto [ti, tj] = pair_terms[variables[v].a];
    assign[v] = s_of_term[ti] && s_of_term[tj];
  }
  return assign;
}

Labeling BipInstance::decode(const std::vector<uint8_t>& assign) const {
  Labeling lab;
  for (const auto& [key, var] : x_index) {
    if (assign[var]) lab[key.first] = key.second;
  }
  if ((int)lab.size() != (int)polygon_ids.size()) throw Error("decode: not a total assignment");
  return lab;
}

}  // namespace massfit
