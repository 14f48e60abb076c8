#include "massfit/footprint_opt.hpp"

#include <chrono>
#include <functional>
#include <queue>

namespace massfit {

namespace {

using Clock = std::chrono::steady_clock;

struct Core {
  const BipInstance* bip;
  int n = 0;
  int L = 1;
  double constant = 0.0;  // forced-edge and forced-pair contributions
  std::vector<std::vector<int>> terms_by_depth;
  std::vector<std::vector<int>> pairs_by_depth;

  explicit Core(const BipInstance& b) : bip(&b) {
    n = (int)b.polygon_ids.size();
    L = b.label_count;
    double unsel_sum = 0.0;
    for (const auto& t : b.edge_terms) unsel_sum += t.cost_unselected;
    constant = b.objective_constant - unsel_sum;
    terms_by_depth.resize(n);
    pairs_by_depth.resize(n);
    for (size_t t = 0; t < b.edge_terms.size(); ++t) {
      terms_by_depth[std::max(b.edge_terms[t].pa, b.edge_terms[t].pb)].push_back((int)t);
    }
    for (size_t p = 0; p < b.pair_terms.size(); ++p) {
      auto [ti, tj] = b.pair_terms[p];
      int d = std::max(std::max(b.edge_terms[ti].pa, b.edge_terms[ti].pb),
                       std::max(b.edge_terms[tj].pa, b.edge_terms[tj].pb));
      pairs_by_depth[d].push_back((int)p);
    }
  }

  bool term_selected(int t, const std::vector<int>& labels, int depth, int l) const {
    const auto& term = bip->edge_terms[t];
    int la = term.pa == depth ? l : labels[term.pa];
    int lb = term.pb == depth ? l : labels[term.pb];
    return la != lb;
  }

  // Objective delta of assigning label l at `depth`, all earlier labels fixed.
  double delta(int depth, int l, const std::vector<int>& labels) const {
    double d = 0.0;
    for (int t : terms_by_depth[depth]) {
      const auto& term = bip->edge_terms[t];
      d += term_selected(t, labels, depth, l) ? term.cost_selected : term.cost_unselected;
    }
    for (int p : pairs_by_depth[depth]) {
      auto [ti, tj] = bip->pair_terms[p];
      if (term_selected(ti, labels, depth, l) && term_selected(tj, labels, depth, l)) {
        d += bip->phi;
      }
    }
    return d;
  }

  Labeling to_labeling(const std::vector<int>& labels) const {
    Labeling lab;
    for (int i = 0; i < n; ++i) lab[bip->polygon_ids[i]] = labels[i];
    return lab;
  }
};

// Number of restricted-growth labelings with at most L labels.
double rgs_state_count(int n, int L) {
  std::vector<double> cur(L + 2, 1.0), next(L + 2, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    for (int m = 0; m <= L; ++m) {
      double reuse = std::min(m, L) * cur[m];
      double fresh = m < L ? cur[m + 1] : 0.0;
      next[m] = reuse + fresh;
    }
    std::swap(cur, next);
  }
  return cur[0];
}

SolveResult solve_exact(const Core& core, double budget_seconds) {
  if (rgs_state_count(core.n, core.L) > 16777216.0) {
    throw Error("solve: exact mode limited to 2^24 enumerable labelings; use branch_and_bound");
  }
  auto t0 = Clock::now();
  SolveResult res;
  std::vector<int> labels(core.n, 0), best_labels;
  double best = std::numeric_limits<double>::max();

  std::function<void(int, int, double)> recurse = [&](int depth, int max_used, double acc) {
    ++res.nodes;
    if (depth == core.n) {
      if (acc < best - 1e-12) {
        best = acc;
        best_labels = labels;
      }
      return;
    }
    for (int l = 1; l <= std::min(max_used + 1, core.L); ++l) {
      labels[depth] = l;
      recurse(depth + 1, std::max(max_used, l), acc + core.delta(depth, l, labels));
    }
    labels[depth] = 0;
  };
  recurse(0, 0, core.constant);

  res.labeling = core.to_labeling(best_labels);
  res.objective = best;
  res.optimal = true;
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  (void)budget_seconds;
  return res;
}

SolveResult solve_branch_and_bound(const Core& core, double budget_seconds) {
  auto t0 = Clock::now();
  SolveResult res;

  // Greedy dive seeds the incumbent so a budget hit always has an answer.
  std::vector<int> greedy(core.n, 0);
  double greedy_obj = core.constant;
  int greedy_used = 0;
  for (int depth = 0; depth < core.n; ++depth) {
    double best_d = std::numeric_limits<double>::max();
    int best_l = 1;
    for (int l = 1; l <= std::min(greedy_used + 1, core.L); ++l) {
      double d = core.delta(depth, l, greedy);
      if (d < best_d) {
        best_d = d;
        best_l = l;
      }
    }
    greedy[depth] = best_l;
    greedy_used = std::max(greedy_used, best_l);
    greedy_obj += best_d;
  }
  std::vector<int> inc_labels = greedy;
  double inc_obj = greedy_obj;

  struct Node {
    double bound;
    long seq;
    int depth;
    int max_used;
    std::vector<int> labels;
  };
  struct Cmp {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.seq > b.seq;  // deterministic tie break: earlier nodes first
    }
  };
  std::priority_queue<Node, std::vector<Node>, Cmp> queue;
  long seq = 0;
  queue.push({core.constant, seq++, 0, 0, std::vector<int>(core.n, 0)});

  bool exhausted_budget = false;
  const long node_cap = 50000000;
  while (!queue.empty()) {
    if ((res.nodes & 1023) == 0 &&
        std::chrono::duration<double>(Clock::now() - t0).count() > budget_seconds) {
      exhausted_budget = true;
      break;
    }
    Node node = queue.top();
    queue.pop();
    ++res.nodes;
    // Best-first: once the cheapest open node cannot beat the incumbent,
    // nothing can.
    if (node.bound >= inc_obj - 1e-12) break;
    if (node.depth == core.n) {
      inc_obj = node.bound;
      inc_labels = node.labels;
      break;
    }
    if (res.nodes > node_cap) {
      exhausted_budget = true;
      break;
    }
    for (int l = 1; l <= std::min(node.max_used + 1, core.L); ++l) {
      Node child = node;
      child.seq = seq++;
      child.labels[node.depth] = l;
      child.bound = node.bound + core.delta(node.depth, l, node.labels);
      child.depth = node.depth + 1;
      child.max_used = std::max(node.max_used, l);
      if (child.bound >= inc_obj - 1e-12) continue;
      if (child.depth == core.n) {
        inc_obj = child.bound;
        inc_labels = child.labels;
        continue;
      }
      queue.push(std::move(child));
    }
  }

  res.labeling = core.to_labeling(inc_labels);
  res.objective = inc_obj;
  res.optimal = !exhausted_budget;
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

}  // namespace

SolveResult solve(const BipInstance& bip, SolveMode mode, double budget_seconds) {
  if (budget_seconds <= 0.0) throw Error("solve: budget must be positive");
  Core core(bip);
  if (core.n < 1) throw Error("solve: empty instance");
  return mode == SolveMode::kExact ? solve_exact(core, budget_seconds)
                                   : solve_branch_and_bound(core, budget_seconds);
}

}  // namespace massfit
