#include "massfit/footprint_opt.hpp"

#include <map>
#include <set>

namespace massfit {

namespace {

constexpr double kCollinearTol = 0.5 * kPi / 180.0;

struct BoundaryHe {
  Vec2 from, to;
  bool used = false;
};

using PointKey = std::pair<double, double>;
PointKey key_of(const Vec2& p) { return {p.x, p.y}; }

}  // namespace

std::vector<Footprint> footprints_from_labeling(const Arrangement& arr, const Labeling& lab) {
  std::set<int> labels_used;
  for (const auto& [pid, l] : lab) labels_used.insert(l);

  std::vector<Footprint> out;
  for (int label : labels_used) {
    // Directed boundary half-edges keeping the label region on the left.
    std::vector<BoundaryHe> hes;
    for (const auto& e : arr.edges) {
      bool left_in = e.left != kOutside && lab.at(e.left) == label;
      bool right_in = e.right != kOutside && lab.at(e.right) == label;
      if (left_in && !right_in) hes.push_back({e.segment.a, e.segment.b});
      if (right_in && !left_in) hes.push_back({e.segment.b, e.segment.a});
    }
    std::map<PointKey, std::vector<int>> outgoing;
    for (size_t i = 0; i < hes.size(); ++i) outgoing[key_of(hes[i].from)].push_back((int)i);

    // Trace closed loops; at shared corners take the most clockwise
    // continuation so pinched regions resolve into simple rings.
    std::vector<std::vector<Vec2>> rings;
    for (size_t start = 0; start < hes.size(); ++start) {
      if (hes[start].used) continue;
      std::vector<Vec2> ring;
      int cur = (int)start;
      size_t guard = 0;
      while (true) {
        hes[cur].used = true;
        ring.push_back(hes[cur].from);
        auto it = outgoing.find(key_of(hes[cur].to));
        if (it == outgoing.end()) throw Error("footprints_from_labeling: open boundary");
        Vec2 rev = (hes[cur].from - hes[cur].to).normalized();
        double rev_ang = std::atan2(rev.y, rev.x);
        int next = -1;
        double best_rel = std::numeric_limits<double>::max();
        for (int cand : it->second) {
          if (hes[cand].used && cand != (int)start) continue;
          Vec2 d = (hes[cand].to - hes[cand].from).normalized();
          double rel = rev_ang - std::atan2(d.y, d.x);
          while (rel <= 1e-12) rel += 2.0 * kPi;
          while (rel > 2.0 * kPi) rel -= 2.0 * kPi;
          if (rel < best_rel) {
            best_rel = rel;
            next = cand;
          }
        }
        if (next < 0) throw Error("footprints_from_labeling: dead-end boundary");
        if (next == (int)start) break;
        cur = next;
        if (++guard > hes.size() + 1) throw Error("footprints_from_labeling: tracing loop");
      }
      rings.push_back(merge_collinear(ring, kCollinearTol));
    }

    // Positive rings are outers, negative are holes of the containing outer.
    std::vector<std::vector<Vec2>> outers, holes;
    for (auto& r : rings) {
      (ring_area(r) > 0.0 ? outers : holes).push_back(std::move(r));
    }
    std::vector<Footprint> fps;
    for (auto& o : outers) {
      Footprint fp;
      fp.label = label;
      fp.poly.outer = std::move(o);
      fps.push_back(std::move(fp));
    }
    for (auto& h : holes) {
      // Assign to the smallest containing outer.
      int best = -1;
      double best_area = std::numeric_limits<double>::max();
      for (size_t f = 0; f < fps.size(); ++f) {
        if (!ring_contains(fps[f].poly.outer, h[0])) continue;
        double a = std::abs(ring_area(fps[f].poly.outer));
        if (a < best_area) {
          best_area = a;
          best = (int)f;
        }
      }
      if (best < 0) throw Error("footprints_from_labeling: hole without containing outer");
      fps[best].poly.holes.push_back(std::move(h));
    }
    for (auto& fp : fps) out.push_back(std::move(fp));
  }
  return out;
}

}  // namespace massfit
