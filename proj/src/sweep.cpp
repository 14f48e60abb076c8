#include "massfit/sweep.hpp"

#include "massfit/parallel.hpp"

#include <map>

#include <mutex>

namespace massfit {

double line_offset(const Vec2& p, double theta) {
  Vec2 n = dir_from_angle(theta).perp();
  return dot(n, p);
}

namespace {

// Joins slice segments into polylines at shared endpoints (1e-4 m snap) and
// straightens them with Douglas-Peucker. Raw photogrammetric slice pieces are
// a few tens of centimeters and carry useless directions; the chained lines
// are what clustering needs.
std::vector<std::vector<Vec2>> chain_slice_segments(const std::vector<Segment2>& segs) {
  using Key = std::pair<long long, long long>;
  auto key_of = [](const Vec2& p) {
    return Key{(long long)std::llround(p.x / kSnapEps), (long long)std::llround(p.y / kSnapEps)};
  };
  std::map<Key, std::vector<std::pair<int, int>>> at;  // (segment, end)
  for (size_t i = 0; i < segs.size(); ++i) {
    at[key_of(segs[i].a)].push_back({(int)i, 0});
    at[key_of(segs[i].b)].push_back({(int)i, 1});
  }
  std::vector<char> used(segs.size(), 0);
  std::vector<std::vector<Vec2>> chains;

  auto walk = [&](int seg, int start_end) {
    std::vector<Vec2> chain;
    Vec2 cur = start_end == 0 ? segs[seg].a : segs[seg].b;
    chain.push_back(cur);
    int s = seg;
    int far_end = 1 - start_end;
    while (true) {
      used[s] = 1;
      Vec2 far = far_end == 0 ? segs[s].a : segs[s].b;
      chain.push_back(far);
      auto& incident = at[key_of(far)];
      if (incident.size() != 2) break;  // open end or junction
      int next = -1, next_end = -1;
      for (auto [cand, end] : incident) {
        if (cand != s) {
          next = cand;
          next_end = end;
        }
      }
      if (next < 0 || used[next]) break;
      s = next;
      far_end = 1 - next_end;
    }
    return chain;
  };

  // Open chains first (endpoints with degree != 2), then closed loops.
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < segs.size(); ++i) {
      if (used[i]) continue;
      int start_end = -1;
      if (pass == 0) {
        if (at[key_of(segs[i].a)].size() != 2) {
          start_end = 0;
        } else if (at[key_of(segs[i].b)].size() != 2) {
          start_end = 1;
        } else {
          continue;
        }
      } else {
        start_end = 0;
      }
      chains.push_back(walk((int)i, start_end));
    }
  }

  // Bridge small gaps (dropped faces) between chains that continue in
  // roughly the same direction.
  const double gap_tol = 0.5;
  auto tangent_out = [](const std::vector<Vec2>& c, bool at_back) {
    size_t n = c.size();
    Vec2 t = at_back ? c[n - 1] - c[n - 2] : c[0] - c[1];
    return t.normalized();
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < chains.size() && !changed; ++i) {
      if (chains[i].size() < 2) continue;
      for (size_t j = i + 1; j < chains.size() && !changed; ++j) {
        if (chains[j].size() < 2) continue;
        for (int ei = 0; ei < 2 && !changed; ++ei) {
          for (int ej = 0; ej < 2 && !changed; ++ej) {
            const Vec2& pi = ei ? chains[i].back() : chains[i].front();
            const Vec2& pj = ej ? chains[j].back() : chains[j].front();
            if (dist(pi, pj) > gap_tol) continue;
            Vec2 ti = tangent_out(chains[i], ei);
            Vec2 tj = tangent_out(chains[j], ej);
            if (dot(ti, tj * -1.0) < 0.3) continue;  // must continue, not bend back
            std::vector<Vec2> joined;
            if (ei == 1) {
              joined = chains[i];
            } else {
              joined.assign(chains[i].rbegin(), chains[i].rend());
            }
            if (ej == 0) {
              joined.insert(joined.end(), chains[j].begin(), chains[j].end());
            } else {
              joined.insert(joined.end(), chains[j].rbegin(), chains[j].rend());
            }
            chains[i] = std::move(joined);
            chains.erase(chains.begin() + (long)j);
            changed = true;
          }
        }
      }
    }
  }

  // Closed loops: rotate to the lexicographically smallest point so the
  // result does not depend on which segment seeded the walk.
  for (auto& chain : chains) {
    if (chain.size() > 3 && near(chain.front(), chain.back(), 2.0 * kSnapEps)) {
      chain.pop_back();
      size_t best = 0;
      for (size_t k = 1; k < chain.size(); ++k) {
        if (chain[k].x < chain[best].x ||
            (chain[k].x == chain[best].x && chain[k].y < chain[best].y)) {
          best = k;
        }
      }
      std::rotate(chain.begin(), chain.begin() + (long)best, chain.end());
      chain.push_back(chain.front());
    }
  }
  return chains;
}

}  // namespace

std::vector<SliceContour> extract_contours(const TriMesh& mesh, double interval,
                                           double min_height_step, double min_length) {
  if (interval <= 0.0) throw Error("extract_contours: interval must be positive");
  std::vector<SliceContour> out;
  if (mesh.empty()) return out;
  double top = mesh.max_z();
  int levels = (int)std::floor((top - 1e-9) / interval);
  if (levels <= 0) return out;
  const double straighten_tol = 0.12;  // m, above the noise floor, below wall offsets
  const double probe = 0.3;            // m, height-step probe offset

  HeightField hf(mesh);
  // Median height step across the contour; walls step, roof streaks do not.
  auto is_wall_evidence = [&](const Segment2& s) {
    if (min_height_step <= 0.0) return true;
    Vec2 n = s.dir().perp();
    std::vector<double> steps;
    for (double t : {0.25, 0.5, 0.75}) {
      Vec2 p = s.a + (s.b - s.a) * t;
      auto hl = hf.query(p + n * probe);
      auto hr = hf.query(p - n * probe);
      steps.push_back(std::abs((hl ? *hl : 0.0) - (hr ? *hr : 0.0)));
    }
    std::sort(steps.begin(), steps.end());
    return steps[1] >= min_height_step;
  };

  std::vector<std::vector<SliceContour>> per_level(levels);
  parallel_for((size_t)levels, [&](size_t li) {
    double z = interval * (double)(li + 1);
    auto segs = slice_mesh_horizontal(mesh, z);
    for (const auto& chain : chain_slice_segments(segs)) {
      auto simple = douglas_peucker(chain, straighten_tol);
      for (size_t k = 0; k + 1 < simple.size(); ++k) {
        SliceContour c;
        c.segment = Segment2{simple[k], simple[k + 1]};
        if (c.segment.length() < std::max(kLengthEps, min_length)) continue;
        if (!is_wall_evidence(c.segment)) continue;
        c.level = z;
        c.length = c.segment.length();
        per_level[li].push_back(c);
      }
    }
  });
  for (auto& lv : per_level) {
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

std::vector<SliceContour> align_to_gis(const std::vector<SliceContour>& contours,
                                       const std::vector<Polygon2>& gis, double theta_snap,
                                       double dist_snap) {
  struct GisEdge {
    Vec2 a, b;
    double angle;
  };
  std::vector<GisEdge> edges;
  for (const auto& poly : gis) {
    for (const auto* ring : poly.rings()) {
      const size_t n = ring->size();
      for (size_t i = 0; i < n; ++i) {
        Vec2 a = (*ring)[i];
        Vec2 b = (*ring)[(i + 1) % n];
        if (dist(a, b) < kLengthEps) continue;
        edges.push_back({a, b, canonical_angle(b - a)});
      }
    }
  }
  if (edges.empty()) return contours;

  std::vector<SliceContour> out = contours;
  for (auto& c : out) {
    double cang = canonical_angle(c.segment.b - c.segment.a);
    Vec2 mid = c.segment.midpoint();
    double best_score = std::numeric_limits<double>::max();
    const GisEdge* best = nullptr;
    for (const auto& e : edges) {
      double dang = angle_diff_mod_pi(cang, e.angle);
      if (dang > theta_snap) continue;
      // Distance from the GIS edge to the contour's supporting line.
      Vec2 dir = dir_from_angle(cang);
      Vec2 n = dir.perp();
      double da = std::abs(dot(n, e.a - mid));
      double db = std::abs(dot(n, e.b - mid));
      double line_dist = (dot(n, e.a - mid) * dot(n, e.b - mid) <= 0.0) ? 0.0 : std::min(da, db);
      if (line_dist > dist_snap) continue;
      double score = dang + line_dist / dist_snap * 1e-3;
      if (score < best_score) {
        best_score = score;
        best = &e;
      }
    }
    if (best) {
      double half = 0.5 * c.length;
      Vec2 d = dir_from_angle(best->angle);
      c.segment.a = mid - d * half;
      c.segment.b = mid + d * half;
    }
  }
  return out;
}

namespace {

// Offset difference with the mod-pi direction flip taken into account.
double offset_in_frame(const SliceContour& c, double frame_angle) {
  return line_offset(c.segment.midpoint(), frame_angle);
}

}  // namespace

std::vector<DirectionCluster> cluster_contours(const std::vector<SliceContour>& contours,
                                               double theta_tol, double dist_tol,
                                               double slice_interval) {
  std::vector<SliceContour> sorted = contours;
  std::sort(sorted.begin(), sorted.end(), [](const SliceContour& a, const SliceContour& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.length != b.length) return a.length > b.length;
    Vec2 ma = a.segment.midpoint(), mb = b.segment.midpoint();
    if (ma.x != mb.x) return ma.x < mb.x;
    return ma.y < mb.y;
  });

  std::vector<DirectionCluster> clusters;
  // Running sums for the length-weighted circular mean over 2*theta.
  std::vector<double> sum_cos, sum_sin, sum_w_off, sum_len;

  for (const auto& c : sorted) {
    if (c.length < kLengthEps) continue;
    double ang = canonical_angle(c.segment.b - c.segment.a);
    int found = -1;
    for (size_t k = 0; k < clusters.size(); ++k) {
      if (angle_diff_mod_pi(ang, clusters[k].direction) > theta_tol) continue;
      double off = offset_in_frame(c, clusters[k].direction);
      if (std::abs(off - clusters[k].offset) > dist_tol) continue;
      found = (int)k;
      break;
    }
    if (found < 0) {
      DirectionCluster nc;
      nc.direction = ang;
      nc.offset = offset_in_frame(c, ang);
      clusters.push_back(nc);
      sum_cos.push_back(0.0);
      sum_sin.push_back(0.0);
      sum_w_off.push_back(0.0);
      sum_len.push_back(0.0);
      found = (int)clusters.size() - 1;
    }
    DirectionCluster& cl = clusters[found];
    cl.members.push_back(c);
    sum_cos[found] += c.length * std::cos(2.0 * ang);
    sum_sin[found] += c.length * std::sin(2.0 * ang);
    sum_len[found] += c.length;
    double mean_ang = 0.5 * std::atan2(sum_sin[found], sum_cos[found]);
    while (mean_ang < 0.0) mean_ang += kPi;
    while (mean_ang >= kPi) mean_ang -= kPi;
    cl.direction = mean_ang;
    // Re-derive the offset mean in the updated frame.
    double off_sum = 0.0;
    for (const auto& m : cl.members) off_sum += m.length * offset_in_frame(m, cl.direction);
    cl.offset = off_sum / sum_len[found];
  }

  // Greedy seeding can split one wall when early means drift; merge clusters
  // that ended up within tolerance of each other.
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < clusters.size() && !merged; ++i) {
      for (size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        if (angle_diff_mod_pi(clusters[i].direction, clusters[j].direction) > theta_tol) continue;
        double off_j = 0.0, len_j = 0.0;
        for (const auto& m : clusters[j].members) {
          off_j += m.length * offset_in_frame(m, clusters[i].direction);
          len_j += m.length;
        }
        if (std::abs(off_j / len_j - clusters[i].offset) > dist_tol) continue;
        for (const auto& m : clusters[j].members) {
          clusters[i].members.push_back(m);
          sum_cos[i] += m.length * std::cos(2.0 * canonical_angle(m.segment.b - m.segment.a));
          sum_sin[i] += m.length * std::sin(2.0 * canonical_angle(m.segment.b - m.segment.a));
          sum_len[i] += m.length;
        }
        double mean_ang = 0.5 * std::atan2(sum_sin[i], sum_cos[i]);
        while (mean_ang < 0.0) mean_ang += kPi;
        while (mean_ang >= kPi) mean_ang -= kPi;
        clusters[i].direction = mean_ang;
        double off_sum = 0.0;
        for (const auto& m : clusters[i].members) {
          off_sum += m.length * offset_in_frame(m, clusters[i].direction);
        }
        clusters[i].offset = off_sum / sum_len[i];
        clusters.erase(clusters.begin() + (long)j);
        sum_cos.erase(sum_cos.begin() + (long)j);
        sum_sin.erase(sum_sin.begin() + (long)j);
        sum_len.erase(sum_len.begin() + (long)j);
        merged = true;
      }
    }
  }

  for (size_t k = 0; k < clusters.size(); ++k) {
    double area = 0.0;
    for (const auto& m : clusters[k].members) area += m.length * slice_interval;
    clusters[k].supported_area = area;
    clusters[k].id = (int)k;
  }
  return clusters;
}

std::vector<SweepEdge> sweep_edges_from_clusters(const std::vector<DirectionCluster>& clusters,
                                                 double gamma,
                                                 const std::vector<Polygon2>& gis,
                                                 double clip_margin) {
  if (gamma < 0.0) throw Error("sweep_edges_from_clusters: gamma must be >= 0");
  std::vector<SweepEdge> out;
  for (const auto& cl : clusters) {
    if (cl.supported_area < gamma) continue;
    Vec2 d = dir_from_angle(cl.direction);
    Vec2 n = d.perp();
    Vec2 base = n * cl.offset;  // point on the cluster line
    // Length-weighted 2%..98% extent of the member projections: stray roof
    // fragments must not stretch the sweep beyond the wall it traces.
    std::vector<std::pair<double, double>> events;  // (position, +-1)
    double total_len = 0.0;
    for (const auto& m : cl.members) {
      double ta = dot(d, m.segment.a - base);
      double tb = dot(d, m.segment.b - base);
      if (ta > tb) std::swap(ta, tb);
      events.push_back({ta, 1.0});
      events.push_back({tb, -1.0});
      total_len += tb - ta;
    }
    std::sort(events.begin(), events.end());
    auto mass_quantile = [&](double q) {
      double target = q * total_len;
      double mass = 0.0;
      double depth = 0.0;
      for (size_t k = 0; k + 1 < events.size(); ++k) {
        depth += events[k].second;
        double span = events[k + 1].first - events[k].first;
        double seg_mass = depth * span;
        if (mass + seg_mass >= target && depth > 0.0) {
          return events[k].first + (target - mass) / depth;
        }
        mass += seg_mass;
      }
      return events.back().first;
    };
    double lo = mass_quantile(0.02);
    double hi = mass_quantile(0.98);
    if (!gis.empty()) {
      // 1D hull of the GIS outlines projected onto the cluster line, dilated.
      double glo = std::numeric_limits<double>::max();
      double ghi = std::numeric_limits<double>::lowest();
      for (const auto& poly : gis) {
        for (const auto& p : poly.outer) {
          double t = dot(d, p - base);
          glo = std::min(glo, t);
          ghi = std::max(ghi, t);
        }
      }
      lo = std::max(lo, glo - clip_margin);
      hi = std::min(hi, ghi + clip_margin);
    }
    if (hi - lo < kLengthEps) continue;
    SweepEdge e;
    e.segment = Segment2{base + d * lo, base + d * hi};
    e.supported_area = cl.supported_area;
    e.cluster_id = cl.id;
    out.push_back(e);
  }
  return out;
}

}  // namespace massfit
