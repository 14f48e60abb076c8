#include "massfit/arrangement.hpp"

#include <map>

namespace massfit {

namespace {

constexpr double kVertexSnap = 1e-6;

struct Line {
  double theta = 0.0;   // [0, pi)
  double offset = 0.0;  // n . x = offset with n = perp(dir(theta))
  // Sweep extents on this line as 1D intervals with originating sweep ids.
  struct Extent {
    double lo, hi;
    int sweep_id;
  };
  std::vector<Extent> extents;
  Vec2 dir() const { return dir_from_angle(theta); }
  Vec2 normal() const { return dir().perp(); }
  Vec2 base() const { return normal() * offset; }
};

// Snapping vertex pool: merges points within kVertexSnap.
class VertexPool {
 public:
  int insert(const Vec2& p) {
    long long gx = (long long)std::floor(p.x / kVertexSnap);
    long long gy = (long long)std::floor(p.y / kVertexSnap);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find({gx + dx, gy + dy});
        if (it == grid_.end()) continue;
        for (int idx : it->second) {
          if (near(points_[idx], p, kVertexSnap)) return idx;
        }
      }
    }
    int id = (int)points_.size();
    points_.push_back(p);
    grid_[{gx, gy}].push_back(id);
    return id;
  }
  const Vec2& operator[](int i) const { return points_[i]; }
  size_t size() const { return points_.size(); }

 private:
  std::vector<Vec2> points_;
  std::map<std::pair<long long, long long>, std::vector<int>> grid_;
};

// Clips the infinite line to the bbox rectangle; false if it misses.
bool clip_line_to_box(const Line& ln, const BBox2& box, double& t0, double& t1) {
  Vec2 p = ln.base();
  Vec2 d = ln.dir();
  t0 = std::numeric_limits<double>::lowest();
  t1 = std::numeric_limits<double>::max();
  const double slabs[2][3] = {{d.x, box.min.x - p.x, box.max.x - p.x},
                              {d.y, box.min.y - p.y, box.max.y - p.y}};
  for (const auto& s : slabs) {
    if (std::abs(s[0]) < 1e-12) {
      if (s[1] > 0.0 || s[2] < 0.0) return false;
      continue;
    }
    double a = s[1] / s[0], b = s[2] / s[0];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t1 - t0 > kVertexSnap;
}

}  // namespace

Arrangement fracture_plane(const std::vector<SweepEdge>& sweeps, const Polygon2& bbox_poly,
                           const FractureParams& params) {
  Arrangement arr;
  BBox2 box = bbox_poly.bbox();
  if (box.empty()) throw Error("fracture_plane: empty bbox");
  arr.bbox = box;

  // Longest first, deterministic tie break.
  std::vector<int> order(sweeps.size());
  for (size_t i = 0; i < sweeps.size(); ++i) order[i] = (int)i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double la = sweeps[a].segment.length(), lb = sweeps[b].segment.length();
    if (la != lb) return la > lb;
    Vec2 ma = sweeps[a].segment.midpoint(), mb = sweeps[b].segment.midpoint();
    if (ma.x != mb.x) return ma.x < mb.x;
    return ma.y < mb.y;
  });

  // Merge near-duplicate supporting lines so slivers never reach the solver.
  std::vector<Line> lines;
  for (int si : order) {
    const SweepEdge& sw = sweeps[si];
    double theta = canonical_angle(sw.segment.b - sw.segment.a);
    double off = line_offset(sw.segment.midpoint(), theta);
    int found = -1;
    for (size_t k = 0; k < lines.size(); ++k) {
      if (angle_diff_mod_pi(theta, lines[k].theta) > params.merge_angle) continue;
      // Compare offsets in the accepted line's frame.
      double off_k = line_offset(sw.segment.midpoint(), lines[k].theta);
      if (std::abs(off_k - lines[k].offset) > params.merge_dist) continue;
      found = (int)k;
      break;
    }
    if (found < 0) {
      Line ln;
      ln.theta = theta;
      ln.offset = off;
      lines.push_back(ln);
      found = (int)lines.size() - 1;
    }
    Line& ln = lines[found];
    double a = dot(ln.dir(), sw.segment.a - ln.base());
    double b = dot(ln.dir(), sw.segment.b - ln.base());
    if (a > b) std::swap(a, b);
    ln.extents.push_back({a, b, si});
  }

  // Chords: the 4 bbox sides plus each line clipped to the bbox.
  struct Chord {
    Vec2 a, d;       // point + unit direction
    double t0, t1;   // param range
    int line_id;     // -1 for bbox sides
    std::vector<int> verts;
  };
  std::vector<Chord> chords;
  const Vec2 corners[4] = {box.min, {box.max.x, box.min.y}, box.max, {box.min.x, box.max.y}};
  for (int i = 0; i < 4; ++i) {
    Vec2 a = corners[i], b = corners[(i + 1) % 4];
    chords.push_back({a, (b - a).normalized(), 0.0, dist(a, b), -1, {}});
  }
  for (size_t li = 0; li < lines.size(); ++li) {
    double t0, t1;
    if (!clip_line_to_box(lines[li], box, t0, t1)) continue;
    chords.push_back({lines[li].base(), lines[li].dir(), t0, t1, (int)li, {}});
  }

  // Vertices: chord pairwise intersections (includes bbox corners).
  VertexPool pool;
  for (size_t i = 0; i < chords.size(); ++i) {
    for (size_t j = i + 1; j < chords.size(); ++j) {
      auto hit = line_intersection(chords[i].a, chords[i].d, chords[j].a, chords[j].d, 1e-9);
      if (!hit) continue;
      double ti = dot(chords[i].d, *hit - chords[i].a);
      double tj = dot(chords[j].d, *hit - chords[j].a);
      if (ti < chords[i].t0 - kVertexSnap || ti > chords[i].t1 + kVertexSnap) continue;
      if (tj < chords[j].t0 - kVertexSnap || tj > chords[j].t1 + kVertexSnap) continue;
      pool.insert(*hit);
    }
  }
  // Chord endpoints (line/bbox crossing points, bbox corners).
  for (auto& c : chords) {
    pool.insert(c.a + c.d * c.t0);
    pool.insert(c.a + c.d * c.t1);
  }
  // Sweep-extent endpoints, so no fragment straddles a pink/grey boundary.
  for (auto& c : chords) {
    if (c.line_id < 0) continue;
    for (const auto& ext : lines[c.line_id].extents) {
      for (double t : {ext.lo, ext.hi}) {
        if (t > c.t0 + kVertexSnap && t < c.t1 - kVertexSnap) pool.insert(c.a + c.d * t);
      }
    }
  }

  // Distribute vertices onto chords and cut into arrangement edges.
  struct HalfEdge {
    int from, to;
    int undirected;  // index into undirected edge list
    int face = -2;
    int next = -1;
  };
  struct UndirectedEdge {
    int u, v;
    int line_id;
  };
  std::vector<UndirectedEdge> uedges;
  std::map<std::pair<int, int>, int> uedge_index;

  for (auto& c : chords) {
    std::vector<std::pair<double, int>> on_chord;
    Vec2 n = c.d.perp();
    for (size_t vi = 0; vi < pool.size(); ++vi) {
      const Vec2& p = pool[(int)vi];
      if (std::abs(dot(n, p - c.a)) > 2.0 * kVertexSnap) continue;
      double t = dot(c.d, p - c.a);
      if (t < c.t0 - 2.0 * kVertexSnap || t > c.t1 + 2.0 * kVertexSnap) continue;
      on_chord.push_back({t, (int)vi});
    }
    std::sort(on_chord.begin(), on_chord.end());
    for (size_t k = 0; k + 1 < on_chord.size(); ++k) {
      int u = on_chord[k].second, v = on_chord[k + 1].second;
      if (u == v) continue;
      if (dist(pool[u], pool[v]) < kLengthEps) continue;
      auto key = std::make_pair(std::min(u, v), std::max(u, v));
      if (uedge_index.count(key)) continue;
      uedge_index[key] = (int)uedges.size();
      uedges.push_back({u, v, c.line_id});
      c.verts.push_back(u);
    }
  }

  // Half-edge structure with angular ordering per vertex.
  std::vector<HalfEdge> hedges;
  std::map<std::pair<int, int>, int> hedge_of;
  for (size_t ei = 0; ei < uedges.size(); ++ei) {
    const auto& e = uedges[ei];
    hedge_of[{e.u, e.v}] = (int)hedges.size();
    hedges.push_back({e.u, e.v, (int)ei, -2, -1});
    hedge_of[{e.v, e.u}] = (int)hedges.size();
    hedges.push_back({e.v, e.u, (int)ei, -2, -1});
  }
  std::map<int, std::vector<int>> outgoing;
  for (size_t h = 0; h < hedges.size(); ++h) outgoing[hedges[h].from].push_back((int)h);
  for (auto& [v, list] : outgoing) {
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      const Vec2 da = pool[hedges[a].to] - pool[v];
      const Vec2 db = pool[hedges[b].to] - pool[v];
      return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
    });
  }
  // next(h) = rotational predecessor of twin(h) around h's head vertex.
  for (size_t h = 0; h < hedges.size(); ++h) {
    int head = hedges[h].to;
    int twin = hedge_of[{hedges[h].to, hedges[h].from}];
    const auto& out = outgoing[head];
    auto it = std::find(out.begin(), out.end(), twin);
    size_t idx = (size_t)std::distance(out.begin(), it);
    hedges[h].next = out[(idx + out.size() - 1) % out.size()];
  }

  // Trace faces.
  struct Face {
    std::vector<int> ring;  // vertex ids
    double area = 0.0;
    Vec2 centroid;
  };
  std::vector<Face> faces;
  std::vector<int> face_of_hedge(hedges.size(), -2);
  for (size_t h0 = 0; h0 < hedges.size(); ++h0) {
    if (face_of_hedge[h0] != -2) continue;
    Face f;
    int fid = (int)faces.size();
    int h = (int)h0;
    size_t guard = 0;
    do {
      face_of_hedge[h] = fid;
      f.ring.push_back(hedges[h].from);
      h = hedges[h].next;
      if (++guard > hedges.size() + 1) throw Error("fracture_plane: face tracing loop");
    } while (h != (int)h0);
    std::vector<Vec2> ring;
    for (int vi : f.ring) ring.push_back(pool[vi]);
    f.area = ring_area(ring);
    Vec2 c{0, 0};
    for (const auto& p : ring) c += p;
    f.centroid = c / (double)ring.size();
    faces.push_back(std::move(f));
  }

  // Deterministic polygon ids: bounded faces sorted by centroid.
  std::vector<int> bounded;
  int outer_count = 0;
  for (size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].area > 1e-10) {
      bounded.push_back((int)f);
    } else {
      ++outer_count;
    }
  }
  if (outer_count != 1) throw Error("fracture_plane: expected exactly one unbounded face");
  std::sort(bounded.begin(), bounded.end(), [&](int a, int b) {
    if (faces[a].centroid.x != faces[b].centroid.x) return faces[a].centroid.x < faces[b].centroid.x;
    return faces[a].centroid.y < faces[b].centroid.y;
  });
  std::vector<int> poly_id_of_face(faces.size(), kOutside);
  for (size_t k = 0; k < bounded.size(); ++k) {
    poly_id_of_face[bounded[k]] = (int)k;
    ArrPolygon ap;
    ap.id = (int)k;
    for (int vi : faces[bounded[k]].ring) ap.poly.outer.push_back(pool[vi]);
    ap.area = faces[bounded[k]].area;
    arr.polygons.push_back(std::move(ap));
  }

  // Edge records with adjacency and sweep flags.
  for (size_t ei = 0; ei < uedges.size(); ++ei) {
    const auto& e = uedges[ei];
    ArrEdge ae;
    ae.segment = Segment2{pool[e.u], pool[e.v]};
    ae.length = ae.segment.length();
    ae.line_id = e.line_id;
    int h_fwd = hedge_of[{e.u, e.v}];
    int h_bwd = hedge_of[{e.v, e.u}];
    ae.left = poly_id_of_face[face_of_hedge[h_fwd]];
    ae.right = poly_id_of_face[face_of_hedge[h_bwd]];
    if (e.line_id >= 0) {
      const Line& ln = lines[e.line_id];
      double tm = dot(ln.dir(), ae.segment.midpoint() - ln.base());
      for (const auto& ext : ln.extents) {
        if (tm >= ext.lo - kVertexSnap && tm <= ext.hi + kVertexSnap) {
          ae.in_sweep_extent = true;
          ae.sweep_origin = ext.sweep_id;
          break;
        }
      }
      ae.is_sweep = ae.in_sweep_extent || params.continuations_count_as_sweep;
    }
    arr.edges.push_back(ae);
  }
  return arr;
}

void classify_polygons(Arrangement& arr, const std::vector<Polygon2>& gis, const TriMesh& mesh,
                       const ClassifyParams& params) {
  HeightField hf(mesh);
  for (auto& ap : arr.polygons) {
    Vec2 rep = ap.poly.centroid();
    bool in_gis = false;
    for (const auto& g : gis) {
      if (g.contains_dilated(rep, params.gis_dilation)) {
        in_gis = true;
        break;
      }
    }
    if (mesh.empty()) {
      ap.kept = in_gis;
      continue;
    }
    BBox2 b = ap.poly.bbox();
    double sum = 0.0;
    int count = 0;
    for (double x = b.min.x + 0.5 * params.sample_grid; x < b.max.x; x += params.sample_grid) {
      for (double y = b.min.y + 0.5 * params.sample_grid; y < b.max.y; y += params.sample_grid) {
        Vec2 p{x, y};
        if (!ap.poly.contains(p)) continue;
        auto h = hf.query(p);
        sum += h ? *h : 0.0;
        ++count;
      }
    }
    if (count == 0) {
      auto h = hf.query(rep);
      sum = h ? *h : 0.0;
      count = 1;
    }
    double mean_h = sum / count;
    // The dilated-GIS rule still wants some mesh evidence (h_presence = 0
    // restores the pure GIS test), or strips of bare ground hugging the
    // footprint get modeled.
    ap.kept = mean_h > params.h_min || (in_gis && mean_h >= params.h_presence);
  }
  if (arr.kept_count() == 0) {
    throw Error("classify_polygons: degenerate input, no polygon inside a building");
  }
  for (auto& e : arr.edges) {
    if (e.left != kOutside && !arr.polygons[e.left].kept) e.left = kOutside;
    if (e.right != kOutside && !arr.polygons[e.right].kept) e.right = kOutside;
  }
  arr.classified = true;
}

void compute_height_diffs(Arrangement& arr, const TriMesh& mesh, const HeightDiffParams& params) {
  HeightField hf(mesh);
  for (auto& e : arr.edges) {
    if (e.left == kOutside && e.right == kOutside) {
      e.height_diff = 0.0;
      continue;
    }
    Vec2 d = e.segment.dir();
    Vec2 n = d.perp();
    double sum = 0.0;
    for (int i = 0; i < params.samples_per_edge; ++i) {
      double t = (i + 0.5) / params.samples_per_edge;
      Vec2 p = e.segment.a + (e.segment.b - e.segment.a) * t;
      auto hl = hf.query(p + n * params.perp_offset);
      auto hr = hf.query(p - n * params.perp_offset);
      sum += std::abs((hl ? *hl : 0.0) - (hr ? *hr : 0.0));
    }
    e.height_diff = sum / params.samples_per_edge;
  }
}

}  // namespace massfit
