#include "massfit/extrude.hpp"

#include <map>

#include "massfit/triangulate.hpp"

namespace massfit {

namespace {

constexpr double kHeightTol = 1e-6;
constexpr double kPosTol = 1e-6;

struct WVertex {
  Vec2 pos;  // position at height h0
  double h0 = 0.0;
  Vec2 vel;
  int e_in = -1;
  int e_out = -1;
  bool alive = true;
  int node = -1;
  Vec2 at(double h) const { return pos + vel * (h - h0); }
};

struct WEdge {
  int orig = -1;  // footprint edge id == profile index
  Vec2 dir;       // unit, constant for the edge's lifetime
  Vec2 normal;    // left of dir == inward
  double off0 = 0.0;
  const Profile* prof = nullptr;
  int va = -1, vb = -1;
  bool alive = true;

  double line_c(double h) const { return off0 + prof->offset_at(h); }
  double speed(double h) const { return prof->speed_at(h); }
};

using FaceKey = std::pair<int, int>;  // (footprint edge id, span index)

struct Sweeper {
  const Polygon2& footprint;
  const std::vector<Profile>& profiles;
  double h_cap;
  int fid;

  std::vector<WVertex> verts;
  std::vector<WEdge> edges;
  std::vector<Vec3> nodes;
  std::map<FaceKey, std::vector<std::pair<int, int>>> face_segments;  // directed node pairs
  std::map<FaceKey, double> face_slope;
  std::vector<double> angle_heights;  // global profile breakpoints, ascending
  int span = 0;
  double h_cur = 0.0;
  std::vector<int> birth_nodes;  // ring vertex -> node id

  MassModel model;

  Sweeper(const Polygon2& fp, const std::vector<Profile>& profs, double cap, int footprint_id)
      : footprint(fp), profiles(profs), h_cap(cap), fid(footprint_id) {}

  int add_node(const Vec2& p, double h) {
    nodes.push_back({p.x, p.y, h});
    return (int)nodes.size() - 1;
  }

  void add_face_segment(int orig, int from_node, int to_node) {
    if (from_node == to_node) return;
    face_segments[{orig, span}].push_back({from_node, to_node});
  }

  // Records the trace of v from its last node to height h (node reuse when
  // the vertex was already touched at this height).
  int touch(WVertex& v, double h, int reuse_node = -1) {
    if (std::abs(v.h0 - h) <= 1e-12 && v.node >= 0) {
      if (reuse_node >= 0 && reuse_node != v.node) {
        throw SkeletonError("skeleton: conflicting nodes at one event height", v.pos, h);
      }
      return v.node;
    }
    Vec2 p = position_at(v, h);
    int n = reuse_node >= 0 ? reuse_node : add_node(p, h);
    if (v.node >= 0 && v.node != n) {
      add_face_segment(edges[v.e_in].orig, v.node, n);   // right side of e_in ascends
      add_face_segment(edges[v.e_out].orig, n, v.node);  // left side of e_out descends
    }
    v.pos = p;
    v.h0 = h;
    v.node = n;
    return n;
  }

  // Re-derives the vertex position from its two edge lines (no drift).
  Vec2 position_at(const WVertex& v, double h) const {
    const WEdge& e1 = edges[v.e_in];
    const WEdge& e2 = edges[v.e_out];
    double den = cross(e1.normal, e2.normal);
    if (std::abs(den) < 1e-9) return v.at(h);
    double c1 = e1.line_c(h), c2 = e2.line_c(h);
    return Vec2{(c1 * e2.normal.y - c2 * e1.normal.y) / den,
                (e1.normal.x * c2 - e2.normal.x * c1) / den};
  }

  Vec2 velocity_of(int e_in, int e_out, double h) const {
    const WEdge& e1 = edges[e_in];
    const WEdge& e2 = edges[e_out];
    double den = cross(e1.normal, e2.normal);
    double s1 = e1.speed(h), s2 = e2.speed(h);
    if (std::abs(den) < 1e-9) {
      if (dot(e1.normal, e2.normal) > 0.0) {
        if (std::abs(s1 - s2) > 1e-9) {
          throw SkeletonError("skeleton: collinear adjacent edges with different speeds",
                              edges[e_in].dir, h);
        }
        return e1.normal * s1;
      }
      // Anti-parallel: legal only at the instant the two lines coincide (a
      // ridge endpoint); it does not move in plan until the loop dies.
      if (std::abs(e1.line_c(h) + e2.line_c(h)) > 10.0 * kPosTol) {
        throw SkeletonError("skeleton: anti-parallel adjacent edges (spike)", e1.dir, h);
      }
      return {0.0, 0.0};
    }
    return Vec2{(s1 * e2.normal.y - s2 * e1.normal.y) / den,
                (e1.normal.x * s2 - e2.normal.x * s1) / den};
  }

  void refresh_velocity(int vi) {
    WVertex& v = verts[vi];
    v.vel = velocity_of(v.e_in, v.e_out, h_cur);
  }

  void setup() {
    std::vector<const std::vector<Vec2>*> rings = footprint.rings();
    size_t edge_total = 0;
    for (const auto* r : rings) edge_total += r->size();
    if (profiles.size() != edge_total) {
      throw Error("extrude: profile count must match footprint edge count");
    }
    for (const auto& prof : profiles) prof.validate();

    int orig = 0;
    for (const auto* ring : rings) {
      const size_t n = ring->size();
      if (n < 3) throw Error("extrude: ring with fewer than 3 vertices");
      int v0 = (int)verts.size();
      for (size_t i = 0; i < n; ++i) {
        WVertex v;
        v.pos = (*ring)[i];
        v.h0 = 0.0;
        v.node = add_node(v.pos, 0.0);
        birth_nodes.push_back(v.node);
        verts.push_back(v);
      }
      int e0 = (int)edges.size();
      for (size_t i = 0; i < n; ++i) {
        WEdge e;
        e.orig = orig;
        Vec2 a = (*ring)[i];
        Vec2 b = (*ring)[(i + 1) % n];
        if (dist(a, b) < kLengthEps) throw Error("extrude: degenerate footprint edge");
        e.dir = (b - a).normalized();
        e.normal = e.dir.perp();
        e.off0 = dot(e.normal, a);
        e.prof = &profiles[orig];
        e.va = v0 + (int)i;
        e.vb = v0 + (int)((i + 1) % n);
        edges.push_back(e);
        verts[e.va].e_out = e0 + (int)i;
        verts[e.vb].e_in = e0 + (int)i;
        ++orig;
      }
    }
    for (size_t vi = 0; vi < verts.size(); ++vi) refresh_velocity((int)vi);

    // Global angle-event heights: every profile's interior breakpoints.
    std::vector<double> hs;
    for (const auto& p : profiles) {
      for (double h : p.breakpoint_heights()) hs.push_back(h);
    }
    std::sort(hs.begin(), hs.end());
    for (double h : hs) {
      if (h <= kHeightTol || h >= h_cap - kHeightTol) continue;
      if (angle_heights.empty() || h - angle_heights.back() > kHeightTol) {
        angle_heights.push_back(h);
      }
    }

    // Bottom boundary of span 0 plus the floor face.
    for (const auto& e : edges) {
      add_face_segment(e.orig, verts[e.va].node, verts[e.vb].node);
      face_slope[{e.orig, 0}] = e.prof->speed_at(0.0);
    }
    emit_floor();
  }

  void emit_floor() {
    std::vector<std::vector<Vec2>> rings;
    std::vector<std::vector<int>> ring_nodes;
    size_t base = 0;
    for (const auto* r : footprint.rings()) {
      rings.push_back(*r);
      std::vector<int> ids;
      for (size_t i = 0; i < r->size(); ++i) ids.push_back(birth_nodes[base + i]);
      ring_nodes.push_back(ids);
      base += r->size();
    }
    std::vector<int> flat;
    for (const auto& ids : ring_nodes) flat.insert(flat.end(), ids.begin(), ids.end());
    for (const auto& t : triangulate_polygon(rings)) {
      // Floor faces point down: reverse the CCW triangulation.
      model.mesh.triangles.push_back({flat[t[0]], flat[t[2]], flat[t[1]]});
      FaceInfo info;
      info.kind = 1;
      info.footprint_id = fid;
      model.faces.push_back(info);
    }
  }

  struct Candidate {
    double h;
    Vec2 p;
    enum Kind { kCollapse, kSplit } kind;
    int a = -1;  // collapse: edge; split: vertex
    int b = -1;  // split: target edge
  };

  // Earliest wavefront events in (h_cur, window_end]; empty if none.
  std::vector<Candidate> next_candidates(double window_end) {
    std::vector<Candidate> cands;
    double best_h = window_end + kHeightTol;
    auto consider = [&](const Candidate& c) {
      if (c.h > best_h + kHeightTol) return;
      if (c.h < best_h - kHeightTol) {
        best_h = c.h;
        cands.clear();
      }
      cands.push_back(c);
    };

    for (size_t ei = 0; ei < edges.size(); ++ei) {
      const WEdge& e = edges[ei];
      if (!e.alive) continue;
      const WVertex& va = verts[e.va];
      const WVertex& vb = verts[e.vb];
      double ga = dot(e.dir, va.at(h_cur));
      double gb = dot(e.dir, vb.at(h_cur));
      double rate = dot(e.dir, vb.vel - va.vel);
      if (rate >= -1e-12) continue;
      double t = h_cur + (gb - ga) / (-rate);
      if (t < h_cur - kHeightTol || t > window_end + kHeightTol) continue;
      t = std::max(t, h_cur);
      Vec2 p = (va.at(t) + vb.at(t)) * 0.5;
      consider({t, p, Candidate::kCollapse, (int)ei, -1});
    }

    for (size_t vi = 0; vi < verts.size(); ++vi) {
      const WVertex& v = verts[vi];
      if (!v.alive) continue;
      if (cross(edges[v.e_in].dir, edges[v.e_out].dir) > -1e-9) continue;  // convex
      for (size_t ei = 0; ei < edges.size(); ++ei) {
        const WEdge& e = edges[ei];
        if (!e.alive || (int)ei == v.e_in || (int)ei == v.e_out) continue;
        if (e.va == (int)vi || e.vb == (int)vi) continue;
        double f0 = dot(e.normal, v.at(h_cur)) - e.line_c(h_cur);
        if (f0 <= kPosTol) continue;  // not strictly in front of the wavefront
        double f1 = dot(e.normal, v.at(window_end)) - e.line_c(window_end);
        if (f1 > 0.0) continue;
        double t = h_cur + f0 / (f0 - f1) * (window_end - h_cur);
        if (t > window_end + kHeightTol) continue;
        Vec2 p = v.at(t);
        double u = dot(e.dir, p);
        double ua = dot(e.dir, verts[e.va].at(t));
        double ub = dot(e.dir, verts[e.vb].at(t));
        if (u < ua - kPosTol || u > ub + kPosTol) continue;
        consider({std::max(t, h_cur), p, Candidate::kSplit, (int)vi, (int)ei});
      }
    }
    return cands;
  }

  // Kills v after recording its arrival at node n.
  void retire_vertex(int vi, double h, int n) {
    touch(verts[vi], h, n);
    verts[vi].alive = false;
  }

  // Resolves everything coincident at p. Returns false for stale clusters
  // (an earlier same-height cluster already consumed the participants).
  bool process_cluster(const std::vector<Candidate>& cluster, double h) {
    Vec2 p = cluster.front().p;

    // Everybody arriving at p dies; scan globally to catch coincidences that
    // never made it into the candidate list.
    std::vector<int> arriving;
    for (size_t vi = 0; vi < verts.size(); ++vi) {
      if (verts[vi].alive && near(verts[vi].at(h), p, 4.0 * kPosTol)) arriving.push_back((int)vi);
    }
    if (arriving.empty()) return false;

    // Reuse a node if a participant was already pinned at this height.
    int n = -1;
    for (int vi : arriving) {
      if (std::abs(verts[vi].h0 - h) <= 1e-12 && verts[vi].node >= 0) {
        if (n >= 0 && n != verts[vi].node) {
          throw SkeletonError("skeleton: coincident event with conflicting nodes", p, h);
        }
        n = verts[vi].node;
      }
    }
    if (n < 0) n = add_node(p, h);

    auto is_arriving = [&](int vi) {
      return std::find(arriving.begin(), arriving.end(), vi) != arriving.end();
    };

    // Split targets: edges crossed strictly inside their extent.
    std::vector<int> split_edges;
    for (const auto& c : cluster) {
      if (c.kind != Candidate::kSplit) continue;
      const WEdge& e = edges[c.b];
      if (!e.alive || is_arriving(e.va) || is_arriving(e.vb)) continue;
      double u = dot(e.dir, p);
      double ua = dot(e.dir, verts[e.va].at(h));
      double ub = dot(e.dir, verts[e.vb].at(h));
      if (u < ua + 2.0 * kPosTol || u > ub - 2.0 * kPosTol) continue;  // endpoint case
      if (std::find(split_edges.begin(), split_edges.end(), c.b) == split_edges.end()) {
        split_edges.push_back(c.b);
      }
    }

    struct Stub {
      int edge;
      bool incoming;  // arrives at p (its vb is replaced); else leaves p
      double angle;
      long rank;
    };
    std::vector<Stub> stubs;

    for (int vi : arriving) retire_vertex(vi, h, n);
    for (int vi : arriving) {
      const WVertex& v = verts[vi];
      const WEdge& ein = edges[v.e_in];
      const WEdge& eout = edges[v.e_out];
      if (ein.alive && !is_arriving(ein.va)) stubs.push_back({v.e_in, true, 0.0, 0});
      if (eout.alive && !is_arriving(eout.vb)) stubs.push_back({v.e_out, false, 0.0, 0});
    }
    // Collapsed edges: both endpoints arrived.
    for (int vi : arriving) {
      for (int ei : {verts[vi].e_in, verts[vi].e_out}) {
        WEdge& e = edges[ei];
        if (e.alive && is_arriving(e.va) && is_arriving(e.vb)) e.alive = false;
      }
    }
    // Split edges break into two fragments sharing the original's face.
    for (int ei : split_edges) {
      int vb_old = edges[ei].vb;
      WEdge frag = edges[ei];  // keeps orig, dir, normal, off0, prof
      frag.va = -1;            // both open ends are filled by the pairing below
      frag.vb = vb_old;
      edges[ei].vb = -1;
      int frag_id = (int)edges.size();
      edges.push_back(frag);
      verts[vb_old].e_in = frag_id;
      stubs.push_back({ei, true, 0.0, 0});
      stubs.push_back({frag_id, false, 0.0, 0});
    }

    // Angular pairing: sorted CCW the stubs must alternate Out, In; each Out
    // pairs with the following In to form one new wavefront corner.
    if (stubs.empty()) return true;  // everything around p ended here (apex)
    if (stubs.size() % 2 != 0) throw SkeletonError("skeleton: odd stub count", p, h);
    for (auto& s : stubs) {
      const WEdge& e = edges[s.edge];
      int far_vertex = s.incoming ? e.va : e.vb;
      Vec2 r = verts[far_vertex].at(h) - p;
      if (r.norm() < kPosTol) throw SkeletonError("skeleton: zero-length stub", p, h);
      s.angle = std::atan2(r.y, r.x);
      s.rank = s.edge;
    }
    std::sort(stubs.begin(), stubs.end(), [](const Stub& a, const Stub& b) {
      if (std::abs(a.angle - b.angle) > 1e-12) return a.angle < b.angle;
      // Collinear ties: the outgoing stub starts the degenerate wedge (a
      // ridge) and its incoming partner closes it.
      if (a.incoming != b.incoming) return !a.incoming;
      return a.rank < b.rank;
    });
    size_t first_out = stubs.size();
    for (size_t i = 0; i < stubs.size(); ++i) {
      if (!stubs[i].incoming) {
        first_out = i;
        break;
      }
    }
    if (first_out == stubs.size()) throw SkeletonError("skeleton: no outgoing stub", p, h);
    for (size_t k = 0; k < stubs.size(); k += 2) {
      const Stub& out = stubs[(first_out + k) % stubs.size()];
      const Stub& in = stubs[(first_out + k + 1) % stubs.size()];
      if (out.incoming || !in.incoming) {
        throw SkeletonError("skeleton: stubs do not alternate around event point", p, h);
      }
      WVertex nv;
      nv.h0 = h;
      nv.node = n;
      nv.e_in = in.edge;
      nv.e_out = out.edge;
      int nvi = (int)verts.size();
      verts.push_back(nv);
      edges[in.edge].vb = nvi;
      edges[out.edge].va = nvi;
      verts[nvi].vel = velocity_of(in.edge, out.edge, h);
      verts[nvi].pos = position_at(verts[nvi], h);
      if (!near(verts[nvi].pos, p, 50.0 * kPosTol)) verts[nvi].pos = p;
    }

    // Two-edge loops are done: they sweep nothing further.
    for (size_t vi = 0; vi < verts.size(); ++vi) {
      WVertex& v = verts[vi];
      if (!v.alive || v.h0 != h || v.node != n) continue;
      int e1 = v.e_out;
      if (!edges[e1].alive) continue;
      int w = edges[e1].vb;
      if (w == (int)vi) throw SkeletonError("skeleton: self-loop edge", p, h);
      int e2 = verts[w].e_out;
      if (edges[e2].vb == (int)vi && e2 != e1) {
        int m = touch(verts[w], h);
        add_face_segment(edges[e1].orig, m, v.node);  // top of e1 (right to left)
        add_face_segment(edges[e2].orig, v.node, m);
        edges[e1].alive = false;
        edges[e2].alive = false;
        verts[w].alive = false;
        v.alive = false;
      }
    }
    return true;
  }

  void process_angle_event(double h) {
    for (size_t vi = 0; vi < verts.size(); ++vi) {
      if (verts[vi].alive) touch(verts[vi], h);
    }
    for (const auto& e : edges) {
      if (!e.alive) continue;
      add_face_segment(e.orig, verts[e.vb].node, verts[e.va].node);  // top of old span
    }
    ++span;
    for (const auto& e : edges) {
      if (!e.alive) continue;
      add_face_segment(e.orig, verts[e.va].node, verts[e.vb].node);  // bottom of new span
      if (!face_slope.count({e.orig, span})) {
        face_slope[{e.orig, span}] = e.prof->speed_at(h);
      }
    }
    for (size_t vi = 0; vi < verts.size(); ++vi) {
      if (verts[vi].alive) refresh_velocity((int)vi);
    }
  }

  void finalize_cap() {
    bool any_alive = false;
    for (const auto& e : edges) any_alive |= e.alive;
    if (!any_alive) return;
    for (size_t vi = 0; vi < verts.size(); ++vi) {
      if (verts[vi].alive) touch(verts[vi], h_cap);
    }
    for (const auto& e : edges) {
      if (!e.alive) continue;
      add_face_segment(e.orig, verts[e.vb].node, verts[e.va].node);
    }
    // Wavefront loops become the cap polygons.
    std::vector<char> seen(edges.size(), 0);
    std::vector<std::vector<int>> loops;  // node ids, loop orientation preserved
    for (size_t e0 = 0; e0 < edges.size(); ++e0) {
      if (!edges[e0].alive || seen[e0]) continue;
      std::vector<int> loop_nodes;
      int e = (int)e0;
      size_t guard = 0;
      do {
        seen[e] = 1;
        loop_nodes.push_back(verts[edges[e].va].node);
        e = verts[edges[e].vb].e_out;
        if (++guard > edges.size() + 1) throw SkeletonError("skeleton: cap loop", {0, 0}, h_cap);
      } while (e != (int)e0);
      loops.push_back(std::move(loop_nodes));
    }
    // Outer loops are CCW; CW loops are holes of the containing outer.
    struct CapRing {
      std::vector<Vec2> pts;
      std::vector<int> ids;
      double area;
    };
    std::vector<CapRing> outers, holes;
    for (auto& ln : loops) {
      CapRing r;
      r.ids = ln;
      for (int nid : ln) r.pts.push_back(nodes[nid].xy());
      r.area = ring_area(r.pts);
      (r.area > 0.0 ? outers : holes).push_back(std::move(r));
    }
    for (const auto& outer : outers) {
      std::vector<std::vector<Vec2>> rings{outer.pts};
      std::vector<int> flat = outer.ids;
      for (const auto& hole : holes) {
        if (!ring_contains(outer.pts, hole.pts[0])) continue;
        rings.push_back(hole.pts);
        flat.insert(flat.end(), hole.ids.begin(), hole.ids.end());
      }
      for (const auto& t : triangulate_polygon(rings)) {
        model.mesh.triangles.push_back({flat[t[0]], flat[t[1]], flat[t[2]]});
        FaceInfo info;
        info.kind = 2;
        info.footprint_id = fid;
        model.faces.push_back(info);
      }
    }
  }

  void emit_side_faces() {
    for (const auto& [key, segs] : face_segments) {
      auto [orig, sp] = key;
      // Stitch directed segments into loops by node id.
      std::map<int, std::vector<size_t>> by_from;
      for (size_t i = 0; i < segs.size(); ++i) by_from[segs[i].first].push_back(i);
      std::vector<char> used(segs.size(), 0);
      std::vector<std::vector<int>> loops;
      for (size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;
        std::vector<int> loop;
        size_t cur = s0;
        size_t guard = 0;
        while (true) {
          used[cur] = 1;
          loop.push_back(segs[cur].first);
          int target = segs[cur].second;
          auto it = by_from.find(target);
          size_t next = segs.size();
          if (it != by_from.end()) {
            for (size_t cand : it->second) {
              if (!used[cand]) {
                next = cand;
                break;
              }
            }
          }
          if (next == segs.size()) {
            if (target == segs[s0].first) break;  // closed
            throw Error("extrude: open face boundary (node " + std::to_string(target) + ")");
          }
          cur = next;
          if (++guard > segs.size() + 1) throw Error("extrude: face stitching loop");
        }
        loops.push_back(std::move(loop));
      }
      if (loops.empty()) continue;

      // Project into the sweep plane: u along the edge, w = height. Affine
      // coordinates keep orientation and containment intact.
      Vec2 d{0, 0};
      {
        bool found = false;
        size_t base = 0;
        for (const auto* ring : footprint.rings()) {
          const size_t nr = ring->size();
          if ((size_t)orig < base + nr) {
            Vec2 a = (*ring)[orig - base];
            Vec2 b = (*ring)[(orig - base + 1) % nr];
            d = (b - a).normalized();
            found = true;
            break;
          }
          base += nr;
        }
        if (!found) throw Error("extrude: bad edge id");
      }
      struct PlaneRing {
        std::vector<Vec2> pts;
        std::vector<int> ids;
        double area;
      };
      std::vector<PlaneRing> pos_rings, neg_rings;
      for (auto& loop : loops) {
        PlaneRing r;
        r.ids = loop;
        for (int nid : loop) r.pts.push_back({dot(d, nodes[nid].xy()), nodes[nid].z});
        r.area = ring_area(r.pts);
        if (std::abs(r.area) < 1e-12) continue;  // degenerate sliver
        (r.area > 0.0 ? pos_rings : neg_rings).push_back(std::move(r));
      }
      double slope = 0.0;
      auto slope_it = face_slope.find(key);
      if (slope_it != face_slope.end()) slope = slope_it->second;
      for (const auto& outer : pos_rings) {
        std::vector<std::vector<Vec2>> rings{outer.pts};
        std::vector<int> flat = outer.ids;
        for (const auto& hole : neg_rings) {
          if (!ring_contains(outer.pts, hole.pts[0])) continue;
          rings.push_back(hole.pts);
          flat.insert(flat.end(), hole.ids.begin(), hole.ids.end());
        }
        for (const auto& t : triangulate_polygon(rings)) {
          model.mesh.triangles.push_back({flat[t[0]], flat[t[1]], flat[t[2]]});
          FaceInfo info;
          info.kind = 0;
          info.footprint_id = fid;
          info.edge_id = orig;
          info.gen_slope = slope;
          model.faces.push_back(info);
        }
      }
    }
  }

  MassModel run() {
    setup();
    size_t next_angle = 0;
    const size_t max_iters = 2000 + 50 * edges.size();
    size_t iters = 0;
    while (true) {
      if (++iters > max_iters) {
        throw SkeletonError("skeleton: event loop did not terminate", {0, 0}, h_cur);
      }
      bool any_alive = false;
      for (const auto& e : edges) any_alive |= e.alive;
      if (!any_alive) break;

      while (next_angle < angle_heights.size() && angle_heights[next_angle] <= h_cur + kHeightTol) {
        ++next_angle;
      }
      double window_end =
          next_angle < angle_heights.size() ? angle_heights[next_angle] : h_cap;
      window_end = std::min(window_end, h_cap);

      auto cands = next_candidates(window_end);
      if (!cands.empty() && cands.front().h <= window_end + kHeightTol) {
        // All clusters of this event height resolve in one batch; after the
        // first surgery the others' split distances read zero and would
        // otherwise never fire again.
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
          if (std::abs(a.p.x - b.p.x) > kPosTol) return a.p.x < b.p.x;
          return a.p.y < b.p.y;
        });
        double h = cands.front().h;
        for (const auto& c : cands) h = std::min(h, c.h);
        h = std::max(h, h_cur);
        h_cur = h;
        size_t start = 0;
        while (start < cands.size()) {
          std::vector<Candidate> cluster;
          cluster.push_back(cands[start]);
          size_t next = start + 1;
          while (next < cands.size() && near(cands[next].p, cands[start].p, 4.0 * kPosTol)) {
            cluster.push_back(cands[next]);
            ++next;
          }
          process_cluster(cluster, h);  // stale clusters no-op
          start = next;
        }
        continue;
      }
      if (window_end >= h_cap - kHeightTol) {
        h_cur = h_cap;
        finalize_cap();
        break;
      }
      h_cur = window_end;
      process_angle_event(h_cur);
    }

    emit_side_faces();
    // Node ids are already shared across faces; the usual weld/cleanup pass
    // could merge distinct nodes and open cracks, so skip it.
    model.mesh.vertices = nodes;
    model.footprint_id = fid;
    for (auto& f : model.faces) f.footprint_id = fid;
    label_faces(model);
    return model;
  }
};

}  // namespace

double height_cap_from_mesh(const TriMesh& mesh, double margin) {
  if (mesh.empty()) throw Error("height_cap_from_mesh: empty mesh");
  return mesh.max_z() + margin;
}

void label_faces(MassModel& model) {
  for (auto& f : model.faces) {
    switch (f.kind) {
      case 1:
        f.label = FaceLabel::kFloor;
        break;
      case 2:
        f.label = FaceLabel::kCap;
        break;
      default:
        f.label = std::abs(f.gen_slope) < 1e-9 ? FaceLabel::kWall : FaceLabel::kRoof;
    }
  }
}

MassModel extrude(const Polygon2& footprint, const std::vector<Profile>& profiles, double h_cap,
                  int footprint_id) {
  if (h_cap <= 0.0) throw Error("extrude: h_cap must be positive");
  Polygon2 fp = footprint;
  fp.normalize_orientation();
  Sweeper sweeper(fp, profiles, h_cap, footprint_id);
  return sweeper.run();
}

MassModel extrude_with_retry(const Polygon2& footprint, const std::vector<Profile>& profiles,
                             double h_cap, int footprint_id) {
  try {
    return extrude(footprint, profiles, h_cap, footprint_id);
  } catch (const SkeletonError&) {
    // Deterministic sub-millimeter perturbation, then one retry.
    Polygon2 fp = footprint;
    auto jiggle = [](std::vector<Vec2>& ring, size_t salt) {
      for (size_t i = 0; i < ring.size(); ++i) {
        double a = (double)((i * 2654435761u + salt * 40503u) % 628318) / 100000.0;
        ring[i] += Vec2{std::cos(a), std::sin(a)} * 1e-4;
      }
    };
    jiggle(fp.outer, 1);
    for (size_t h = 0; h < fp.holes.size(); ++h) jiggle(fp.holes[h], 2 + h);
    return extrude(fp, profiles, h_cap, footprint_id);
  }
}

void MassModel::validate() const {
  if (mesh.triangles.size() != faces.size()) throw Error("MassModel: face metadata mismatch");
  if (!is_closed_manifold(mesh)) throw Error("MassModel: not a closed 2-manifold");
  if (signed_volume(mesh) <= 0.0) throw Error("MassModel: not outward oriented");
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    Vec3 n = cross(mesh.vertices[tri[1]] - mesh.vertices[tri[0]],
                   mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    double len = n.norm();
    if (len < 1e-12) throw Error("MassModel: degenerate face");
    if (faces[t].label == FaceLabel::kWall && std::abs(n.z / len) >= 1e-3) {
      throw Error("MassModel: wall face is not vertical");
    }
    if (faces[t].label == FaceLabel::kFloor) {
      for (int c : tri) {
        if (std::abs(mesh.vertices[c].z) > 1e-9) throw Error("MassModel: floor not at z=0");
      }
    }
    if (faces[t].kind == 0 && faces[t].edge_id < 0) {
      throw Error("MassModel: swept face without source edge");
    }
  }
}

}  // namespace massfit
