#include "massfit/triangulate.hpp"

#include <numeric>

namespace massfit {

namespace {

struct Node {
  int idx;   // index into the flattened point array
  int prev;  // linked-list neighbours (positions in the node array)
  int next;
};

double tri_area2(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double eps) {
  double d1 = tri_area2(a, b, p);
  double d2 = tri_area2(b, c, p);
  double d3 = tri_area2(c, a, p);
  return d1 >= -eps && d2 >= -eps && d3 >= -eps;
}

}  // namespace

std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<std::vector<Vec2>>& rings) {
  if (rings.empty() || rings[0].size() < 3) throw Error("triangulate: outer ring too small");

  std::vector<Vec2> pts;
  std::vector<int> ring_offset;
  for (const auto& r : rings) {
    ring_offset.push_back((int)pts.size());
    pts.insert(pts.end(), r.begin(), r.end());
  }

  BBox2 box;
  for (const auto& p : pts) box.expand(p);
  const double scale = std::max(box.diameter(), 1e-9);
  const double eps = 1e-12 * scale * scale;       // area tolerance
  const double point_eps = 1e-9 * scale;          // coincidence tolerance

  // Working ring as a list of point indices, outer ring first.
  std::vector<int> ring(rings[0].size());
  std::iota(ring.begin(), ring.end(), 0);

  // Bridge holes in order of decreasing max-x vertex.
  std::vector<int> hole_order;
  for (size_t h = 1; h < rings.size(); ++h) hole_order.push_back((int)h);
  auto hole_max_x = [&](int h) {
    double mx = std::numeric_limits<double>::lowest();
    for (const auto& p : rings[h]) mx = std::max(mx, p.x);
    return mx;
  };
  std::sort(hole_order.begin(), hole_order.end(),
            [&](int a, int b) { return hole_max_x(a) > hole_max_x(b); });

  for (int h : hole_order) {
    const auto& hole = rings[h];
    if (hole.size() < 3) continue;
    // Hole vertex with maximum x.
    int m_local = 0;
    for (size_t i = 1; i < hole.size(); ++i) {
      if (hole[i].x > hole[m_local].x) m_local = (int)i;
    }
    Vec2 M = hole[m_local];

    // Closest intersection of the +x ray from M with the current ring.
    double best_t = std::numeric_limits<double>::max();
    int best_edge = -1;
    Vec2 I{};
    for (size_t i = 0; i < ring.size(); ++i) {
      Vec2 a = pts[ring[i]];
      Vec2 b = pts[ring[(i + 1) % ring.size()]];
      if ((a.y > M.y) == (b.y > M.y)) continue;
      double t = a.x + (M.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (t >= M.x - point_eps && t < best_t) {
        best_t = t;
        best_edge = (int)i;
        I = {t, M.y};
      }
    }
    if (best_edge < 0) throw Error("triangulate: hole outside outer ring");

    // Candidate visible vertex: the edge endpoint with larger x, unless some
    // reflex ring vertex lies inside triangle (M, I, P); then take the reflex
    // vertex closest in angle to the ray.
    int pa = best_edge;
    int pb = (best_edge + 1) % (int)ring.size();
    int cand = pts[ring[pa]].x > pts[ring[pb]].x ? pa : pb;
    Vec2 P = pts[ring[cand]];
    if (dist(P, I) > point_eps) {
      double best_metric = std::numeric_limits<double>::max();
      int best_r = -1;
      for (size_t i = 0; i < ring.size(); ++i) {
        if ((int)i == cand) continue;
        Vec2 r = pts[ring[i]];
        if (r.x < M.x - point_eps) continue;
        if (!point_in_triangle(r, M, I, P, eps) && !point_in_triangle(r, M, P, I, eps)) continue;
        Vec2 prev = pts[ring[(i + ring.size() - 1) % ring.size()]];
        Vec2 next = pts[ring[(i + 1) % ring.size()]];
        if (tri_area2(prev, r, next) >= 0.0) continue;  // only reflex vertices block
        double dx = r.x - M.x, dy = std::abs(r.y - M.y);
        double metric = dx <= point_eps ? std::numeric_limits<double>::max() : dy / dx;
        if (metric < best_metric || (metric == best_metric && best_r >= 0 && dx < (pts[ring[best_r]] - M).x)) {
          best_metric = metric;
          best_r = (int)i;
        }
      }
      if (best_r >= 0) cand = best_r;
    }

    // Splice: ... cand, M, hole..., M, cand, ...
    std::vector<int> merged;
    merged.reserve(ring.size() + hole.size() + 2);
    for (int i = 0; i <= cand; ++i) merged.push_back(ring[i]);
    for (size_t k = 0; k <= hole.size(); ++k) {
      merged.push_back(ring_offset[h] + (int)((m_local + k) % hole.size()));
    }
    merged.push_back(ring[cand]);
    for (size_t i = cand + 1; i < ring.size(); ++i) merged.push_back(ring[i]);
    ring = std::move(merged);
  }

  // Ear clipping over the merged ring.
  std::vector<std::array<int, 3>> tris;
  std::vector<int> poly = ring;
  auto coincident = [&](const Vec2& a, const Vec2& b) { return dist(a, b) <= point_eps; };

  int stall_guard = 0;
  bool relaxed = false;
  while (poly.size() > 3) {
    const size_t n = poly.size();
    bool clipped = false;
    for (size_t i = 0; i < n; ++i) {
      const Vec2& a = pts[poly[(i + n - 1) % n]];
      const Vec2& b = pts[poly[i]];
      const Vec2& c = pts[poly[(i + 1) % n]];
      double area2 = tri_area2(a, b, c);
      if (area2 <= eps) continue;  // reflex or degenerate corner
      bool blocked = false;
      for (size_t j = 0; j < n && !blocked; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        const Vec2& q = pts[poly[j]];
        if (coincident(q, a) || coincident(q, b) || coincident(q, c)) continue;
        double block_eps = relaxed ? -point_eps * scale : eps;
        if (point_in_triangle(q, a, b, c, block_eps)) blocked = true;
      }
      if (blocked) continue;
      tris.push_back({poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]});
      poly.erase(poly.begin() + (long)i);
      clipped = true;
      break;
    }
    if (!clipped) {
      // Drop exactly-collinear corners that can never become ears.
      bool dropped = false;
      for (size_t i = 0; i < poly.size(); ++i) {
        const size_t m = poly.size();
        const Vec2& a = pts[poly[(i + m - 1) % m]];
        const Vec2& b = pts[poly[i]];
        const Vec2& c = pts[poly[(i + 1) % m]];
        if (std::abs(tri_area2(a, b, c)) <= eps &&
            (coincident(a, b) || coincident(b, c) || coincident(a, c))) {
          poly.erase(poly.begin() + (long)i);
          dropped = true;
          break;
        }
      }
      if (dropped) continue;
      if (!relaxed) {
        relaxed = true;  // allow on-boundary blockers once
        continue;
      }
      if (++stall_guard > 1) throw Error("triangulate: no ear found (degenerate polygon)");
    }
  }
  if (poly.size() == 3) {
    if (std::abs(tri_area2(pts[poly[0]], pts[poly[1]], pts[poly[2]])) > eps) {
      tris.push_back({poly[0], poly[1], poly[2]});
    }
  }
  return tris;
}

}  // namespace massfit
