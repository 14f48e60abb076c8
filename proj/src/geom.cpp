#include "massfit/geom.hpp"

namespace massfit {

double ring_area(const std::vector<Vec2>& ring) {
  double s = 0.0;
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = ring[i];
    const Vec2& q = ring[(i + 1) % n];
    s += cross(p, q);
  }
  return 0.5 * s;
}

bool ring_contains(const std::vector<Vec2>& ring, const Vec2& p) {
  const size_t n = ring.size();
  if (n < 3) return false;
  // Boundary counts as inside.
  for (size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= 1e-12) return true;
  }
  bool in = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double t = (p.y - a.y) / (b.y - a.y);
      if (p.x < a.x + t * (b.x - a.x)) in = !in;
    }
  }
  return in;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 <= 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + ab * t);
}

double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  // Proper crossing means distance zero.
  Vec2 da = a1 - a0, db = b1 - b0;
  double d = cross(da, db);
  if (std::abs(d) > 1e-15) {
    double t = cross(b0 - a0, db) / d;
    double u = cross(b0 - a0, da) / d;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
  }
  return std::min(std::min(point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1)),
                  std::min(point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)));
}

double Polygon2::area() const {
  double a = std::abs(ring_area(outer));
  for (const auto& h : holes) a -= std::abs(ring_area(h));
  return a;
}

BBox2 Polygon2::bbox() const {
  BBox2 b;
  for (const auto& p : outer) b.expand(p);
  return b;
}

Vec2 Polygon2::centroid() const {
  double a = 0.0;
  Vec2 c{0.0, 0.0};
  const size_t n = outer.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = outer[i];
    const Vec2& q = outer[(i + 1) % n];
    double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  if (std::abs(a) < 1e-15) return outer.empty() ? Vec2{} : outer[0];
  return c / (3.0 * a);
}

bool Polygon2::contains(const Vec2& p) const {
  if (!ring_contains(outer, p)) return false;
  for (const auto& h : holes) {
    // On a hole boundary still counts as inside the polygon.
    bool on_boundary = false;
    const size_t n = h.size();
    for (size_t i = 0; i < n && !on_boundary; ++i) {
      if (point_segment_distance(p, h[i], h[(i + 1) % n]) <= 1e-12) on_boundary = true;
    }
    if (!on_boundary && ring_contains(h, p)) return false;
  }
  return true;
}

double Polygon2::boundary_distance(const Vec2& p) const {
  double best = std::numeric_limits<double>::max();
  auto scan = [&](const std::vector<Vec2>& ring) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      best = std::min(best, point_segment_distance(p, ring[i], ring[(i + 1) % n]));
    }
  };
  scan(outer);
  for (const auto& h : holes) scan(h);
  return best;
}

void Polygon2::normalize_orientation() {
  if (ring_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());
  for (auto& h : holes) {
    if (ring_area(h) > 0.0) std::reverse(h.begin(), h.end());
  }
}

std::vector<const std::vector<Vec2>*> Polygon2::rings() const {
  std::vector<const std::vector<Vec2>*> r;
  r.push_back(&outer);
  for (const auto& h : holes) r.push_back(&h);
  return r;
}

Polygon2 Polygon2::rect(double x0, double y0, double x1, double y1) {
  Polygon2 p;
  p.outer = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return p;
}

Polygon2 bbox_polygon(const BBox2& b) {
  return Polygon2::rect(b.min.x, b.min.y, b.max.x, b.max.y);
}

double canonical_angle(const Vec2& dir) {
  double a = std::atan2(dir.y, dir.x);
  while (a < 0.0) a += kPi;
  while (a >= kPi) a -= kPi;
  return a;
}

double angle_diff_mod_pi(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

Vec2 dir_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

std::optional<Vec2> line_intersection(const Vec2& p1, const Vec2& d1, const Vec2& p2,
                                      const Vec2& d2, double eps) {
  double den = cross(d1, d2);
  if (std::abs(den) < eps) return std::nullopt;
  double t = cross(p2 - p1, d2) / den;
  return p1 + d1 * t;
}

namespace {
void dp_recurse(const std::vector<Vec2>& pts, size_t lo, size_t hi, double tol,
                std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1.0;
  size_t worst_i = lo;
  for (size_t i = lo + 1; i < hi; ++i) {
    double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > worst) {
      worst = d;
      worst_i = i;
    }
  }
  if (worst > tol) {
    keep[worst_i] = true;
    dp_recurse(pts, lo, worst_i, tol, keep);
    dp_recurse(pts, worst_i, hi, tol, keep);
  }
}
}  // namespace

std::vector<Vec2> douglas_peucker(const std::vector<Vec2>& pts, double tol) {
  if (pts.size() <= 2) return pts;
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  dp_recurse(pts, 0, pts.size() - 1, tol, keep);
  std::vector<Vec2> out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  return out;
}

std::vector<Vec2> merge_collinear(const std::vector<Vec2>& ring, double angle_tol) {
  const size_t n = ring.size();
  if (n < 4) return ring;
  std::vector<Vec2> out;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& prev = ring[(i + n - 1) % n];
    const Vec2& cur = ring[i];
    const Vec2& next = ring[(i + 1) % n];
    Vec2 d0 = (cur - prev).normalized();
    Vec2 d1 = (next - cur).normalized();
    double turn = std::atan2(std::abs(cross(d0, d1)), dot(d0, d1));
    if (turn > angle_tol) out.push_back(cur);
  }
  return out.size() >= 3 ? out : ring;
}

bool ring_simple(const std::vector<Vec2>& ring, double eps) {
  const size_t n = ring.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    Vec2 a0 = ring[i], a1 = ring[(i + 1) % n];
    for (size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share an endpoint).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      Vec2 b0 = ring[j], b1 = ring[(j + 1) % n];
      if (segment_segment_distance(a0, a1, b0, b1) < eps) return false;
    }
  }
  return true;
}

namespace {
// Sutherland-Hodgman clip of a convex polygon by the half plane left of a->b.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b) {
  std::vector<Vec2> out;
  const size_t n = poly.size();
  Vec2 d = b - a;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    double sp = cross(d, p - a);
    double sq = cross(d, q - a);
    if (sp >= 0.0) out.push_back(p);
    if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
      double t = sp / (sp - sq);
      out.push_back(p + (q - p) * t);
    }
  }
  return out;
}
}  // namespace

double triangle_intersection_area(const std::array<Vec2, 3>& t0, const std::array<Vec2, 3>& t1) {
  std::vector<Vec2> a(t0.begin(), t0.end());
  std::vector<Vec2> b(t1.begin(), t1.end());
  if (ring_area(a) < 0.0) std::reverse(a.begin(), a.end());
  if (ring_area(b) < 0.0) std::reverse(b.begin(), b.end());
  std::vector<Vec2> poly = a;
  for (size_t i = 0; i < b.size() && !poly.empty(); ++i) {
    poly = clip_halfplane(poly, b[i], b[(i + 1) % b.size()]);
  }
  if (poly.size() < 3) return 0.0;
  return std::abs(ring_area(poly));
}

}  // namespace massfit
