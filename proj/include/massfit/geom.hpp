#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace massfit {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Global tolerances (meters / square meters). Inputs are metric by contract.
constexpr double kLengthEps = 1e-6;    // minimum meaningful segment length
constexpr double kAreaEps = 1e-9;      // degenerate-triangle area cutoff
constexpr double kSnapEps = 1e-4;      // endpoint snap for slice joining
constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  // 90 degree counter-clockwise rotation.
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }
inline bool near(const Vec2& a, const Vec2& b, double eps) { return dist(a, b) <= eps; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec2 xy() const { return {x, y}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// 2D ground-plane segment, optionally tagged with the slice level and source
// triangle it came from.
struct Segment2 {
  Vec2 a;
  Vec2 b;
  double level = 0.0;   // slice height for mesh contours, 0 otherwise
  int source_tri = -1;  // originating triangle, -1 if not applicable

  Segment2() = default;
  Segment2(const Vec2& a_, const Vec2& b_) : a(a_), b(b_) {}

  double length() const { return dist(a, b); }
  Vec2 midpoint() const { return (a + b) * 0.5; }
  Vec2 dir() const { return (b - a).normalized(); }
};

struct BBox2 {
  Vec2 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

  bool empty() const { return min.x > max.x || min.y > max.y; }
  void expand(const Vec2& p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  void expand(const BBox2& o) {
    if (o.empty()) return;
    expand(o.min);
    expand(o.max);
  }
  BBox2 dilated(double d) const {
    BBox2 r = *this;
    r.min -= Vec2{d, d};
    r.max += Vec2{d, d};
    return r;
  }
  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  Vec2 size() const { return max - min; }
  double diameter() const { return empty() ? 0.0 : size().norm(); }
};

// Signed area of a closed ring (positive = counter-clockwise).
double ring_area(const std::vector<Vec2>& ring);
// Even-odd point-in-ring test; points on the boundary count as inside.
bool ring_contains(const std::vector<Vec2>& ring, const Vec2& p);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

// Simple polygon with optional holes. Outer ring counter-clockwise, holes
// clockwise; rings are stored without a repeated closing vertex.
struct Polygon2 {
  std::vector<Vec2> outer;
  std::vector<std::vector<Vec2>> holes;

  Polygon2() = default;
  explicit Polygon2(std::vector<Vec2> outer_) : outer(std::move(outer_)) {}

  double area() const;  // outer area minus hole areas
  BBox2 bbox() const;
  Vec2 centroid() const;  // area centroid of the outer ring
  bool contains(const Vec2& p) const;
  double boundary_distance(const Vec2& p) const;  // distance to nearest ring edge
  // Inside the polygon dilated by d (holes shrink accordingly).
  bool contains_dilated(const Vec2& p, double d) const {
    return contains(p) || boundary_distance(p) <= d;
  }
  // Flips rings as needed so outer is CCW and holes are CW.
  void normalize_orientation();
  // All rings including the outer one; index 0 is the outer ring.
  std::vector<const std::vector<Vec2>*> rings() const;
  static Polygon2 rect(double x0, double y0, double x1, double y1);
};

// Axis-free rectangle helper used for bbox polygons.
Polygon2 bbox_polygon(const BBox2& b);

// Angles of undirected 2D lines live in [0, pi).
double canonical_angle(const Vec2& dir);
double angle_diff_mod_pi(double a, double b);
Vec2 dir_from_angle(double theta);

// Intersection of two infinite lines given as (point, direction); nullopt if
// nearly parallel (|cross| < eps).
std::optional<Vec2> line_intersection(const Vec2& p1, const Vec2& d1, const Vec2& p2,
                                      const Vec2& d2, double eps = 1e-12);

// Douglas-Peucker polyline simplification, endpoints always kept.
std::vector<Vec2> douglas_peucker(const std::vector<Vec2>& pts, double tol);

// Removes ring vertices whose adjacent edges deviate by less than angle_tol
// radians from a straight line.
std::vector<Vec2> merge_collinear(const std::vector<Vec2>& ring, double angle_tol);

// Ring simplicity check (no self intersections beyond shared endpoints).
bool ring_simple(const std::vector<Vec2>& ring, double eps = 1e-9);

// Area of the intersection of two triangles (convex clipping).
double triangle_intersection_area(const std::array<Vec2, 3>& t0, const std::array<Vec2, 3>& t1);

}  // namespace massfit
