// Property stress for the extrusion kernel: every footprint/profile mix it
// accepts must come out as a watertight labeled solid that drains.

#include <random>

#include "test_support.hpp"

#include "massfit/extrude.hpp"
#include "massfit/metrics.hpp"

using namespace massfit;
using namespace massfit::testing;

namespace {

Profile sloped(double wall, double run, double rise) {
  Profile p;
  if (wall > 0) {
    p.points = {{0, 0}, {0, wall}, {run, wall + rise}};
  } else {
    p.points = {{0, 0}, {run, rise}};
  }
  return p;
}

void check_model(const Polygon2& fp, const std::vector<Profile>& profiles, double cap, int id) {
  MassModel m = extrude_with_retry(fp, profiles, cap, id);
  m.validate();
  auto rr = raindrop_check(m, 40, 7);
  CAPTURE(id);
  CHECK(rr.pass);
  CHECK(signed_volume(m.mesh) <= fp.area() * cap + 1e-6);
}

}  // namespace

TEST_CASE("plus and H footprints: simultaneous pinch events") {
  Polygon2 plus;
  plus.outer = {{2, 0}, {4, 0}, {4, 2}, {6, 2}, {6, 4}, {4, 4},
                {4, 6}, {2, 6}, {2, 4}, {0, 4}, {0, 2}, {2, 2}};
  check_model(plus, std::vector<Profile>(12, sloped(0, 1, 1)), 10, 0);
  check_model(plus, std::vector<Profile>(12, sloped(1.5, 1, 1)), 10, 1);
  check_model(plus, std::vector<Profile>(12, sloped(0.5, 1, 1)), 1.2, 2);

  Polygon2 h;
  h.outer = {{0, 0}, {2, 0}, {2, 3}, {5, 3}, {5, 0}, {7, 0},
             {7, 8}, {5, 8}, {5, 5}, {2, 5}, {2, 8}, {0, 8}};
  check_model(h, std::vector<Profile>(12, sloped(0, 1, 1)), 10, 3);
  check_model(h, std::vector<Profile>(12, sloped(1.0, 2, 1)), 10, 4);
}

TEST_CASE("courtyards with sloped profiles: wavefront merges") {
  Polygon2 donut = Polygon2::rect(0, 0, 10, 10);
  donut.holes.push_back({{4, 4}, {4, 6}, {6, 6}, {6, 4}});
  check_model(donut, std::vector<Profile>(8, sloped(0, 1, 1)), 10, 5);
  check_model(donut, std::vector<Profile>(8, sloped(1.0, 1, 1)), 10, 6);
  check_model(donut, std::vector<Profile>(8, sloped(0.5, 1, 1)), 1.4, 7);

  Polygon2 off = Polygon2::rect(0, 0, 12, 9);
  off.holes.push_back({{2, 2}, {2, 4}, {4, 4}, {4, 2}});
  check_model(off, std::vector<Profile>(8, sloped(0, 1.5, 1)), 10, 8);

  Polygon2 two = Polygon2::rect(0, 0, 14, 8);
  two.holes.push_back({{2, 3}, {2, 5}, {4, 5}, {4, 3}});
  two.holes.push_back({{9, 3}, {9, 5}, {11, 5}, {11, 3}});
  check_model(two, std::vector<Profile>(12, sloped(0, 1, 1)), 10, 9);
}

TEST_CASE("events coinciding with profile breakpoints") {
  Polygon2 sq = Polygon2::rect(0, 0, 4, 4);
  Profile top_at_collapse;
  top_at_collapse.points = {{0, 0}, {0, 1}, {2, 3}};
  check_model(sq, std::vector<Profile>(4, top_at_collapse), 10, 10);
  Profile bp_at_apex;
  bp_at_apex.points = {{0, 0}, {2, 2}, {3, 4}};
  check_model(sq, std::vector<Profile>(4, bp_at_apex), 10, 11);
}

TEST_CASE("slivers, triangles, regular polygons") {
  check_model(Polygon2::rect(0, 0, 12, 0.8), std::vector<Profile>(4, sloped(0, 1, 1)), 10, 12);
  check_model(Polygon2::rect(0, 0, 12, 0.8), std::vector<Profile>(4, sloped(2.0, 1, 1)), 10, 13);

  Polygon2 tri;
  tri.outer = {{0, 0}, {8, 0}, {4, 5}};
  check_model(tri, std::vector<Profile>(3, sloped(1, 1, 1)), 10, 14);
  Polygon2 thin;
  thin.outer = {{0, 0}, {10, 0.05}, {5, 1.2}};
  check_model(thin, std::vector<Profile>(3, sloped(0, 1, 1)), 10, 15);

  for (int n : {3, 5, 6, 8, 12}) {
    Polygon2 reg;
    for (int i = 0; i < n; ++i) {
      double a = 2 * kPi * i / n;
      reg.outer.push_back({5 * std::cos(a), 5 * std::sin(a)});
    }
    check_model(reg, std::vector<Profile>((size_t)n, sloped(0.7, 1, 1)), 20, 20 + n);
  }
}

TEST_CASE("random staircase footprints with mixed profiles") {
  std::mt19937_64 rng(12345);
  auto uni = [&](double a, double b) { return a + (b - a) * ((rng() >> 11) * 0x1.0p-53); };
  int run_count = 0;
  for (int trial = 0; trial < 40; ++trial) {
    double W = uni(8, 16), H = uni(6, 12);
    std::vector<Vec2> ring = {{0, 0}, {W, 0}};
    double x = W, y = H;
    ring.push_back({W, y});
    int steps = 1 + (int)(rng() % 3);
    for (int s = 0; s < steps && x > 2.5; ++s) {
      double nx = x - uni(1.5, x / 2);
      double ny = std::max(2.0, y + uni(-2.5, 2.5));
      if (std::abs(ny - y) < 0.3) ny = y + 1.0;
      ring.push_back({nx, y});
      ring.push_back({nx, ny});
      x = nx;
      y = ny;
    }
    ring.push_back({0, y});
    Polygon2 fp;
    fp.outer = ring;
    fp.normalize_orientation();
    if (!ring_simple(fp.outer)) continue;
    std::vector<Profile> profiles;
    for (size_t i = 0; i < fp.outer.size(); ++i) {
      int kind = (int)(rng() % 3);
      Profile p;
      if (kind == 0) {
        p = Profile::vertical(uni(2, 5));
      } else if (kind == 1) {
        p.points = {{0, 0}, {0, uni(1.5, 3)}, {uni(1, 4), uni(3.5, 6)}};
      } else {
        double w = uni(1.5, 3);
        p.points = {{0, 0}, {0, w}, {uni(0.5, 1.5), w + uni(0.5, 1.5)}, {uni(2, 5), w + uni(2, 4)}};
      }
      profiles.push_back(p);
    }
    check_model(fp, profiles, uni(2.5, 7), trial);
    ++run_count;
  }
  CHECK(run_count >= 30);
}

TEST_CASE("random irregular convex footprints") {
  std::mt19937_64 rng(777);
  auto uni = [&](double a, double b) { return a + (b - a) * ((rng() >> 11) * 0x1.0p-53); };
  for (int trial = 0; trial < 20; ++trial) {
    int n = 5 + (int)(rng() % 4);
    Polygon2 fp;
    for (int i = 0; i < n; ++i) {
      double ang = 2 * kPi * i / n + uni(-0.2, 0.2);
      double rad = uni(3, 6);
      fp.outer.push_back({rad * std::cos(ang), rad * std::sin(ang)});
    }
    fp.normalize_orientation();
    if (!ring_simple(fp.outer)) continue;
    std::vector<Profile> profiles;
    for (int i = 0; i < n; ++i) {
      profiles.push_back(sloped(1.0, uni(0.7, 2.0), uni(0.7, 2.0)));
    }
    check_model(fp, profiles, uni(2, 8), 100 + trial);
  }
}
