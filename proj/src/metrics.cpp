#include "massfit/metrics.hpp"

#include <map>
#include <random>

#include "massfit/parallel.hpp"
#include "massfit/triangulate.hpp"

namespace massfit {

ErrorGrid error_grid(const TriMesh& input, const TriMesh& model, double cell) {
  if (cell <= 0.0) throw Error("error_grid: cell size must be positive");
  ErrorGrid g;
  g.cell = cell;
  BBox2 box = input.bbox_xy();
  box.expand(model.bbox_xy());
  if (box.empty()) return g;
  box = box.dilated(cell);
  g.origin = box.min;
  g.cols = std::max(1, (int)std::ceil(box.size().x / cell));
  g.rows = std::max(1, (int)std::ceil(box.size().y / cell));
  g.sq_error.assign((size_t)g.rows * g.cols, 0.0);
  g.valid.assign((size_t)g.rows * g.cols, 0);

  HeightField hf_in(input);
  HeightField hf_model(model);
  parallel_for((size_t)g.rows, [&](size_t r) {
    for (int c = 0; c < g.cols; ++c) {
      Vec2 p = g.cell_center((int)r, c);
      auto hi = hf_in.query(p);
      auto hm = hf_model.query(p);
      if (!hi || !hm) continue;
      double d = *hi - *hm;
      g.sq_error[r * g.cols + c] = d * d;
      g.valid[r * g.cols + c] = 1;
    }
  });
  return g;
}

double mse(const ErrorGrid& grid) {
  double sum = 0.0;
  long count = 0;
  for (size_t i = 0; i < grid.sq_error.size(); ++i) {
    if (grid.valid[i]) {
      sum += grid.sq_error[i];
      ++count;
    }
  }
  if (count == 0) throw Error("mse: no valid cells");
  return sum / count;
}

double polygon_area_of_intersection(const Polygon2& a, const Polygon2& b) {
  if (a.outer.size() < 3 || b.outer.size() < 3) return 0.0;
  auto tris_of = [](const Polygon2& poly) {
    std::vector<std::vector<Vec2>> rings;
    for (const auto* r : poly.rings()) rings.push_back(*r);
    std::vector<Vec2> pts;
    for (const auto& r : rings) pts.insert(pts.end(), r.begin(), r.end());
    std::vector<std::array<Vec2, 3>> tris;
    for (const auto& t : triangulate_polygon(rings)) {
      tris.push_back({pts[t[0]], pts[t[1]], pts[t[2]]});
    }
    return tris;
  };
  auto ta = tris_of(a);
  auto tb = tris_of(b);
  double area = 0.0;
  for (const auto& t0 : ta) {
    for (const auto& t1 : tb) {
      area += triangle_intersection_area(t0, t1);
    }
  }
  return area;
}

IouResult segmentation_iou(const std::vector<Footprint>& predicted,
                           const std::vector<Footprint>& truth) {
  IouResult res;
  std::vector<int> order(predicted.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return predicted[a].poly.area() > predicted[b].poly.area();
  });
  std::vector<bool> truth_used(truth.size(), false);
  double sum = 0.0;
  for (int pi : order) {
    double best_iou = 0.0;
    int best_t = -1;
    for (size_t ti = 0; ti < truth.size(); ++ti) {
      if (truth_used[ti]) continue;
      double inter = polygon_area_of_intersection(predicted[pi].poly, truth[ti].poly);
      if (inter <= 0.0) continue;
      double uni = predicted[pi].poly.area() + truth[ti].poly.area() - inter;
      double iou = uni > 0.0 ? inter / uni : 0.0;
      if (iou > best_iou) {
        best_iou = iou;
        best_t = (int)ti;
      }
    }
    if (best_t >= 0) {
      truth_used[best_t] = true;
      sum += best_iou;
      ++res.matched;
    } else {
      ++res.unmatched_predicted;
    }
  }
  for (bool used : truth_used) {
    if (!used) ++res.unmatched_truth;
  }
  res.mean_iou = res.matched > 0 ? sum / res.matched : 0.0;
  return res;
}

namespace {

// Roof surface sampler: height and steepest-descent direction at a plan
// point, taking the lowest covering roof face (so valley creases drain along
// the lower sheet).
struct RoofSurface {
  const MassModel& model;
  std::vector<int> roof_tris;

  explicit RoofSurface(const MassModel& m) : model(m) {
    for (size_t t = 0; t < m.faces.size(); ++t) {
      if (m.faces[t].label == FaceLabel::kRoof) roof_tris.push_back((int)t);
    }
  }

  bool sample(const Vec2& p, double& z, Vec2& descent) const {
    bool found = false;
    for (int ti : roof_tris) {
      const auto& t = model.mesh.triangles[ti];
      Vec2 a = model.mesh.vertices[t[0]].xy();
      Vec2 b = model.mesh.vertices[t[1]].xy();
      Vec2 c = model.mesh.vertices[t[2]].xy();
      double den = cross(b - a, c - a);
      if (std::abs(den) < 1e-12) continue;
      double w1 = cross(b - p, c - p) / den;
      double w2 = cross(c - p, a - p) / den;
      double w3 = 1.0 - w1 - w2;
      if (w1 < -1e-9 || w2 < -1e-9 || w3 < -1e-9) continue;
      double zt = w1 * model.mesh.vertices[t[0]].z + w2 * model.mesh.vertices[t[1]].z +
                  w3 * model.mesh.vertices[t[2]].z;
      if (found && zt >= z) continue;
      Vec3 nrm = cross(model.mesh.vertices[t[1]] - model.mesh.vertices[t[0]],
                       model.mesh.vertices[t[2]] - model.mesh.vertices[t[0]]);
      if (std::abs(nrm.z) < 1e-12) continue;
      z = zt;
      descent = Vec2{nrm.x / nrm.z, nrm.y / nrm.z};  // -grad(z)
      found = true;
    }
    if (found && descent.norm() > 1e-12) descent = descent.normalized();
    return found;
  }
};

}  // namespace

RaindropResult raindrop_check(const MassModel& model, int n, uint64_t seed) {
  RaindropResult res;
  RoofSurface roof(model);
  std::vector<double> cum_area;
  double total = 0.0;
  for (int ti : roof.roof_tris) {
    const auto& tri = model.mesh.triangles[ti];
    double area = 0.5 *
                  cross(model.mesh.vertices[tri[1]] - model.mesh.vertices[tri[0]],
                        model.mesh.vertices[tri[2]] - model.mesh.vertices[tri[0]])
                      .norm();
    total += area;
    cum_area.push_back(total);
  }
  if (roof.roof_tris.empty() || total <= 0.0) return res;  // vacuous pass

  double diameter = model.mesh.bbox_xy().diameter();
  double max_path = 10.0 * diameter;
  const double step = std::max(diameter / 400.0, 1e-4);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return (double)(rng() >> 11) * 0x1.0p-53; };

  for (int k = 0; k < n; ++k) {
    // Area-weighted roof start point.
    double pick = uniform() * total;
    size_t idx = std::lower_bound(cum_area.begin(), cum_area.end(), pick) - cum_area.begin();
    idx = std::min(idx, roof.roof_tris.size() - 1);
    const auto& t0 = model.mesh.triangles[roof.roof_tris[idx]];
    double u = uniform(), v = uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    Vec3 a3 = model.mesh.vertices[t0[0]];
    Vec3 b3 = model.mesh.vertices[t0[1]];
    Vec3 c3 = model.mesh.vertices[t0[2]];
    Vec2 p = (a3 + (b3 - a3) * u + (c3 - a3) * v).xy();
    ++res.paths_run;

    double z = 0.0;
    Vec2 descent;
    bool on_roof = roof.sample(p, z, descent);
    bool reached_gutter = false;
    double travelled = 0.0;
    int stalls = 0;
    while (on_roof && travelled <= max_path) {
      if (descent.norm() < 1e-9) break;  // horizontal roof patch: a plateau
      Vec2 q = p + descent * step;
      double zq;
      Vec2 dq;
      if (!roof.sample(q, zq, dq)) {
        // Stepped off the roof while going downhill: crossed the gutter.
        reached_gutter = true;
        break;
      }
      if (zq >= z - 1e-12) {
        if (++stalls > 3) break;  // local pit
      } else {
        stalls = 0;
      }
      travelled += step;
      p = q;
      z = zq;
      descent = dq;
    }
    if (!reached_gutter) {
      res.pass = false;
      res.counterexample = {p.x, p.y, z};
      return res;
    }
  }
  return res;
}

}  // namespace massfit
