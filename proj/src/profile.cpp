#include "massfit/profile.hpp"

namespace massfit {

double Profile::wall_height() const {
  double h = 0.0;
  for (size_t i = 1; i < points.size(); ++i) {
    if (std::abs(points[i].offset) > 1e-9) break;
    h = points[i].height;
  }
  return h;
}

void Profile::validate() const {
  if (points.size() < 2) throw Error("Profile: needs at least 2 points");
  if (std::abs(points[0].offset) > 1e-9 || std::abs(points[0].height) > 1e-9) {
    throw Error("Profile: must start at (0,0)");
  }
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i].height <= points[i - 1].height + 1e-12) {
      throw Error("Profile: heights must be strictly increasing");
    }
    if (points[i].offset < points[i - 1].offset - 1e-9) {
      throw Error("Profile: offsets must be non-decreasing (no overhangs)");
    }
  }
}

double Profile::offset_at(double h) const {
  if (points.empty()) return 0.0;
  if (h <= points.front().height) return points.front().offset;
  for (size_t i = 1; i < points.size(); ++i) {
    if (h <= points[i].height) {
      const auto& a = points[i - 1];
      const auto& b = points[i];
      double t = (h - a.height) / (b.height - a.height);
      return a.offset + t * (b.offset - a.offset);
    }
  }
  // Extrapolate the last segment.
  const auto& a = points[points.size() - 2];
  const auto& b = points.back();
  double slope = (b.offset - a.offset) / (b.height - a.height);
  return b.offset + slope * (h - b.height);
}

double Profile::speed_at(double h) const {
  if (points.size() < 2) return 0.0;
  size_t seg = points.size() - 2;
  for (size_t i = 1; i < points.size(); ++i) {
    if (h < points[i].height - 1e-12) {
      seg = i - 1;
      break;
    }
  }
  const auto& a = points[seg];
  const auto& b = points[seg + 1];
  return (b.offset - a.offset) / (b.height - a.height);
}

std::vector<double> Profile::breakpoint_heights() const {
  std::vector<double> hs;
  for (size_t i = 1; i + 1 < points.size(); ++i) hs.push_back(points[i].height);
  return hs;
}

Profile Profile::vertical(double height) {
  if (height <= 0.0) throw Error("Profile::vertical: height must be positive");
  Profile p;
  p.points = {{0.0, 0.0}, {0.0, height}};
  p.quality = ProfileQuality::kSimple;
  return p;
}

namespace {

// Upper envelope of the slice segments at abscissa x, if covered.
std::optional<double> slice_envelope(const std::vector<Segment2>& slice, double x) {
  std::optional<double> best;
  for (const auto& s : slice) {
    double x0 = s.a.x, y0 = s.a.y, x1 = s.b.x, y1 = s.b.y;
    if (x0 > x1) {
      std::swap(x0, x1);
      std::swap(y0, y1);
    }
    double y;
    if (x1 - x0 < 1e-9) {
      if (std::abs(x - x0) > 1e-9) continue;
      y = std::max(y0, y1);
    } else {
      if (x < x0 || x > x1) continue;
      y = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    if (!best || y > *best) best = y;
  }
  return best;
}

}  // namespace

std::vector<NoisyProfile> extract_noisy_profiles(const TriMesh& mesh, const Segment2& edge,
                                                 const ProfileFitParams& p) {
  if (p.spacing <= 0.0) throw Error("extract_noisy_profiles: spacing must be positive");
  double len = edge.length();
  int n_stations = std::max(1, (int)std::floor(len / p.spacing));
  Vec2 along = edge.dir();
  Vec2 inward = along.perp();  // interior is left of the CCW footprint edge

  std::vector<NoisyProfile> out;
  for (int si = 0; si < n_stations; ++si) {
    double t = (si + 0.5) * len / n_stations;
    Vec2 station = edge.a + along * t;
    NoisyProfile np;
    np.station = t;
    auto slice = slice_mesh_vertical(mesh, station, inward);
    double cur_max = std::numeric_limits<double>::lowest();
    double last_rise_x = -p.start_back;
    for (double x = -p.start_back; x <= p.max_depth; x += p.sample_step) {
      auto env = slice_envelope(slice, x);
      if (env && *env > cur_max + 1e-9) {
        cur_max = *env;
        last_rise_x = x;
        np.points.push_back({std::max(0.0, x), cur_max});
      }
      // Climb over: nothing higher within the lookahead window.
      if (!np.points.empty() && x - last_rise_x > p.climb_lookahead) break;
      if (np.points.empty() && x > p.climb_lookahead) break;  // mesh absent here
    }
    out.push_back(std::move(np));
  }
  return out;
}

Profile merge_clean_profile(const std::vector<NoisyProfile>& noisy, const ProfileFitParams& p) {
  std::vector<const NoisyProfile*> valid;
  for (const auto& np : noisy) {
    if (!np.empty()) valid.push_back(&np);
  }
  if (valid.empty()) throw Error("merge_clean_profile: all stations empty");

  // Offset of a climb at height h; undefined above its top or below its base.
  auto offset_of = [](const NoisyProfile& np, double h) -> std::optional<double> {
    const auto& pts = np.points;
    if (h > pts.back().y + 1e-9) return std::nullopt;
    if (h <= pts.front().y) return pts.front().x;
    for (size_t i = 1; i < pts.size(); ++i) {
      if (h <= pts[i].y) {
        double t = (h - pts[i - 1].y) / (pts[i].y - pts[i - 1].y);
        return pts[i - 1].x + t * (pts[i].x - pts[i - 1].x);
      }
    }
    return pts.back().x;
  };

  double top = 0.0;
  for (const auto* np : valid) top = std::max(top, np->points.back().y);
  int steps = std::max(1, (int)std::round(top / p.height_step));
  size_t quorum = (valid.size() + 1) / 2;

  std::vector<double> grid_h, grid_off;
  for (int k = 1; k <= steps; ++k) {
    double h = k * p.height_step;
    std::vector<double> offs;
    for (const auto* np : valid) {
      auto o = offset_of(*np, h);
      if (o) offs.push_back(std::max(0.0, *o));
    }
    if (offs.size() < quorum) break;  // too few stations reach this height
    std::sort(offs.begin(), offs.end());
    double med = offs.size() % 2 ? offs[offs.size() / 2]
                                 : 0.5 * (offs[offs.size() / 2 - 1] + offs[offs.size() / 2]);
    grid_h.push_back(h);
    grid_off.push_back(med);
  }
  if (grid_h.empty()) throw Error("merge_clean_profile: no consensus height steps");

  // Urban prior: zero offset up to the wall height, monotone pitches above.
  double wall_h = 0.0;
  for (size_t k = 0; k < grid_h.size(); ++k) {
    if (grid_off[k] < p.wall_offset_tol) wall_h = grid_h[k];
  }
  Profile prof;
  prof.points.push_back({0.0, 0.0});
  if (wall_h > 0.0) prof.points.push_back({0.0, wall_h});
  double run = 0.0;
  for (size_t k = 0; k < grid_h.size(); ++k) {
    if (grid_h[k] <= wall_h + 1e-9) continue;
    run = std::max(run, grid_off[k]);
    prof.points.push_back({run, grid_h[k]});
  }
  prof.validate();
  return prof;
}

Profile simplify_profile(const Profile& prof, ProfileQuality quality) {
  prof.validate();
  Profile out;
  out.quality = quality;
  if (quality == ProfileQuality::kSimple) {
    out.points = {{0.0, 0.0}, {0.0, prof.top_height()}};
    return out;
  }
  double tol = quality == ProfileQuality::kModerate ? 0.5 : 0.05;
  double wall_h = prof.wall_height();
  std::vector<Vec2> above;
  for (const auto& pt : prof.points) {
    if (pt.height >= wall_h - 1e-12) above.push_back({pt.offset, pt.height});
  }
  std::vector<Vec2> simplified = douglas_peucker(above, tol);
  out.points.push_back({0.0, 0.0});
  for (const auto& v : simplified) {
    if (v.y <= 1e-12) continue;  // keep the origin unique
    out.points.push_back({std::max(0.0, v.x), v.y});
  }
  if (out.points.size() < 2) out.points.push_back({0.0, prof.top_height()});
  // Re-impose monotonicity after simplification.
  for (size_t i = 1; i < out.points.size(); ++i) {
    out.points[i].offset = std::max(out.points[i].offset, out.points[i - 1].offset);
  }
  out.validate();
  return out;
}

}  // namespace massfit
