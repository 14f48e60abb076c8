#pragma once

#include "massfit/geom.hpp"
#include "massfit/mesh.hpp"

namespace massfit {

enum class ProfileQuality { kSimple, kModerate, kHigh };

struct ProfilePoint {
  double offset = 0.0;  // m, inward-positive
  double height = 0.0;  // m
};

// Monotone profile attached to a footprint edge: heights strictly increasing,
// offsets non-decreasing, starting at (0,0). A leading zero-offset run is the
// wall; sloped runs above are roof pitches.
struct Profile {
  std::vector<ProfilePoint> points;
  ProfileQuality quality = ProfileQuality::kHigh;

  double top_height() const { return points.empty() ? 0.0 : points.back().height; }
  double wall_height() const;
  void validate() const;

  // Inward offset of the wavefront at height h; the last segment extrapolates
  // above the top (a vertical wall keeps extruding until the cap).
  double offset_at(double h) const;
  // d(offset)/d(height) of the segment active at h.
  double speed_at(double h) const;
  // Heights where the active segment changes (interior vertices).
  std::vector<double> breakpoint_heights() const;

  static Profile vertical(double height);
};

// Raw monotone climb extracted at one station along a footprint edge.
struct NoisyProfile {
  std::vector<Vec2> points;  // (offset, height)
  double station = 0.0;      // distance of the station along the edge

  bool empty() const { return points.empty(); }
};

struct ProfileFitParams {
  double spacing = 1.0;          // m between stations along the edge
  double climb_lookahead = 1.5;  // m, stop climbing when nothing higher ahead
  double sample_step = 0.05;     // m, slice envelope scan step
  double max_depth = 40.0;       // m, inward scan limit
  double start_back = 0.5;       // m, scan starts slightly outside the edge
  double height_step = 0.1;      // m, merge resample step
  double wall_offset_tol = 0.15; // m, wall detection threshold
};

// Slices the mesh perpendicular to the edge at stations along it and climbs
// each slice inward keeping the running height maximum. Stations where the
// mesh is absent yield empty profiles.
std::vector<NoisyProfile> extract_noisy_profiles(const TriMesh& mesh, const Segment2& edge,
                                                 const ProfileFitParams& p = {});

// Median-resample merge of the station climbs followed by the urban prior fit
// (vertical wall, then monotone pitches). Throws if every input is empty.
Profile merge_clean_profile(const std::vector<NoisyProfile>& noisy,
                            const ProfileFitParams& p = {});

// simple: single vertical to the top; moderate/high: Douglas-Peucker with
// 0.5 m / 0.05 m tolerance on the above-wall portion.
Profile simplify_profile(const Profile& prof, ProfileQuality quality);

}  // namespace massfit
