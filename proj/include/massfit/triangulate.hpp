#pragma once

#include "massfit/geom.hpp"

namespace massfit {

// Ear-clipping triangulation of a polygon with holes. rings[0] is the outer
// ring (CCW), the rest are holes (CW). Returns triangles as indices into the
// concatenation of the input rings, wound CCW. Throws Error if the input
// cannot be triangulated (self-intersecting or degenerate rings).
std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<std::vector<Vec2>>& rings);

}  // namespace massfit
