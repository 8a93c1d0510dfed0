#pragma once

#include "shapecalc/geometry.hpp"

#include <array>
#include <vector>

namespace shapecalc::mesh::detail {

/// Bowyer-Watson Delaunay triangulation of the convex hull of `points`.
/// Returned triangles are counterclockwise.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

}  // namespace shapecalc::mesh::detail
