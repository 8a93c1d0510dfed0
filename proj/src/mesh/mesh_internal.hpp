#pragma once

#include "shapecalc/mesh.hpp"

namespace shapecalc::mesh {

/// Adds midpoint nodes to a corner-only mesh; boundary midpoints go on the curve.
void build_p2(TriMesh& m, const std::vector<std::array<int, 3>>& corners);

/// Rebuilds the ordered boundary-edge list from topology and node tags.
void rebuild_boundary_edges(TriMesh& m);

}  // namespace shapecalc::mesh
