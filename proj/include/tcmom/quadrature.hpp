#pragma once

#include <array>
#include <vector>

#include "tcmom/geometry.hpp"

namespace tcmom {

// Symmetric 7-point triangle rule, degree 5. Weights sum to 1 (multiply by
// the triangle area).
struct TriQuadPoint {
  double b0, b1, b2;  // barycentric
  double w;
};

const std::array<TriQuadPoint, 7>& tri_quad_7();

// Quadrature points of a physical triangle. `subdiv` >= 1 applies the rule
// on each of subdiv^2 congruent subtriangles, refining the rule without
// touching the mesh (used by the self-convergence check).
struct QuadPoint {
  Vec3 r;
  double w;  // includes the triangle area
};
std::vector<QuadPoint> triangle_quadrature(const Vec3& a, const Vec3& b,
                                           const Vec3& c, int subdiv = 1);

}  // namespace tcmom
