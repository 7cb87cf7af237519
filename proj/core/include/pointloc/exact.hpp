#pragma once

#include <span>

#include "pointloc/locate_result.hpp"
#include "pointloc/subdivision.hpp"

namespace pointloc {

enum class ExactSign { Negative = -1, Zero = 0, Positive = 1 };

// Exact sign of (qx-px)*(ry-py) - (qy-py)*(rx-px): +1 when p,q,r turn
// counterclockwise, 0 when collinear. A floating-point filter handles the
// easy cases; the rest is decided in integer arithmetic on the inputs'
// exact dyadic values, so the result carries no rounding error.
ExactSign orient(double px, double py, double qx, double qy, double rx,
                 double ry);

// Exact sign of twice the signed area of a polygon ring (positive == CCW).
ExactSign polygon_area_sign(std::span<const Vec2> ring);

struct TrianglePlacement {
  LocateKind kind = LocateKind::Outside;
  int edge_slot = -1;  // lowest on-edge slot when kind == OnEdge
};

// Classifies q against CCW triangle (a, b, c): Inside iff strictly left of
// all three directed edges, OnEdge when on an edge and not right of any.
// Throws on a degenerate (collinear) triangle.
TrianglePlacement point_in_triangle_exact(Vec2 q, Vec2 a, Vec2 b, Vec2 c);

// Ground-truth locator: exact linear scan over all triangles. Ties on shared
// edges and vertices go to the lowest (triangle, slot) pair.
LocateResult locate_bruteforce(const TriangulatedSubdivision& t, double x,
                               double y);

}  // namespace pointloc
