#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pointloc/quantizer.hpp"

namespace pointloc {

using Int128 = __int128;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct IVec2 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const IVec2&, const IVec2&) = default;
};

// Planar subdivision: faces are simple polygons given as CCW vertex-index
// cycles over a shared vertex array.
struct Subdivision {
  std::vector<Vec2> vertices;
  std::vector<std::vector<std::uint32_t>> faces;
};

// A face quantized to zero area, or one the ear clipper cannot make progress
// on after quantization. The caller retries once with a finer cut.
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TriangulatedSubdivision {
  std::vector<Vec2> vertices;   // original reals, bit-identical to the input
  std::vector<IVec2> quantized;
  CutSpec cut;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // CCW in quantized coords
  std::vector<std::uint32_t> face_of_triangle;
};

// Inside-positive line coefficients of one directed triangle edge, derived
// from the quantized endpoints: for the edge (xj,yj) -> (xk,yk),
//   a = yj - yk,  b = xk - xj,  c = xj*yk - xk*yj,
// so a*x + b*y + c > 0 strictly inside a CCW triangle and == 0 on the line.
// |a|, |b| < 2^(B+1) and |c| < 2^(2B+2) for B = CutSpec.width_B.
struct EdgeCoeffs {
  std::int64_t a = 0;
  std::int64_t b = 0;
  Int128 c = 0;
  std::uint32_t triangle = 0;
  int edge_slot = 0;  // slot s is the edge vertex s -> vertex (s+1)%3
};

// Validates the subdivision, quantizes the vertices, and ear-clips every
// face on the quantized coordinates so edge coefficients come out as exact
// integers. Degenerate quantizations are retried once with 2 extra bits.
TriangulatedSubdivision triangulate(const Subdivision& s);
TriangulatedSubdivision triangulate(const Subdivision& s, const CutSpec& cut);

std::array<EdgeCoeffs, 3> edge_coefficients(const TriangulatedSubdivision& t,
                                            std::uint32_t tri);

}  // namespace pointloc
