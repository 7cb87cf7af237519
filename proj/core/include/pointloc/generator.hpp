#pragma once

#include <cstdint>

#include "pointloc/subdivision.hpp"

namespace pointloc {

struct GeneratorParams {
  std::size_t target_vertices = 100;
  std::uint64_t seed = 1;
  // Vertices land on the {0..grid}^2 integer grid. Small grids keep
  // quantized coordinate widths small, which keeps lanes narrow.
  std::int64_t grid = 64;
};

// Seeded random triangulated subdivision: distinct integer grid points,
// triangulated by an incremental convex-hull scan, one face per triangle.
// Deterministic for a given parameter set.
Subdivision random_subdivision(const GeneratorParams& params);

}  // namespace pointloc
