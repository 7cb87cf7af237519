#pragma once

#include <cstdint>
#include <optional>

namespace pointloc {

enum class LocateKind { Inside, OnEdge, Outside };

struct LocateResult {
  LocateKind kind = LocateKind::Outside;
  std::optional<std::uint32_t> triangle;
  std::optional<std::uint32_t> face;
  std::optional<int> edge_slot;
  // True when exact arithmetic on the original real coordinates confirmed
  // the classification.
  bool exact_confirmed = false;
};

}  // namespace pointloc
