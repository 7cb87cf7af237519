#include "pointloc/swar.hpp"

#include <algorithm>

namespace pointloc::swar {

LaneLayout make_layout(int magnitude_bits, int word_bits) {
  if (magnitude_bits < 1)
    throw std::invalid_argument("make_layout: magnitude_bits must be >= 1");
  const int lane_bits = magnitude_bits + 2;
  if (lane_bits > word_bits)
    throw std::invalid_argument("make_layout: lane of " +
                                std::to_string(lane_bits) +
                                " bits exceeds word of " +
                                std::to_string(word_bits) + " bits");
  LaneLayout layout;
  layout.word_bits = word_bits;
  layout.lane_bits = lane_bits;
  layout.lanes_per_word = word_bits / lane_bits;
  layout.magnitude_bits = magnitude_bits;
  return layout;
}

bool LaneMask::any() const {
  return std::any_of(bits.begin(), bits.end(),
                     [](std::uint64_t w) { return w != 0; });
}

std::uint64_t LaneMask::chunk(std::size_t start, int nbits) const {
  const std::size_t w = start >> 6;
  const int off = int(start & 63);
  std::uint64_t v = bits[w] >> off;
  if (off + nbits > 64 && w + 1 < bits.size()) v |= bits[w + 1] << (64 - off);
  if (nbits < 64) v &= (std::uint64_t(1) << nbits) - 1;
  return v;
}

void LaneMask::or_chunk(std::size_t start, std::uint64_t value, int nbits) {
  if (nbits <= 0) return;
  if (nbits < 64) value &= (std::uint64_t(1) << nbits) - 1;
  const std::size_t w = start >> 6;
  const int off = int(start & 63);
  bits[w] |= value << off;
  if (off + nbits > 64) bits[w + 1] |= value >> (64 - off);
}

}  // namespace pointloc::swar
