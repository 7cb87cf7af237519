#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "pointloc/exact.hpp"
#include "pointloc/locate_result.hpp"
#include "pointloc/quantizer.hpp"
#include "pointloc/subdivision.hpp"
#include "pointloc/swar.hpp"

namespace pointloc {

struct IndexFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A query in both coordinate systems: the original reals and their
// quantized images under the index's cut.
struct QueryPoint {
  double x0 = 0.0;
  double y0 = 0.0;
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;
};

struct EvalMasks {
  swar::LaneMask neg;   // lane value < 0
  swar::LaneMask zero;  // lane value == 0
};

struct Candidate {
  std::uint32_t triangle = 0;
  std::uint8_t zero_slots = 0;  // bit s set: edge slot s evaluated to 0
};

struct LocateOptions {
  // When false, the packed integer verdict is reported as-is without exact
  // confirmation (quantization may misplace points near edges).
  bool exact_fallback = true;
};

// The three packed coefficient streams of a set of edge functions
// a*x + b*y + c. The c stream is query-independent and kept in
// two's-complement form.
template <class Word>
struct CoeffStreams {
  swar::PackedMagnitudes<Word> a_mags;
  swar::SignWord<Word> a_signs;
  swar::PackedMagnitudes<Word> b_mags;
  swar::SignWord<Word> b_signs;
  swar::PackedSigned<Word> c;
};

template <class Word>
CoeffStreams<Word> pack_coeff_streams(std::span<const Int128> a,
                                      std::span<const Int128> b,
                                      std::span<const Int128> c,
                                      const swar::LaneLayout& layout) {
  if (a.size() != b.size() || a.size() != c.size())
    throw std::invalid_argument("pack_coeff_streams: stream lengths differ");
  CoeffStreams<Word> s;
  std::tie(s.a_mags, s.a_signs) = swar::pack<Word>(a, layout);
  std::tie(s.b_mags, s.b_signs) = swar::pack<Word>(b, layout);
  auto [c_mags, c_signs] = swar::pack<Word>(c, layout);
  s.c = swar::to_twos_complement(c_mags, c_signs);
  return s;
}

template <class Word>
struct StreamEvaluation {
  swar::LaneMask neg;
  swar::LaneMask zero;
  swar::PackedSigned<Word> sums;  // lane i encodes a_i*x + b_i*y + c_i
};

// The per-query pipeline: two broadcast multiplies, two sign-magnitude ->
// two's-complement conversions, two lane-wise additions, then sign and zero
// extraction. A fixed number of word operations per packed word.
template <class Word>
StreamEvaluation<Word> evaluate_streams(const CoeffStreams<Word>& s,
                                        const swar::SwarConstants<Word>& k,
                                        std::int64_t x1, std::int64_t y1,
                                        swar::OpCount* ops = nullptr) {
  auto [ax_mags, ax_signs] = swar::broadcast_multiply(s.a_mags, s.a_signs, x1, k, ops);
  auto [by_mags, by_signs] = swar::broadcast_multiply(s.b_mags, s.b_signs, y1, k, ops);
  const auto ax = swar::to_twos_complement(ax_mags, ax_signs, ops);
  const auto by = swar::to_twos_complement(by_mags, by_signs, ops);
  auto sums = swar::lanewise_add(ax, by, k, ops);
  sums = swar::lanewise_add(sums, s.c, k, ops);
  StreamEvaluation<Word> ev;
  ev.neg = swar::extract_sign_bits(sums, k, ops);
  ev.zero = swar::find_zero_lanes(sums, k, ops);
  ev.sums = std::move(sums);
  return ev;
}

// Point-location index: packed inside-positive edge functions of every
// triangle (lanes 3t, 3t+1, 3t+2 belong to triangle t), plus the retained
// real geometry for the exact fallback. Immutable once built; locate() is
// safe for unlimited concurrent callers.
class PackedEdgeIndex {
 public:
  static PackedEdgeIndex build(const Subdivision& s, int word_bits = 64);

  // Quantizes a query with this index's cut. The caller guarantees the
  // point lies within the quantizable range (the subdivision's coordinate
  // envelope); locate() checks this itself.
  QueryPoint quantize_query(double x0, double y0) const;

  // Tests the quantized query against all packed edges.
  EvalMasks evaluate(const QueryPoint& q, swar::OpCount* ops = nullptr) const;

  // Triangles whose three lanes carry no negative bit, with their zero slots.
  std::vector<Candidate> candidates(const EvalMasks& masks) const;

  LocateResult locate(double x0, double y0,
                      const LocateOptions& options = {}) const;

  int word_bits() const;
  const swar::LaneLayout& layout() const;
  const CutSpec& cut() const;
  double error_budget() const;
  std::size_t lane_count() const;  // 3T occupied lanes
  std::size_t words_per_stream() const;
  const TriangulatedSubdivision& geometry() const;
  std::pair<std::uint32_t, int> lane_map(std::size_t lane) const {
    return {static_cast<std::uint32_t>(lane / 3), static_cast<int>(lane % 3)};
  }

  // Versioned little-endian binary layout; identical inputs serialize to
  // identical bytes. Format documented in the README.
  void serialize(std::ostream& out) const;
  static PackedEdgeIndex deserialize(std::istream& in);

  template <class Word>
  struct Data {
    swar::LaneLayout lane_layout;
    swar::SwarConstants<Word> constants;
    CutSpec cut_spec;
    CoeffStreams<Word> streams;
    TriangulatedSubdivision geometry;
    double budget = 0.0;
    // Certainty margin in quantized units: lanes below -margin are negative
    // beyond any quantization drift, so the true containing triangle always
    // survives the margin filter.
    Int128 margin = 0;
    swar::PackedSigned<Word> margin_lanes;  // margin broadcast to every lane
    Vec2 bbox_min, bbox_max;
  };

 private:
  using Storage = std::variant<Data<std::uint64_t>, Data<swar::UInt128>>;
  explicit PackedEdgeIndex(Storage data) : data_(std::move(data)) {}
  Storage data_;
};

}  // namespace pointloc
