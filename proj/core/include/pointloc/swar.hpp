#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pointloc::swar {

using Int128 = __int128;
using UInt128 = unsigned __int128;

// Fixed-width lanes packed into machine words. Each lane is
// magnitude_bits + 2 bits wide: a sign bit at lane bit L-2 and a guard bit at
// lane bit L-1 that absorbs carries so neighboring lanes stay independent.
// Lane 0 sits at the least-significant end of word 0; a lane never crosses a
// word boundary.
struct LaneLayout {
  int word_bits = 64;
  int lane_bits = 0;       // L = magnitude_bits + 2
  int lanes_per_word = 0;  // K = floor(word_bits / L)
  int magnitude_bits = 0;  // every packed value satisfies |v| < 2^magnitude_bits

  friend bool operator==(const LaneLayout&, const LaneLayout&) = default;
};

LaneLayout make_layout(int magnitude_bits, int word_bits);

// One bit per occupied lane, densely packed.
struct LaneMask {
  std::size_t count = 0;
  std::vector<std::uint64_t> bits;

  LaneMask() = default;
  explicit LaneMask(std::size_t n) : count(n), bits((n + 63) / 64, 0) {}

  bool test(std::size_t i) const { return (bits[i >> 6] >> (i & 63)) & 1u; }
  bool any() const;
  bool none() const { return !any(); }
  std::uint64_t chunk(std::size_t start, int nbits) const;
  void or_chunk(std::size_t start, std::uint64_t value, int nbits);

  friend bool operator==(const LaneMask&, const LaneMask&) = default;
};

// Word-operation instrumentation. Kernel operations add a fixed number of
// operations per packed word they touch, independent of lane contents.
struct OpCount {
  std::uint64_t word_ops = 0;
  void add(std::uint64_t n) { word_ops += n; }
};

template <class Word>
inline constexpr int word_bits_of = sizeof(Word) * 8;

// OR-fold steps used to compress one bit per lane down to a dense field:
// log2(word width), fixed per word type so the executed operation count
// never depends on the layout.
template <class Word>
inline constexpr int fold_steps = std::bit_width(unsigned(sizeof(Word) * 8)) - 1;

inline constexpr std::uint64_t kBroadcastMultiplyOpsPerWord = 8;
inline constexpr std::uint64_t kToTwosComplementOpsPerWord = 7;
inline constexpr std::uint64_t kLanewiseAddOpsPerWord = 6;
template <class Word>
inline constexpr std::uint64_t sign_extract_ops_per_word = 2 + 3 * fold_steps<Word>;
template <class Word>
inline constexpr std::uint64_t find_zero_ops_per_word = 6 + 3 * fold_steps<Word>;

namespace detail {

template <class Word>
Word low_bits(int n) {
  if (n <= 0) return Word(0);
  if (n >= word_bits_of<Word>) return static_cast<Word>(~Word(0));
  return static_cast<Word>((Word(1) << n) - 1);
}

template <class Word>
void check_word(const LaneLayout& layout) {
  if (layout.word_bits != word_bits_of<Word>)
    throw std::logic_error("layout word width " +
                           std::to_string(layout.word_bits) +
                           " does not match storage word");
}

inline std::size_t words_for(std::size_t count, const LaneLayout& layout) {
  const auto k = static_cast<std::size_t>(layout.lanes_per_word);
  return (count + k - 1) / k;
}

}  // namespace detail

// C1 duplicates a scalar into every lane when multiplied; C2 masks the
// per-lane sign bits.
template <class Word>
struct SwarConstants {
  Word c1{};
  Word c2{};
};

template <class Word>
SwarConstants<Word> make_constants(const LaneLayout& layout) {
  detail::check_word<Word>(layout);
  SwarConstants<Word> c;
  for (int i = 0; i < layout.lanes_per_word; ++i) {
    c.c1 = static_cast<Word>(c.c1 | (Word(1) << (i * layout.lane_bits)));
    c.c2 = static_cast<Word>(
        c.c2 | (Word(1) << (i * layout.lane_bits + layout.lane_bits - 2)));
  }
  return c;
}

// Nonnegative lane magnitudes; unoccupied trailing lanes are zero.
template <class Word>
struct PackedMagnitudes {
  LaneLayout layout{};
  std::size_t count = 0;
  std::vector<Word> words;
};

// Lanes carrying only the sign bit (bit L-2 of the lane).
template <class Word>
struct SignWord {
  LaneLayout layout{};
  std::size_t count = 0;
  std::vector<Word> words;
};

// Lanes holding L-bit two's-complement encodings; the sign of an in-range
// value is readable at lane bit L-2.
template <class Word>
struct PackedSigned {
  LaneLayout layout{};
  std::size_t count = 0;
  std::vector<Word> words;
};

template <class Word>
std::pair<PackedMagnitudes<Word>, SignWord<Word>> pack(
    std::span<const Int128> values, const LaneLayout& layout) {
  detail::check_word<Word>(layout);
  PackedMagnitudes<Word> mags{layout, values.size(), {}};
  SignWord<Word> signs{layout, values.size(), {}};
  if (values.empty()) return {std::move(mags), std::move(signs)};

  const auto limit = UInt128(1) << layout.magnitude_bits;
  mags.words.assign(detail::words_for(values.size(), layout), Word(0));
  signs.words.assign(mags.words.size(), Word(0));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Int128 v = values[i];
    const UInt128 mag = v < 0 ? UInt128(-v) : UInt128(v);
    if (mag >= limit)
      throw std::invalid_argument(
          "pack: value at index " + std::to_string(i) + " does not fit " +
          std::to_string(layout.magnitude_bits) + " magnitude bits");
    const std::size_t w = i / layout.lanes_per_word;
    const int off = int(i % layout.lanes_per_word) * layout.lane_bits;
    mags.words[w] = static_cast<Word>(mags.words[w] | (static_cast<Word>(mag) << off));
    if (v < 0)
      signs.words[w] = static_cast<Word>(
          signs.words[w] | (Word(1) << (off + layout.lane_bits - 2)));
  }
  return {std::move(mags), std::move(signs)};
}

// Multiplies every magnitude lane by |scalar| with one whole-word multiply
// per word and XORs the scalar's sign into the sign lane of every occupied
// nonzero product (a zero lane must never read as negative, or the
// two's-complement conversion would leak a borrow into its neighbor).
// Requires |scalar| * (max lane magnitude) < 2^magnitude_bits; widths are
// proven by the caller, not rechecked per query.
template <class Word>
std::pair<PackedMagnitudes<Word>, SignWord<Word>> broadcast_multiply(
    const PackedMagnitudes<Word>& mags, const SignWord<Word>& signs,
    std::int64_t scalar, const SwarConstants<Word>& constants,
    OpCount* ops = nullptr) {
  PackedMagnitudes<Word> rm{mags.layout, mags.count, mags.words};
  SignWord<Word> rs{signs.layout, signs.count, signs.words};
  const std::uint64_t mag =
      scalar < 0 ? -static_cast<std::uint64_t>(scalar)
                 : static_cast<std::uint64_t>(scalar);
  const auto factor = static_cast<Word>(mag);
  const int k = mags.layout.lanes_per_word;
  const int lane_bits = mags.layout.lane_bits;
  const Word guard = static_cast<Word>(constants.c2 << 1);
  const Word not_guard = static_cast<Word>(~guard);
  for (std::size_t w = 0; w < rm.words.size(); ++w) {
    const auto occupied =
        static_cast<int>(std::min<std::size_t>(k, mags.count - w * k));
    const Word occupied_c2 = static_cast<Word>(
        constants.c2 & detail::low_bits<Word>(occupied * lane_bits));
    const Word broadcast = scalar < 0 ? occupied_c2 : Word(0);
    const Word product = static_cast<Word>(rm.words[w] * factor);
    // lane top bit of t: set iff the product lane is nonzero
    const Word t =
        static_cast<Word>(((product & not_guard) + not_guard) | product);
    const Word nonzero_signs = static_cast<Word>((t >> 1) & constants.c2);
    rm.words[w] = product;
    rs.words[w] =
        static_cast<Word>((rs.words[w] ^ broadcast) & nonzero_signs);
    if (ops) ops->add(kBroadcastMultiplyOpsPerWord);
  }
  return {std::move(rm), std::move(rs)};
}

// Sign-magnitude -> per-lane two's complement, entirely with whole-word
// operations. With A the magnitudes and B the sign word:
//   C = B >> (L-2)        one in lane bit 0 of every negative lane
//   D = B - C             all-ones below the sign bit in negative lanes
//   E = A & D             magnitudes of the negative lanes
//   F = (B << 2) - E      L-bit two's complement of the negative lanes
//   G = A - E             the nonnegative lanes
//   F | G                 combined result
template <class Word>
PackedSigned<Word> to_twos_complement(const PackedMagnitudes<Word>& mags,
                                      const SignWord<Word>& signs,
                                      OpCount* ops = nullptr) {
  PackedSigned<Word> r{mags.layout, mags.count, {}};
  r.words.resize(mags.words.size());
  const int l = mags.layout.lane_bits;
  for (std::size_t w = 0; w < mags.words.size(); ++w) {
    const Word a = mags.words[w];
    const Word b = signs.words[w];
    const Word c = static_cast<Word>(b >> (l - 2));
    const Word d = static_cast<Word>(b - c);
    const Word e = static_cast<Word>(a & d);
    const Word f = static_cast<Word>(static_cast<Word>(b << 2) - e);
    const Word g = static_cast<Word>(a - e);
    r.words[w] = static_cast<Word>(f | g);
    if (ops) ops->add(kToTwosComplementOpsPerWord);
  }
  return r;
}

// Per-lane addition with cross-lane carry isolation: lane tops are added
// separately (mod 2) so a carry never escapes its lane. Lane i of the result
// encodes value_a(i) + value_b(i); requires |sum| < 2^magnitude_bits.
template <class Word>
PackedSigned<Word> lanewise_add(const PackedSigned<Word>& a,
                                const PackedSigned<Word>& b,
                                const SwarConstants<Word>& constants,
                                OpCount* ops = nullptr) {
  if (a.layout != b.layout || a.count != b.count)
    throw std::invalid_argument("lanewise_add: operand layouts differ");
  PackedSigned<Word> r{a.layout, a.count, {}};
  r.words.resize(a.words.size());
  const Word guard = static_cast<Word>(constants.c2 << 1);
  const Word not_guard = static_cast<Word>(~guard);
  for (std::size_t w = 0; w < a.words.size(); ++w) {
    const Word x = a.words[w];
    const Word y = b.words[w];
    const Word low = static_cast<Word>((x & not_guard) + (y & not_guard));
    r.words[w] = static_cast<Word>(low ^ ((x ^ y) & guard));
    if (ops) ops->add(kLanewiseAddOpsPerWord);
  }
  return r;
}

namespace detail {

// Plan for compressing one bit per lane (already moved to lane bit 0) into
// a dense field at the word bottom. Each step ORs shifted group pairs
// together and masks away everything but the merged groups, so stray copies
// never reach the dense field. The step count is fixed per word type; steps
// past the point where one group remains are no-ops.
template <class Word>
struct FoldPlan {
  std::array<int, 8> shift{};
  std::array<Word, 8> keep{};
};

template <class Word>
FoldPlan<Word> make_fold_plan(const LaneLayout& layout) {
  FoldPlan<Word> plan;
  const int k = layout.lanes_per_word;
  const int l = layout.lane_bits;
  for (int j = 0; j < fold_steps<Word>; ++j) {
    const long group = 1L << j;  // group size entering this step
    plan.shift[j] = static_cast<int>(
        std::min<long>(group * (l - 1), word_bits_of<Word> - 1));
    const long merged = group * 2;
    Word keep{};
    for (long lane = 0; lane < k; ++lane) {
      // lane's bit after this step: base of its merged group plus offset
      const long pos = (lane / merged) * merged * l + lane % merged;
      keep = static_cast<Word>(keep | (Word(1) << pos));
    }
    plan.keep[j] = keep;
  }
  return plan;
}

template <class Word>
Word fold_lane_bits(Word x, const FoldPlan<Word>& plan) {
  for (int j = 0; j < fold_steps<Word>; ++j)
    x = static_cast<Word>((x | (x >> plan.shift[j])) & plan.keep[j]);
  return x;
}

template <class Word>
LaneMask collect_mask(const std::vector<Word>& per_word_dense,
                      std::size_t count, const LaneLayout& layout) {
  LaneMask mask(count);
  const int k = layout.lanes_per_word;
  for (std::size_t w = 0; w < per_word_dense.size(); ++w) {
    const auto occupied =
        static_cast<int>(std::min<std::size_t>(k, count - w * k));
    mask.or_chunk(w * k, static_cast<std::uint64_t>(per_word_dense[w]),
                  occupied);
  }
  return mask;
}

}  // namespace detail

// One bit per occupied lane, set iff the lane's value is negative.
template <class Word>
LaneMask extract_sign_bits(const PackedSigned<Word>& p,
                           const SwarConstants<Word>& constants,
                           OpCount* ops = nullptr) {
  const int l = p.layout.lane_bits;
  const auto plan = detail::make_fold_plan<Word>(p.layout);
  std::vector<Word> dense(p.words.size());
  for (std::size_t w = 0; w < p.words.size(); ++w) {
    const Word s = static_cast<Word>((p.words[w] & constants.c2) >> (l - 2));
    dense[w] = detail::fold_lane_bits(s, plan);
    if (ops) ops->add(sign_extract_ops_per_word<Word>);
  }
  return detail::collect_mask(dense, p.count, p.layout);
}

// One bit per occupied lane, set iff the lane's value is exactly zero.
template <class Word>
LaneMask find_zero_lanes(const PackedSigned<Word>& p,
                         const SwarConstants<Word>& constants,
                         OpCount* ops = nullptr) {
  const int l = p.layout.lane_bits;
  const Word guard = static_cast<Word>(constants.c2 << 1);
  const Word not_guard = static_cast<Word>(~guard);
  const auto plan = detail::make_fold_plan<Word>(p.layout);
  std::vector<Word> dense(p.words.size());
  for (std::size_t w = 0; w < p.words.size(); ++w) {
    const Word x = p.words[w];
    // Lane top bit of t ends up set iff any low bit of the lane is set;
    // OR with x itself covers the top bit, so ~(t|x) & guard marks zeros.
    const Word t = static_cast<Word>((x & not_guard) + not_guard);
    Word z = static_cast<Word>((~(t | x)) & guard);
    z = static_cast<Word>(z >> (l - 1));
    dense[w] = detail::fold_lane_bits(z, plan);
    if (ops) ops->add(find_zero_ops_per_word<Word>);
  }
  return detail::collect_mask(dense, p.count, p.layout);
}

template <class Word>
std::vector<Int128> unpack(const PackedSigned<Word>& p) {
  std::vector<Int128> out(p.count);
  const int l = p.layout.lane_bits;
  const Word lane_mask = detail::low_bits<Word>(l);
  for (std::size_t i = 0; i < p.count; ++i) {
    const std::size_t w = i / p.layout.lanes_per_word;
    const int off = int(i % p.layout.lanes_per_word) * l;
    const Word raw = static_cast<Word>((p.words[w] >> off) & lane_mask);
    if ((raw >> (l - 1)) & 1) {
      const Word mag = static_cast<Word>((~raw + 1) & lane_mask);
      out[i] = -static_cast<Int128>(static_cast<UInt128>(mag));
    } else {
      out[i] = static_cast<Int128>(static_cast<UInt128>(raw));
    }
  }
  return out;
}

}  // namespace pointloc::swar
