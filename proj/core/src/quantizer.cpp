#include "pointloc/quantizer.hpp"

#include <algorithm>
#include <cstdio>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pointloc {

namespace {

// value = mantissa * 2^exp, mantissa integral with |mantissa| < 2^53.
struct Decomposed {
  std::int64_t mantissa;
  int exp;
};

Decomposed decompose(double x) {
  int e = 0;
  const double m = std::frexp(x, &e);
  return {static_cast<std::int64_t>(std::ldexp(m, 53)), e - 53};
}

// trunc(absx * 2^-cut) for absx >= 0.
BigInt quantized_magnitude(double absx, int cut) {
  const auto [m, e] = decompose(absx);
  if (m == 0) return BigInt(0);
  const auto mag = static_cast<std::uint64_t>(m);
  const int shift = e - cut;
  if (shift >= 0) return BigInt(mag) << shift;
  if (-shift >= 64) return BigInt(0);
  return BigInt(mag >> -shift);
}

int width_at(double max_abs, int cut) {
  const BigInt q = quantized_magnitude(max_abs, cut);
  if (q == 0) return 1;
  return static_cast<int>(boost::multiprecision::msb(q)) + 1;
}

int bit_width_u128(unsigned __int128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 64 + std::bit_width(hi);
  return std::bit_width(static_cast<std::uint64_t>(v));
}

// Largest cut with 2^cut < 1/max_abs^2, computed without rounding: the
// mantissa square decides which side of a power of two max_abs^2 falls on.
int error_target_cap(double max_abs) {
  int e = 0;
  const double m = std::frexp(max_abs, &e);
  const auto k = static_cast<unsigned __int128>(
      static_cast<std::uint64_t>(std::ldexp(m, 53)));
  const int s = bit_width_u128(k * k) - 1 + 2 * (e - 53);
  return -s - 1;
}

CutSpec finalize(int cut, double max_abs) {
  CutSpec spec;
  spec.cut_bit = cut;
  spec.width_B = width_at(max_abs, cut);
  spec.err = std::ldexp(1.0, cut);
  spec.max_abs = max_abs;
  return spec;
}

}  // namespace

int msb(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw std::invalid_argument("msb: requires a finite positive value, got " +
                                std::to_string(x));
  int e = 0;
  std::frexp(x, &e);
  return e - 1;
}

CutSpec CutSpec::refined(int extra_bits) const {
  return finalize(cut_bit - extra_bits, max_abs);
}

CutSpec compute_cut_bit(std::span<const double> coords) {
  if (coords.empty())
    throw std::invalid_argument("compute_cut_bit: empty coordinate set");
  for (double c : coords)
    if (!std::isfinite(c))
      throw std::invalid_argument("compute_cut_bit: non-finite coordinate");

  std::vector<double> sorted(coords.begin(), coords.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (sorted.size() >= 2 && lo == hi)
    throw std::invalid_argument(
        "compute_cut_bit: degenerate input, all coordinates equal " +
        std::to_string(lo));

  // Smallest MSB over gaps of consecutive same-sign-class values. Zero gaps
  // (duplicates) and the pair straddling zero are skipped.
  bool have_gap = false;
  int base_b = 0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double a = sorted[i];
    const double b = sorted[i + 1];
    if ((a < 0.0) != (b < 0.0)) continue;
    const double gap = b - a;
    if (gap == 0.0) continue;
    const int g = msb(gap);
    base_b = have_gap ? std::min(base_b, g) : g;
    have_gap = true;
  }
  if (!have_gap) base_b = 0;

  const double max_abs = std::max(std::abs(lo), std::abs(hi));
  const int b0 = width_at(max_abs, base_b);
  int cut = base_b - 2 * b0;

  // With both sign classes inhabited, no nonzero value may truncate to zero,
  // or values on opposite sides of zero could quantize to the same integer.
  if (lo < 0.0 && hi >= 0.0) {
    double min_nonzero = max_abs;
    for (double v : sorted)
      if (v != 0.0) min_nonzero = std::min(min_nonzero, std::abs(v));
    cut = std::min(cut, msb(min_nonzero));
  }

  // err < 1/max_abs^2 whenever max_abs >= 1.
  if (max_abs >= 1.0) cut = std::min(cut, error_target_cap(max_abs));

  return finalize(cut, max_abs);
}

BigInt quantize_wide(double x, const CutSpec& spec) {
  if (!std::isfinite(x))
    throw std::invalid_argument("quantize_wide: non-finite input");
  const auto [m, e] = decompose(x);
  if (m == 0) return BigInt(0);
  const bool neg = m < 0;
  const auto mag = static_cast<std::uint64_t>(neg ? -m : m);
  const int shift = e - spec.cut_bit;
  BigInt q;
  if (shift >= 0) {
    q = BigInt(mag) << shift;
  } else if (-shift >= 64) {
    return BigInt(0);
  } else {
    q = BigInt(mag >> -shift);
  }
  return neg ? BigInt(-q) : q;
}

std::int64_t quantize(double x, const CutSpec& spec) {
  if (!std::isfinite(x))
    throw std::invalid_argument("quantize: non-finite input");
  const auto [m, e] = decompose(x);
  if (m == 0) return 0;
  const bool neg = m < 0;
  const auto mag = static_cast<std::uint64_t>(neg ? -m : m);
  const int shift = e - spec.cut_bit;
  std::uint64_t q = 0;
  if (shift >= 0) {
    if (std::bit_width(mag) + shift > 62) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "quantize: %g exceeds 62 bits at cut %d",
                    x, spec.cut_bit);
      throw std::out_of_range(msg);
    }
    q = mag << shift;
  } else if (-shift < 64) {
    q = mag >> -shift;
  }
  const auto sq = static_cast<std::int64_t>(q);
  return neg ? -sq : sq;
}

double error_budget(const CutSpec& spec, double coeff_bound) {
  if (!std::isfinite(coeff_bound) || coeff_bound < 0.0)
    throw std::invalid_argument("error_budget: coeff_bound must be >= 0");
  const double err = spec.err;
  return 2.0 * coeff_bound * err + 2.0 * spec.max_abs * err + 2.0 * err * err +
         err;
}

}  // namespace pointloc
