#pragma once

#include <cstdint>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

namespace pointloc {

using BigInt = boost::multiprecision::cpp_int;

// Contract for converting real coordinates to order-preserving integers.
// quantize(x) = trunc(x * 2^-cut_bit); err is the worst-case absolute
// truncation error, exactly 2^cut_bit.
struct CutSpec {
  int cut_bit = 0;
  int width_B = 1;       // bits needed for any quantized coordinate magnitude
  double err = 1.0;      // == 2^cut_bit
  double max_abs = 0.0;  // largest |coordinate| in the input set

  // Same cut moved `extra_bits` fractional bits finer, widths recomputed.
  CutSpec refined(int extra_bits) const;
};

// floor(log2(x)) for finite x > 0. May be negative (x < 1).
int msb(double x);

// Derives the cut bit from the coordinate multiset: sorts, takes gaps between
// consecutive distinct values of the same sign class, cuts at the smallest
// gap MSB, then refines by two extra magnitude-width blocks of fractional
// bits so the truncation error lands far below the smallest feature.
//
// Throws std::invalid_argument on empty/non-finite input and on multisets of
// two or more coordinates that are all equal (no gap exists anywhere).
CutSpec compute_cut_bit(std::span<const double> coords);

// Exact trunc(x * 2^-cut_bit), any result width.
BigInt quantize_wide(double x, const CutSpec& spec);

// Exact trunc(x * 2^-cut_bit) for results that fit 62 bits.
// Throws std::out_of_range when |x| quantizes past that.
std::int64_t quantize(double x, const CutSpec& spec);

// Upper bound, in original units, on how far the packed integer line
// evaluation can drift from the true real evaluation:
//   2*coeff_bound*err + 2*max_abs*err + 2*err^2 + err.
// Points farther than this from every edge line are classified correctly by
// the integer test alone.
double error_budget(const CutSpec& spec, double coeff_bound);

}  // namespace pointloc
