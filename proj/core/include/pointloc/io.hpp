#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointloc/subdivision.hpp"

namespace pointloc {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Subdivision text format:
//   vertices <n>
//   <x> <y>              n lines of decimal reals
//   faces <f>
//   <i0> <i1> <i2> ...   f lines of CCW vertex indices
// NaN and infinity tokens are rejected.
Subdivision read_subdivision(std::istream& in);
Subdivision read_subdivision_file(const std::string& path);
void write_subdivision(std::ostream& out, const Subdivision& s);

// Query text format: one "x y" pair per line.
std::vector<Vec2> read_queries(std::istream& in);
std::vector<Vec2> read_queries_file(const std::string& path);

}  // namespace pointloc
