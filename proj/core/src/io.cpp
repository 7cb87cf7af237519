#include "pointloc/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace pointloc {

namespace {

std::string next_line(std::istream& in, std::size_t& line_no,
                      const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;  // blank
    if (line[first] == '#') continue;          // comment
    return line;
  }
  throw ParseError(std::string("unexpected end of input, expected ") + what);
}

double parse_finite(std::istringstream& ss, std::size_t line_no) {
  double v = 0.0;
  if (!(ss >> v) || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) +
                     ": expected a finite real");
  return v;
}

void expect_line_end(std::istringstream& ss, std::size_t line_no) {
  std::string rest;
  if (ss >> rest)
    throw ParseError("line " + std::to_string(line_no) +
                     ": unexpected trailing token '" + rest + "'");
}

std::size_t parse_header(const std::string& line, const char* keyword,
                         std::size_t line_no) {
  std::istringstream ss(line);
  std::string word;
  long long n = -1;
  if (!(ss >> word >> n) || word != keyword || n < 0)
    throw ParseError("line " + std::to_string(line_no) + ": expected '" +
                     keyword + " <count>'");
  expect_line_end(ss, line_no);
  return static_cast<std::size_t>(n);
}

}  // namespace

Subdivision read_subdivision(std::istream& in) {
  Subdivision s;
  std::size_t line_no = 0;

  const std::size_t n =
      parse_header(next_line(in, line_no, "'vertices <n>'"), "vertices", line_no);
  s.vertices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::istringstream ss(next_line(in, line_no, "a vertex line"));
    const double x = parse_finite(ss, line_no);
    const double y = parse_finite(ss, line_no);
    expect_line_end(ss, line_no);
    s.vertices.push_back({x, y});
  }

  const std::size_t f =
      parse_header(next_line(in, line_no, "'faces <f>'"), "faces", line_no);
  s.faces.reserve(f);
  for (std::size_t i = 0; i < f; ++i) {
    std::istringstream ss(next_line(in, line_no, "a face line"));
    std::vector<std::uint32_t> cycle;
    long long idx = 0;
    while (ss >> idx) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= s.vertices.size())
        throw ParseError("line " + std::to_string(line_no) +
                         ": vertex index " + std::to_string(idx) +
                         " out of range");
      cycle.push_back(static_cast<std::uint32_t>(idx));
    }
    if (!ss.eof()) {
      ss.clear();
      std::string rest;
      ss >> rest;
      throw ParseError("line " + std::to_string(line_no) +
                       ": bad face token '" + rest + "'");
    }
    if (cycle.size() < 3)
      throw ParseError("line " + std::to_string(line_no) +
                       ": face needs at least 3 vertices");
    s.faces.push_back(std::move(cycle));
  }
  return s;
}

Subdivision read_subdivision_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_subdivision(in);
}

void write_subdivision(std::ostream& out, const Subdivision& s) {
  out << "vertices " << s.vertices.size() << "\n";
  out << std::setprecision(17);
  for (const auto& v : s.vertices) out << v.x << " " << v.y << "\n";
  out << "faces " << s.faces.size() << "\n";
  for (const auto& face : s.faces) {
    for (std::size_t i = 0; i < face.size(); ++i)
      out << (i ? " " : "") << face[i];
    out << "\n";
  }
}

std::vector<Vec2> read_queries(std::istream& in) {
  std::vector<Vec2> queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    const double x = parse_finite(ss, line_no);
    const double y = parse_finite(ss, line_no);
    expect_line_end(ss, line_no);
    queries.push_back({x, y});
  }
  return queries;
}

std::vector<Vec2> read_queries_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_queries(in);
}

}  // namespace pointloc
