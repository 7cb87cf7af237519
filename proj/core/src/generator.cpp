#include "pointloc/generator.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pointloc {

namespace {

using GridPoint = std::pair<std::int64_t, std::int64_t>;

int orient_i(const GridPoint& a, const GridPoint& b, const GridPoint& c) {
  const Int128 det =
      static_cast<Int128>(b.first - a.first) * (c.second - a.second) -
      static_cast<Int128>(b.second - a.second) * (c.first - a.first);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

}  // namespace

Subdivision random_subdivision(const GeneratorParams& params) {
  if (params.grid < 1)
    throw std::invalid_argument("random_subdivision: grid must be >= 1");
  const auto capacity =
      static_cast<std::size_t>(params.grid + 1) * (params.grid + 1);
  if (params.target_vertices < 3 || params.target_vertices > capacity)
    throw std::invalid_argument(
        "random_subdivision: vertex count must be in [3, (grid+1)^2]");

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::int64_t> coord(0, params.grid);
  std::set<GridPoint> unique;
  while (unique.size() < params.target_vertices)
    unique.insert({coord(rng), coord(rng)});

  // Lexicographic processing order; std::set already yields it.
  const std::vector<GridPoint> pts(unique.begin(), unique.end());
  const std::size_t n = pts.size();

  std::vector<std::array<std::uint32_t, 3>> triangles;
  const auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (orient_i(pts[a], pts[b], pts[c]) > 0)
      triangles.push_back({a, b, c});
    else
      triangles.push_back({b, a, c});
  };

  // Swallow the initial collinear run, then fan the first off-line point.
  std::size_t next = 2;
  while (next < n && orient_i(pts[0], pts[1], pts[next]) == 0) ++next;
  if (next == n)
    throw std::runtime_error(
        "random_subdivision: sampled points are all collinear");

  std::vector<std::uint32_t> hull;
  {
    const auto p = static_cast<std::uint32_t>(next);
    for (std::size_t i = 0; i + 1 < next; ++i)
      emit(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1), p);
    // CCW hull around the collinear chain and the new point.
    if (orient_i(pts[0], pts[next - 1], pts[next]) > 0) {
      for (std::size_t i = 0; i < next; ++i)
        hull.push_back(static_cast<std::uint32_t>(i));
      hull.push_back(p);
    } else {
      for (std::size_t i = next; i-- > 0;)
        hull.push_back(static_cast<std::uint32_t>(i));
      hull.push_back(p);
    }
  }

  for (std::size_t qi = next + 1; qi < n; ++qi) {
    const auto q = static_cast<std::uint32_t>(qi);
    const std::size_t m = hull.size();
    std::vector<bool> visible(m);
    bool any = false;
    for (std::size_t e = 0; e < m; ++e) {
      visible[e] = orient_i(pts[hull[e]], pts[hull[(e + 1) % m]], pts[qi]) < 0;
      any = any || visible[e];
    }
    if (!any)
      throw std::logic_error("random_subdivision: no visible hull edge");

    // The visible edges form one contiguous arc around the hull.
    std::size_t start = 0;
    while (start < m && !(visible[start] && !visible[(start + m - 1) % m]))
      ++start;
    if (start == m)
      throw std::logic_error("random_subdivision: visible arc not contiguous");
    std::size_t arc_len = 1;
    while (visible[(start + arc_len) % m]) ++arc_len;

    for (std::size_t e = start; e < start + arc_len; ++e)
      emit(hull[(e + 1) % m], hull[e % m], q);

    std::vector<std::uint32_t> next_hull;
    // Keep the arc from the last visible edge's target around to the first
    // visible edge's source, then attach q.
    for (std::size_t v = (start + arc_len) % m;; v = (v + 1) % m) {
      next_hull.push_back(hull[v]);
      if (v == start) break;
    }
    next_hull.push_back(q);
    hull = std::move(next_hull);
  }

  Subdivision s;
  s.vertices.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.vertices[i] = {static_cast<double>(pts[i].first),
                     static_cast<double>(pts[i].second)};
  s.faces.reserve(triangles.size());
  for (const auto& t : triangles)
    s.faces.push_back({t[0], t[1], t[2]});
  return s;
}

}  // namespace pointloc
