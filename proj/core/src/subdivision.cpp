#include "pointloc/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pointloc/exact.hpp"

namespace pointloc {

namespace {

// Exact orientation on quantized coordinates. Magnitudes stay below 2^62,
// so differences fit int64 and cross products fit 128 bits.
int orient_q(const IVec2& a, const IVec2& b, const IVec2& c) {
  const Int128 det = static_cast<Int128>(b.x - a.x) * (c.y - a.y) -
                     static_cast<Int128>(b.y - a.y) * (c.x - a.x);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

bool in_closed_triangle_q(const IVec2& p, const IVec2& a, const IVec2& b,
                          const IVec2& c) {
  return orient_q(a, b, p) >= 0 && orient_q(b, c, p) >= 0 &&
         orient_q(c, a, p) >= 0;
}

bool within_segment_box(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Any shared point between segments ab and cd, crossings and touches alike.
bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c,
                    const Vec2& d) {
  const ExactSign d1 = orient(c.x, c.y, d.x, d.y, a.x, a.y);
  const ExactSign d2 = orient(c.x, c.y, d.x, d.y, b.x, b.y);
  const ExactSign d3 = orient(a.x, a.y, b.x, b.y, c.x, c.y);
  const ExactSign d4 = orient(a.x, a.y, b.x, b.y, d.x, d.y);
  const auto opposite = [](ExactSign u, ExactSign v) {
    return (u == ExactSign::Positive && v == ExactSign::Negative) ||
           (u == ExactSign::Negative && v == ExactSign::Positive);
  };
  if (opposite(d1, d2) && opposite(d3, d4)) return true;
  if (d1 == ExactSign::Zero && within_segment_box(c, d, a)) return true;
  if (d2 == ExactSign::Zero && within_segment_box(c, d, b)) return true;
  if (d3 == ExactSign::Zero && within_segment_box(a, b, c)) return true;
  if (d4 == ExactSign::Zero && within_segment_box(a, b, d)) return true;
  return false;
}

void validate(const Subdivision& s) {
  if (s.vertices.empty())
    throw std::invalid_argument("subdivision has no vertices");
  for (const auto& v : s.vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw std::invalid_argument("subdivision has a non-finite vertex");
  if (s.faces.empty())
    throw std::invalid_argument("subdivision has no faces");

  for (std::size_t f = 0; f < s.faces.size(); ++f) {
    const auto& face = s.faces[f];
    const std::string where = "face " + std::to_string(f);
    if (face.size() < 3)
      throw std::invalid_argument(where + " has fewer than 3 vertices");
    for (auto idx : face)
      if (idx >= s.vertices.size())
        throw std::invalid_argument(where + " references vertex " +
                                    std::to_string(idx) + " out of range");
    {
      auto seen = face;
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::invalid_argument(where + " repeats a vertex");
    }

    std::vector<Vec2> ring(face.size());
    for (std::size_t i = 0; i < face.size(); ++i) ring[i] = s.vertices[face[i]];
    if (polygon_area_sign(ring) != ExactSign::Positive)
      throw std::invalid_argument(where +
                                  " is not a counterclockwise simple polygon");

    const std::size_t k = ring.size();
    for (std::size_t i = 0; i < k; ++i) {
      // consecutive edges may only share their common endpoint
      const Vec2& u = ring[i];
      const Vec2& v = ring[(i + 1) % k];
      const Vec2& w = ring[(i + 2) % k];
      if (orient(u.x, u.y, v.x, v.y, w.x, w.y) == ExactSign::Zero &&
          (within_segment_box(u, v, w) || within_segment_box(v, w, u)))
        throw std::invalid_argument(where + " doubles back on itself");
      // non-adjacent edges must not meet at all
      for (std::size_t j = i + 2; j < k; ++j) {
        if (i == 0 && j == k - 1) continue;
        if (segments_touch(ring[i], ring[(i + 1) % k], ring[j],
                           ring[(j + 1) % k]))
          throw std::invalid_argument(where + " self-intersects");
      }
    }
  }
}

BigInt ring_twice_area_q(const std::vector<std::uint32_t>& ring,
                         const std::vector<IVec2>& q) {
  BigInt area = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const IVec2& a = q[ring[i]];
    const IVec2& b = q[ring[(i + 1) % ring.size()]];
    area += BigInt(static_cast<Int128>(a.x) * b.y) -
            BigInt(static_cast<Int128>(b.x) * a.y);
  }
  return area;
}

// Removes adjacent quantized-coincident vertices (wraparound included).
void dedupe_ring(std::vector<std::uint32_t>& ring, const std::vector<IVec2>& q) {
  bool changed = true;
  while (changed && ring.size() >= 2) {
    changed = false;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const std::size_t j = (i + 1) % ring.size();
      if (q[ring[i]] == q[ring[j]]) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(j > i ? j : i));
        changed = true;
        break;
      }
    }
  }
}

void clip_face(std::vector<std::uint32_t> ring, const std::vector<IVec2>& q,
               std::uint32_t face_id, const std::string& face_name,
               std::vector<std::array<std::uint32_t, 3>>& triangles,
               std::vector<std::uint32_t>& face_of) {
  dedupe_ring(ring, q);
  if (ring.size() < 3)
    throw DegeneracyError(face_name + " collapsed under quantization");
  if (ring_twice_area_q(ring, q) <= 0)
    throw DegeneracyError(face_name + " has zero quantized area");

  const auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    triangles.push_back({a, b, c});
    face_of.push_back(face_id);
  };

  while (ring.size() > 3) {
    const std::size_t n = ring.size();
    bool progressed = false;
    for (std::size_t o = 0; o < n; ++o) {
      const std::size_t i = (1 + o) % n;
      const std::size_t h = (i + n - 1) % n;
      const std::size_t j = (i + 1) % n;
      const IVec2& a = q[ring[h]];
      const IVec2& b = q[ring[i]];
      const IVec2& c = q[ring[j]];
      const int s = orient_q(a, b, c);
      if (s < 0) continue;
      if (s == 0) {
        // flat vertex or zero-area spike tip: dropping it leaves the
        // covered region unchanged
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        dedupe_ring(ring, q);
        progressed = true;
        break;
      }
      bool blocked = false;
      for (std::size_t p = 0; p < n && !blocked; ++p) {
        if (p == h || p == i || p == j) continue;
        blocked = in_closed_triangle_q(q[ring[p]], a, b, c);
      }
      if (blocked) continue;
      emit(ring[h], ring[i], ring[j]);
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
      progressed = true;
      break;
    }
    if (!progressed)
      throw DegeneracyError(face_name +
                            " has no clippable ear after quantization");
    if (ring.size() < 3) break;
  }

  if (ring.size() == 3) {
    const int s = orient_q(q[ring[0]], q[ring[1]], q[ring[2]]);
    if (s > 0) emit(ring[0], ring[1], ring[2]);
    // zero-area remainder carries no area; nothing to emit
  }
}

TriangulatedSubdivision triangulate_impl(const Subdivision& s,
                                         const CutSpec& cut) {
  TriangulatedSubdivision t;
  t.vertices = s.vertices;
  t.cut = cut;
  t.quantized.resize(s.vertices.size());
  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    t.quantized[i] = {quantize(s.vertices[i].x, cut),
                      quantize(s.vertices[i].y, cut)};

  for (std::size_t f = 0; f < s.faces.size(); ++f) {
    clip_face(s.faces[f], t.quantized, static_cast<std::uint32_t>(f),
              "face " + std::to_string(f), t.triangles, t.face_of_triangle);
  }
  if (t.triangles.empty())
    throw DegeneracyError("subdivision produced no triangles");
  return t;
}

std::vector<double> collect_coords(const Subdivision& s) {
  std::vector<double> coords;
  coords.reserve(2 * s.vertices.size());
  for (const auto& v : s.vertices) {
    coords.push_back(v.x);
    coords.push_back(v.y);
  }
  return coords;
}

}  // namespace

TriangulatedSubdivision triangulate(const Subdivision& s, const CutSpec& cut) {
  validate(s);
  try {
    return triangulate_impl(s, cut);
  } catch (const DegeneracyError&) {
    return triangulate_impl(s, cut.refined(2));
  }
}

TriangulatedSubdivision triangulate(const Subdivision& s) {
  validate(s);
  const CutSpec cut = compute_cut_bit(collect_coords(s));
  try {
    return triangulate_impl(s, cut);
  } catch (const DegeneracyError&) {
    return triangulate_impl(s, cut.refined(2));
  }
}

std::array<EdgeCoeffs, 3> edge_coefficients(const TriangulatedSubdivision& t,
                                            std::uint32_t tri) {
  if (tri >= t.triangles.size())
    throw std::invalid_argument("edge_coefficients: triangle index out of range");
  const auto& v = t.triangles[tri];
  const IVec2 p[3] = {t.quantized[v[0]], t.quantized[v[1]], t.quantized[v[2]]};
  if (orient_q(p[0], p[1], p[2]) <= 0)
    throw DegeneracyError("edge_coefficients: triangle " + std::to_string(tri) +
                          " is not strictly CCW in quantized coordinates");
  std::array<EdgeCoeffs, 3> out;
  for (int slot = 0; slot < 3; ++slot) {
    const IVec2& j = p[slot];
    const IVec2& k = p[(slot + 1) % 3];
    out[slot].a = j.y - k.y;
    out[slot].b = k.x - j.x;
    out[slot].c = static_cast<Int128>(j.x) * k.y - static_cast<Int128>(k.x) * j.y;
    out[slot].triangle = tri;
    out[slot].edge_slot = slot;
  }
  return out;
}

}  // namespace pointloc
