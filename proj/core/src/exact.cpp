#include "pointloc/exact.hpp"

#include <cmath>
#include <stdexcept>

#include "pointloc/quantizer.hpp"

namespace pointloc {

namespace {

// First-stage error bound for the 2x2 orientation determinant evaluated in
// doubles: when |det| exceeds kFilterBound * (|detleft| + |detright|) the
// floating-point sign is already exact.
constexpr double kEpsilon = 0x1p-53;
constexpr double kFilterBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;

struct Decomposed {
  std::int64_t mantissa;
  int exp;
};

Decomposed decompose(double x) {
  int e = 0;
  const double m = std::frexp(x, &e);
  return {static_cast<std::int64_t>(std::ldexp(m, 53)), e - 53};
}

// Doubles scaled to integers over a shared power-of-two exponent; the scale
// is positive, so determinant and area signs are unaffected.
class ScaledAxis {
 public:
  explicit ScaledAxis(std::span<const double> values) {
    decomposed_.reserve(values.size());
    for (double v : values) {
      decomposed_.push_back(decompose(v));
      if (decomposed_.back().mantissa != 0)
        min_exp_ = std::min(min_exp_, decomposed_.back().exp);
    }
  }

  BigInt operator[](std::size_t i) const {
    const auto& d = decomposed_[i];
    if (d.mantissa == 0) return BigInt(0);
    return BigInt(d.mantissa) << (d.exp - min_exp_);
  }

 private:
  std::vector<Decomposed> decomposed_;
  int min_exp_ = 0;
};

ExactSign sign_of(const BigInt& v) {
  if (v > 0) return ExactSign::Positive;
  if (v < 0) return ExactSign::Negative;
  return ExactSign::Zero;
}

ExactSign orient_exact(double px, double py, double qx, double qy, double rx,
                       double ry) {
  const double xs[3] = {px, qx, rx};
  const double ys[3] = {py, qy, ry};
  const ScaledAxis x(xs);
  const ScaledAxis y(ys);
  const BigInt det = (x[1] - x[0]) * (y[2] - y[0]) - (y[1] - y[0]) * (x[2] - x[0]);
  return sign_of(det);
}

void require_finite(std::initializer_list<double> vs, const char* who) {
  for (double v : vs)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(who) + ": non-finite input");
}

}  // namespace

ExactSign orient(double px, double py, double qx, double qy, double rx,
                 double ry) {
  require_finite({px, py, qx, qy, rx, ry}, "orient");

  const double detleft = (qx - px) * (ry - py);
  const double detright = (qy - py) * (rx - px);
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);

  // The relative error model behind kFilterBound breaks when the products
  // land in the denormal range, so tiny determinants always go exact.
  if (detsum >= 0x1p-1000) {
    const double errbound = kFilterBound * detsum;
    if (det > errbound) return ExactSign::Positive;
    if (det < -errbound) return ExactSign::Negative;
  }
  return orient_exact(px, py, qx, qy, rx, ry);
}

ExactSign polygon_area_sign(std::span<const Vec2> ring) {
  std::vector<double> xs(ring.size());
  std::vector<double> ys(ring.size());
  for (std::size_t i = 0; i < ring.size(); ++i) {
    require_finite({ring[i].x, ring[i].y}, "polygon_area_sign");
    xs[i] = ring[i].x;
    ys[i] = ring[i].y;
  }
  const ScaledAxis x(xs);
  const ScaledAxis y(ys);
  BigInt twice_area = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const std::size_t j = (i + 1) % ring.size();
    twice_area += x[i] * y[j] - x[j] * y[i];
  }
  return sign_of(twice_area);
}

TrianglePlacement point_in_triangle_exact(Vec2 q, Vec2 a, Vec2 b, Vec2 c) {
  if (orient(a.x, a.y, b.x, b.y, c.x, c.y) != ExactSign::Positive)
    throw std::invalid_argument(
        "point_in_triangle_exact: triangle is not strictly CCW");

  const ExactSign s[3] = {
      orient(a.x, a.y, b.x, b.y, q.x, q.y),
      orient(b.x, b.y, c.x, c.y, q.x, q.y),
      orient(c.x, c.y, a.x, a.y, q.x, q.y),
  };
  for (int slot = 0; slot < 3; ++slot)
    if (s[slot] == ExactSign::Negative) return {LocateKind::Outside, -1};
  for (int slot = 0; slot < 3; ++slot)
    if (s[slot] == ExactSign::Zero) return {LocateKind::OnEdge, slot};
  return {LocateKind::Inside, -1};
}

LocateResult locate_bruteforce(const TriangulatedSubdivision& t, double x,
                               double y) {
  require_finite({x, y}, "locate_bruteforce");
  LocateResult edge_hit;
  bool have_edge = false;
  for (std::uint32_t tri = 0; tri < t.triangles.size(); ++tri) {
    const auto& v = t.triangles[tri];
    const TrianglePlacement p = point_in_triangle_exact(
        {x, y}, t.vertices[v[0]], t.vertices[v[1]], t.vertices[v[2]]);
    if (p.kind == LocateKind::Inside)
      return {LocateKind::Inside, tri, t.face_of_triangle[tri], std::nullopt,
              true};
    if (p.kind == LocateKind::OnEdge && !have_edge) {
      edge_hit = {LocateKind::OnEdge, tri, t.face_of_triangle[tri],
                  p.edge_slot, true};
      have_edge = true;
    }
  }
  if (have_edge) return edge_hit;
  return {LocateKind::Outside, std::nullopt, std::nullopt, std::nullopt, true};
}

}  // namespace pointloc
