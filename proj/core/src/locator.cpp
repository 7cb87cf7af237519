#include "pointloc/locator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace pointloc {

namespace {

constexpr char kMagic[8] = {'P', 'T', 'L', 'O', 'C', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

// margin duplicated into every occupied lane: one multiply by C1, with the
// trailing partial word masked so unoccupied lanes stay zero.
template <class Word>
swar::PackedSigned<Word> broadcast_margin(Int128 margin, std::size_t lanes,
                                          const swar::LaneLayout& layout,
                                          const swar::SwarConstants<Word>& k) {
  swar::PackedSigned<Word> out{layout, lanes, {}};
  if (lanes == 0) return out;
  const auto per_word = static_cast<std::size_t>(layout.lanes_per_word);
  const std::size_t words = (lanes + per_word - 1) / per_word;
  const Word value = static_cast<Word>(static_cast<swar::UInt128>(margin));
  out.words.assign(words, static_cast<Word>(k.c1 * value));
  const auto tail = static_cast<int>(lanes - (words - 1) * per_word);
  out.words.back() = static_cast<Word>(
      out.words.back() &
      swar::detail::low_bits<Word>(tail * layout.lane_bits));
  return out;
}

template <class Word>
PackedEdgeIndex::Data<Word> build_data(TriangulatedSubdivision t,
                                       int word_bits) {
  PackedEdgeIndex::Data<Word> d;
  d.geometry = std::move(t);
  d.cut_spec = d.geometry.cut;
  const int b = d.cut_spec.width_B;
  d.lane_layout = swar::make_layout(2 * b + 4, word_bits);
  d.constants = swar::make_constants<Word>(d.lane_layout);

  const std::size_t tri_count = d.geometry.triangles.size();
  std::vector<Int128> a(3 * tri_count), bb(3 * tri_count), c(3 * tri_count);
  const Int128 ab_limit = Int128(1) << (b + 1);
  const Int128 c_limit = Int128(1) << (2 * b + 2);
  for (std::uint32_t tri = 0; tri < tri_count; ++tri) {
    const auto coeffs = edge_coefficients(d.geometry, tri);
    for (int slot = 0; slot < 3; ++slot) {
      const auto& e = coeffs[slot];
      const Int128 ca = e.a < 0 ? -Int128(e.a) : Int128(e.a);
      const Int128 cb = e.b < 0 ? -Int128(e.b) : Int128(e.b);
      const Int128 cc = e.c < 0 ? -e.c : e.c;
      if (ca >= ab_limit || cb >= ab_limit || cc >= c_limit)
        throw std::runtime_error(
            "build: edge coefficient width violation in triangle " +
            std::to_string(tri));
      a[3 * tri + slot] = e.a;
      bb[3 * tri + slot] = e.b;
      c[3 * tri + slot] = e.c;
    }
  }
  d.streams = pack_coeff_streams<Word>(a, bb, c, d.lane_layout);

  // Real-unit coefficient bound for the error budget; inflated a little so
  // subtraction rounding cannot make it undershoot.
  double coeff_bound = 0.0;
  for (const auto& tri : d.geometry.triangles) {
    for (int slot = 0; slot < 3; ++slot) {
      const Vec2& vj = d.geometry.vertices[tri[slot]];
      const Vec2& vk = d.geometry.vertices[tri[(slot + 1) % 3]];
      coeff_bound = std::max({coeff_bound, std::abs(vj.y - vk.y),
                              std::abs(vk.x - vj.x)});
    }
  }
  d.budget = error_budget(d.cut_spec, coeff_bound * (1.0 + 0x1p-50));

  // Quantized-unit drift bound between a packed lane value and the scaled
  // real edge evaluation: coefficients inherit at most 2 units from their
  // two endpoints, coordinates at most 1, magnitudes are below mq + 1.
  Int128 mq = 0;
  for (const auto& qv : d.geometry.quantized) {
    mq = std::max(mq, Int128(qv.x < 0 ? -qv.x : qv.x));
    mq = std::max(mq, Int128(qv.y < 0 ? -qv.y : qv.y));
  }
  d.margin = 12 * mq + 16;
  d.margin_lanes =
      broadcast_margin(d.margin, 3 * tri_count, d.lane_layout, d.constants);

  d.bbox_min = {std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
  d.bbox_max = {-std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (const auto& v : d.geometry.vertices) {
    d.bbox_min.x = std::min(d.bbox_min.x, v.x);
    d.bbox_min.y = std::min(d.bbox_min.y, v.y);
    d.bbox_max.x = std::max(d.bbox_max.x, v.x);
    d.bbox_max.y = std::max(d.bbox_max.y, v.y);
  }
  return d;
}

int lowest_set_bit(std::uint64_t mask) {
  return std::countr_zero(mask);
}

template <class Word>
LocateResult locate_impl(const PackedEdgeIndex::Data<Word>& d, double x0,
                         double y0, const LocateOptions& options) {
  if (!std::isfinite(x0) || !std::isfinite(y0))
    throw std::invalid_argument("locate: non-finite query");
  if (x0 < d.bbox_min.x || x0 > d.bbox_max.x || y0 < d.bbox_min.y ||
      y0 > d.bbox_max.y)
    return {LocateKind::Outside, std::nullopt, std::nullopt, std::nullopt,
            false};

  const QueryPoint q{x0, y0, quantize(x0, d.cut_spec),
                     quantize(y0, d.cut_spec)};
  const auto ev = evaluate_streams(d.streams, d.constants, q.x1, q.y1);
  const auto tri_count =
      static_cast<std::uint32_t>(d.geometry.triangles.size());

  if (!options.exact_fallback) {
    for (std::uint32_t t = 0; t < tri_count; ++t) {
      if (ev.neg.chunk(3 * t, 3) != 0) continue;
      const std::uint64_t zeros = ev.zero.chunk(3 * t, 3);
      if (zeros != 0)
        return {LocateKind::OnEdge, t, d.geometry.face_of_triangle[t],
                lowest_set_bit(zeros), false};
      return {LocateKind::Inside, t, d.geometry.face_of_triangle[t],
              std::nullopt, false};
    }
    return {LocateKind::Outside, std::nullopt, std::nullopt, std::nullopt,
            false};
  }

  // Exact confirmation over the margin-widened candidate set. A lane below
  // -margin is negative beyond any quantization drift, so the triangle truly
  // containing or touching the query always survives this filter.
  const auto plus_margin = swar::lanewise_add(ev.sums, d.margin_lanes, d.constants);
  const auto certainly_neg = swar::extract_sign_bits(plus_margin, d.constants);

  bool ran_exact = false;
  bool have_edge = false;
  LocateResult edge_hit;
  for (std::uint32_t t = 0; t < tri_count; ++t) {
    if (certainly_neg.chunk(3 * t, 3) != 0) continue;
    ran_exact = true;
    const auto& v = d.geometry.triangles[t];
    const TrianglePlacement p = point_in_triangle_exact(
        {x0, y0}, d.geometry.vertices[v[0]], d.geometry.vertices[v[1]],
        d.geometry.vertices[v[2]]);
    if (p.kind == LocateKind::Inside)
      return {LocateKind::Inside, t, d.geometry.face_of_triangle[t],
              std::nullopt, true};
    if (p.kind == LocateKind::OnEdge && !have_edge) {
      edge_hit = {LocateKind::OnEdge, t, d.geometry.face_of_triangle[t],
                  p.edge_slot, true};
      have_edge = true;
    }
  }
  if (have_edge) return edge_hit;
  return {LocateKind::Outside, std::nullopt, std::nullopt, std::nullopt,
          ran_exact};
}

// --- little-endian stream helpers -----------------------------------------

void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 8);
}

void put_i64(std::ostream& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_word(std::ostream& out, std::uint64_t w) { put_u64(out, w); }
void put_word(std::ostream& out, swar::UInt128 w) {
  put_u64(out, static_cast<std::uint64_t>(w));
  put_u64(out, static_cast<std::uint64_t>(w >> 64));
}

void get_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IndexFormatError("corrupt index: truncated stream");
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  get_bytes(in, b, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  get_bytes(in, b, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

std::int64_t get_i64(std::istream& in) {
  return static_cast<std::int64_t>(get_u64(in));
}

double get_f64(std::istream& in) {
  return std::bit_cast<double>(get_u64(in));
}

void get_word(std::istream& in, std::uint64_t& w) { w = get_u64(in); }
void get_word(std::istream& in, swar::UInt128& w) {
  const std::uint64_t lo = get_u64(in);
  const std::uint64_t hi = get_u64(in);
  w = (swar::UInt128(hi) << 64) | lo;
}

template <class Word>
void put_words(std::ostream& out, const std::vector<Word>& words) {
  for (const Word& w : words) put_word(out, w);
}

template <class Word>
std::vector<Word> get_words(std::istream& in, std::size_t n) {
  std::vector<Word> words(n);
  for (auto& w : words) get_word(in, w);
  return words;
}

template <class Word>
void serialize_data(const PackedEdgeIndex::Data<Word>& d, std::ostream& out) {
  put_bytes(out, kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(d.lane_layout.word_bits));
  put_u32(out, static_cast<std::uint32_t>(d.lane_layout.magnitude_bits));
  put_u32(out, 0);  // reserved
  put_i64(out, d.cut_spec.cut_bit);
  put_u32(out, static_cast<std::uint32_t>(d.cut_spec.width_B));
  put_f64(out, d.cut_spec.err);
  put_f64(out, d.cut_spec.max_abs);
  put_f64(out, d.budget);
  const auto margin_u = static_cast<swar::UInt128>(d.margin);
  put_u64(out, static_cast<std::uint64_t>(margin_u));
  put_u64(out, static_cast<std::uint64_t>(margin_u >> 64));
  put_u64(out, d.streams.a_mags.count);
  put_u64(out, d.streams.a_mags.words.size());
  put_words(out, d.streams.a_mags.words);
  put_words(out, d.streams.a_signs.words);
  put_words(out, d.streams.b_mags.words);
  put_words(out, d.streams.b_signs.words);
  put_words(out, d.streams.c.words);

  put_u64(out, d.geometry.vertices.size());
  for (std::size_t i = 0; i < d.geometry.vertices.size(); ++i) {
    put_f64(out, d.geometry.vertices[i].x);
    put_f64(out, d.geometry.vertices[i].y);
    put_i64(out, d.geometry.quantized[i].x);
    put_i64(out, d.geometry.quantized[i].y);
  }
  put_u64(out, d.geometry.triangles.size());
  for (std::size_t t = 0; t < d.geometry.triangles.size(); ++t) {
    for (int s = 0; s < 3; ++s) put_u32(out, d.geometry.triangles[t][s]);
    put_u32(out, d.geometry.face_of_triangle[t]);
  }
}

template <class Word>
PackedEdgeIndex::Data<Word> deserialize_data(std::istream& in, int word_bits,
                                             int magnitude_bits) {
  PackedEdgeIndex::Data<Word> d;
  d.lane_layout = swar::make_layout(magnitude_bits, word_bits);
  d.constants = swar::make_constants<Word>(d.lane_layout);
  d.cut_spec.cut_bit = static_cast<int>(get_i64(in));
  d.cut_spec.width_B = static_cast<int>(get_u32(in));
  d.cut_spec.err = get_f64(in);
  d.cut_spec.max_abs = get_f64(in);
  d.budget = get_f64(in);
  const std::uint64_t margin_lo = get_u64(in);
  const std::uint64_t margin_hi = get_u64(in);
  d.margin = static_cast<Int128>((swar::UInt128(margin_hi) << 64) | margin_lo);

  const std::uint64_t lanes = get_u64(in);
  const std::uint64_t words = get_u64(in);
  const std::size_t expected_words =
      lanes == 0 ? 0
                 : (lanes + d.lane_layout.lanes_per_word - 1) /
                       d.lane_layout.lanes_per_word;
  if (words != expected_words)
    throw IndexFormatError("corrupt index: word count mismatch");

  const auto shape_mags = [&](std::vector<Word> w) {
    return swar::PackedMagnitudes<Word>{d.lane_layout, lanes, std::move(w)};
  };
  const auto shape_signs = [&](std::vector<Word> w) {
    return swar::SignWord<Word>{d.lane_layout, lanes, std::move(w)};
  };
  d.streams.a_mags = shape_mags(get_words<Word>(in, words));
  d.streams.a_signs = shape_signs(get_words<Word>(in, words));
  d.streams.b_mags = shape_mags(get_words<Word>(in, words));
  d.streams.b_signs = shape_signs(get_words<Word>(in, words));
  d.streams.c =
      swar::PackedSigned<Word>{d.lane_layout, lanes, get_words<Word>(in, words)};

  const std::uint64_t n = get_u64(in);
  d.geometry.vertices.resize(n);
  d.geometry.quantized.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    d.geometry.vertices[i].x = get_f64(in);
    d.geometry.vertices[i].y = get_f64(in);
    d.geometry.quantized[i].x = get_i64(in);
    d.geometry.quantized[i].y = get_i64(in);
  }
  const std::uint64_t tri_count = get_u64(in);
  if (tri_count == 0 || lanes != 3 * tri_count)
    throw IndexFormatError("corrupt index: lane/triangle count mismatch");
  d.geometry.triangles.resize(tri_count);
  d.geometry.face_of_triangle.resize(tri_count);
  for (std::uint64_t t = 0; t < tri_count; ++t) {
    for (int s = 0; s < 3; ++s) {
      const std::uint32_t v = get_u32(in);
      if (v >= n) throw IndexFormatError("corrupt index: vertex out of range");
      d.geometry.triangles[t][s] = v;
    }
    d.geometry.face_of_triangle[t] = get_u32(in);
  }
  d.geometry.cut = d.cut_spec;

  if (d.margin < 0 ||
      d.margin >= Int128(1) << d.lane_layout.magnitude_bits)
    throw IndexFormatError("corrupt index: margin exceeds the lane width");
  d.margin_lanes =
      broadcast_margin(d.margin, lanes, d.lane_layout, d.constants);

  d.bbox_min = {std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
  d.bbox_max = {-std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (const auto& v : d.geometry.vertices) {
    d.bbox_min.x = std::min(d.bbox_min.x, v.x);
    d.bbox_min.y = std::min(d.bbox_min.y, v.y);
    d.bbox_max.x = std::max(d.bbox_max.x, v.x);
    d.bbox_max.y = std::max(d.bbox_max.y, v.y);
  }
  return d;
}

}  // namespace

PackedEdgeIndex PackedEdgeIndex::build(const Subdivision& s, int word_bits) {
  TriangulatedSubdivision t = triangulate(s);
  if (word_bits == 64)
    return PackedEdgeIndex(build_data<std::uint64_t>(std::move(t), 64));
  if (word_bits == 128)
    return PackedEdgeIndex(build_data<swar::UInt128>(std::move(t), 128));
  throw std::invalid_argument("build: word_bits must be 64 or 128");
}

QueryPoint PackedEdgeIndex::quantize_query(double x0, double y0) const {
  return std::visit(
      [&](const auto& d) {
        return QueryPoint{x0, y0, quantize(x0, d.cut_spec),
                          quantize(y0, d.cut_spec)};
      },
      data_);
}

EvalMasks PackedEdgeIndex::evaluate(const QueryPoint& q,
                                    swar::OpCount* ops) const {
  return std::visit(
      [&](const auto& d) {
        auto ev = evaluate_streams(d.streams, d.constants, q.x1, q.y1, ops);
        return EvalMasks{std::move(ev.neg), std::move(ev.zero)};
      },
      data_);
}

std::vector<Candidate> PackedEdgeIndex::candidates(
    const EvalMasks& masks) const {
  std::vector<Candidate> out;
  const std::size_t tri_count = lane_count() / 3;
  for (std::size_t t = 0; t < tri_count; ++t) {
    if (masks.neg.chunk(3 * t, 3) != 0) continue;
    out.push_back({static_cast<std::uint32_t>(t),
                   static_cast<std::uint8_t>(masks.zero.chunk(3 * t, 3))});
  }
  return out;
}

LocateResult PackedEdgeIndex::locate(double x0, double y0,
                                     const LocateOptions& options) const {
  return std::visit(
      [&](const auto& d) { return locate_impl(d, x0, y0, options); }, data_);
}

int PackedEdgeIndex::word_bits() const {
  return std::visit([](const auto& d) { return d.lane_layout.word_bits; },
                    data_);
}

const swar::LaneLayout& PackedEdgeIndex::layout() const {
  return std::visit(
      [](const auto& d) -> const swar::LaneLayout& { return d.lane_layout; },
      data_);
}

const CutSpec& PackedEdgeIndex::cut() const {
  return std::visit(
      [](const auto& d) -> const CutSpec& { return d.cut_spec; }, data_);
}

double PackedEdgeIndex::error_budget() const {
  return std::visit([](const auto& d) { return d.budget; }, data_);
}

std::size_t PackedEdgeIndex::lane_count() const {
  return std::visit([](const auto& d) { return d.streams.a_mags.count; },
                    data_);
}

std::size_t PackedEdgeIndex::words_per_stream() const {
  return std::visit(
      [](const auto& d) { return d.streams.a_mags.words.size(); }, data_);
}

const TriangulatedSubdivision& PackedEdgeIndex::geometry() const {
  return std::visit(
      [](const auto& d) -> const TriangulatedSubdivision& {
        return d.geometry;
      },
      data_);
}

void PackedEdgeIndex::serialize(std::ostream& out) const {
  std::visit([&](const auto& d) { serialize_data(d, out); }, data_);
  if (!out) throw IndexFormatError("serialize: stream write failed");
}

PackedEdgeIndex PackedEdgeIndex::deserialize(std::istream& in) {
  char magic[8];
  get_bytes(in, magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw IndexFormatError("corrupt index: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw IndexFormatError("corrupt index: unsupported version " +
                           std::to_string(version));
  const auto word_bits = static_cast<int>(get_u32(in));
  const auto magnitude_bits = static_cast<int>(get_u32(in));
  get_u32(in);  // reserved
  if (word_bits == 64)
    return PackedEdgeIndex(
        deserialize_data<std::uint64_t>(in, 64, magnitude_bits));
  if (word_bits == 128)
    return PackedEdgeIndex(
        deserialize_data<swar::UInt128>(in, 128, magnitude_bits));
  throw IndexFormatError("corrupt index: word width " +
                         std::to_string(word_bits));
}

}  // namespace pointloc
