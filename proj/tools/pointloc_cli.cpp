#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pointloc/exact.hpp"
#include "pointloc/generator.hpp"
#include "pointloc/io.hpp"
#include "pointloc/locator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitVerificationFailure = 2;

std::string format_result(const pointloc::LocateResult& r) {
  using pointloc::LocateKind;
  std::ostringstream out;
  switch (r.kind) {
    case LocateKind::Inside:
      out << "inside " << *r.face << " " << *r.triangle;
      break;
    case LocateKind::OnEdge:
      out << "edge " << *r.face << " " << *r.triangle << " " << *r.edge_slot;
      break;
    case LocateKind::Outside:
      out << "outside";
      break;
  }
  return out.str();
}

int cmd_build(const std::string& input, const std::string& output,
              int word_bits) {
  const pointloc::Subdivision s = pointloc::read_subdivision_file(input);
  const auto index = pointloc::PackedEdgeIndex::build(s, word_bits);

  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + output + "' for write");
  index.serialize(out);
  if (!out) throw std::runtime_error("write to '" + output + "' failed");

  const auto& layout = index.layout();
  std::cout << "triangles " << index.geometry().triangles.size() << "\n"
            << "lanes " << index.lane_count() << "\n"
            << "cut_bit " << index.cut().cut_bit << "\n"
            << "width_B " << index.cut().width_B << "\n"
            << "lane_bits " << layout.lane_bits << "\n"
            << "lanes_per_word " << layout.lanes_per_word << "\n"
            << "words_per_stream " << index.words_per_stream() << "\n"
            << "error_budget " << index.error_budget() << "\n";
  return kExitOk;
}

pointloc::PackedEdgeIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return pointloc::PackedEdgeIndex::deserialize(in);
}

int cmd_locate(const std::string& index_path, const std::vector<double>& point,
               const std::string& query_file, bool no_fallback) {
  const auto index = load_index(index_path);
  const pointloc::LocateOptions options{!no_fallback};

  std::vector<pointloc::Vec2> queries;
  if (!query_file.empty()) queries = pointloc::read_queries_file(query_file);
  if (!point.empty()) queries.push_back({point[0], point[1]});
  if (queries.empty())
    throw std::runtime_error("locate: give a point or --queries FILE");

  for (const auto& q : queries)
    std::cout << format_result(index.locate(q.x, q.y, options)) << "\n";
  return kExitOk;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t queries,
              std::uint64_t seed, int word_bits, std::int64_t grid,
              bool no_timing) {
  int exit_code = kExitOk;
  for (const std::size_t n : sizes) {
    const pointloc::GeneratorParams params{n, seed, grid};
    const pointloc::Subdivision s = pointloc::random_subdivision(params);
    const auto index = pointloc::PackedEdgeIndex::build(s, word_bits);
    const auto& geometry = index.geometry();

    // Query box 10% larger than the hull on every side.
    double minx = s.vertices[0].x, maxx = minx;
    double miny = s.vertices[0].y, maxy = miny;
    for (const auto& v : s.vertices) {
      minx = std::min(minx, v.x);
      maxx = std::max(maxx, v.x);
      miny = std::min(miny, v.y);
      maxy = std::max(maxy, v.y);
    }
    const double padx = 0.1 * (maxx - minx);
    const double pady = 0.1 * (maxy - miny);

    std::mt19937_64 rng(seed ^ (n * 0x9e3779b97f4a7c15ULL));
    std::uniform_real_distribution<double> qx(minx - padx, maxx + padx);
    std::uniform_real_distribution<double> qy(miny - pady, maxy + pady);
    std::vector<pointloc::Vec2> points(queries);
    for (auto& p : points) p = {qx(rng), qy(rng)};

    pointloc::swar::OpCount ops;
    if (!points.empty()) {
      const auto q0 = index.quantize_query(points[0].x, points[0].y);
      index.evaluate(q0, &ops);
    }

    std::size_t mismatches = 0;
    const auto started = std::chrono::steady_clock::now();
    std::vector<pointloc::LocateResult> results(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      results[i] = index.locate(points[i].x, points[i].y);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - started;

    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto expected =
          pointloc::locate_bruteforce(geometry, points[i].x, points[i].y);
      const auto& got = results[i];
      const bool same =
          got.kind == expected.kind && got.face == expected.face &&
          (got.kind != pointloc::LocateKind::Inside ||
           got.triangle == expected.triangle);
      if (!same) {
        if (mismatches == 0)
          std::cerr << "mismatch: seed " << seed << " n " << n << " query "
                    << std::setprecision(17) << points[i].x << " "
                    << points[i].y << "\n";
        ++mismatches;
        exit_code = kExitVerificationFailure;
      }
    }

    nlohmann::json record;
    record["n"] = s.vertices.size();
    record["T"] = geometry.triangles.size();
    record["words_per_stream"] = index.words_per_stream();
    record["word_ops_per_query"] = ops.word_ops;
    record["queries_per_second"] =
        no_timing ? 0.0
                  : (elapsed.count() > 0.0
                         ? static_cast<double>(points.size()) / elapsed.count()
                         : 0.0);
    record["oracle_mismatch_count"] = mismatches;
    std::cout << record.dump() << "\n";
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packed-word planar point location"};
  app.require_subcommand(1);

  std::string input, output, index_path, query_file;
  std::vector<double> point;
  int word_bits = 64;
  bool no_fallback = false;
  bool no_timing = false;
  std::vector<std::size_t> sizes{16, 256};
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  std::int64_t grid = 64;

  auto* build = app.add_subcommand("build", "Build an index from a subdivision file");
  build->add_option("input", input, "subdivision text file")->required();
  build->add_option("output", output, "index output path")->required();
  build->add_option("--word-bits", word_bits, "machine word width")
      ->check(CLI::IsMember({64, 128}));

  auto* locate = app.add_subcommand("locate", "Locate query points");
  locate->add_option("index", index_path, "serialized index")->required();
  locate->add_option("point", point, "query point x y")->expected(0, 2);
  locate->add_option("--queries", query_file, "query file, one 'x y' per line");
  locate->add_flag("--no-fallback", no_fallback,
                   "report the packed verdict without exact confirmation");

  auto* bench = app.add_subcommand("bench", "Random-subdivision verification runs");
  bench->add_option("--sizes", sizes, "vertex counts")->delimiter(',');
  bench->add_option("--queries", queries, "queries per size");
  bench->add_option("--seed", seed, "generator seed");
  bench->add_option("--grid", grid, "vertex grid extent");
  bench->add_option("--word-bits", word_bits, "machine word width")
      ->check(CLI::IsMember({64, 128}));
  bench->add_flag("--no-timing", no_timing,
                  "zero the timing field so reports are byte-identical");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(input, output, word_bits);
    if (locate->parsed()) {
      if (point.size() == 1)
        throw std::runtime_error("locate: point needs both x and y");
      return cmd_locate(index_path, point, query_file, no_fallback);
    }
    if (bench->parsed())
      return cmd_bench(sizes, queries, seed, word_bits, grid, no_timing);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
