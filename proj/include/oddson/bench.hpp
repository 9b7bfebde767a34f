#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "oddson/apps.hpp"
#include "oddson/core.hpp"
#include "oddson/distributions.hpp"

namespace oddson {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::string app;  // polygon | postoffice | rectcount
  std::int64_t n = 0;
  double tau = 0.5;
  std::string depth_cap_mode = "practical";  // theoretical | practical | explicit
  std::optional<int> depth_cap_explicit;
  int min_samples = 1;
  QueryDistribution dist;
  std::int64_t query_count = 0;
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 1;
  bool baseline = false;
  std::optional<std::string> input_path;

  void validate() const;  // throws ConfigError
  static BenchConfig from_json(const nlohmann::json& j);
  static BenchConfig from_file(const std::string& path);
};

// Deterministic app inputs: sites / data points / polygon vertices.
std::vector<Point> gen_input_points(const std::string& app, std::int64_t n,
                                    std::uint64_t seed);
void write_points(const std::string& path, const std::vector<Point>& pts);
std::vector<Point> read_points(const std::string& path);

struct BuildLog {
  int m = 0;
  int depth_cap = 0;
  int node_count = 0;
  int terminal_count = 0;
  int frontier_count = 0;
  std::int64_t interference_calls = 0;
  nlohmann::json to_json() const;
};

// One configured problem instance: the app structures plus the odds-on tree
// in the model matching the app (two-line partition for the planar apps, k-d
// boxes for rectangle counting).
struct BuiltApp {
  std::optional<ConvexPolygonMembership> polygon;
  std::optional<PostOffice> postoffice;
  std::optional<RectCount> rectcount;
  std::optional<OddsOnTree<ConvexRegion>> ltree;
  std::optional<OddsOnTree<BoxRegion>> btree;
  BuildLog log;

  Backup backup() const;
  std::function<Answer(const Point&)> scan_fn() const;
  nlohmann::json tree_json() const;
};

BuiltApp build_app(const BenchConfig& cfg);
int resolve_depth_cap(const BenchConfig& cfg, int m, int arity);

struct BenchRow {
  std::string app;
  std::int64_t n = 0;
  int m = 0;
  double tau = 0;
  int depth_cap = 0;
  std::string distribution;
  std::int64_t query_count = 0;
  double mean_visits = 0;
  double p99_visits = 0;
  double fallback_rate = 0;
  double terminal_fraction = 0;
  double leaf_entropy_bits = 0;
  double answer_entropy_bits = 0;
  double mean_backup_ops = 0;
  std::uint64_t seed = 0;
  nlohmann::json sidecar;  // per-depth visit histogram

  std::string to_csv() const;
  static std::string csv_header();
};

BenchRow run_bench(const BenchConfig& cfg, const BuiltApp& built);

struct CheckItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckItem> run_checks(const BenchConfig& cfg, const BuiltApp& built);

}  // namespace oddson
