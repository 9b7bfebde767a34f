#include "oddson/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "oddson/partition.hpp"

namespace oddson {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

Point sample_box_point(const BoxRegion& box, std::mt19937_64& rng) {
  Point p(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    const double lo = std::max(box.lo()[i], -kWorkingBoxHalf);
    const double hi = std::min(box.hi()[i], kWorkingBoxHalf);
    p[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return p;
}

}  // namespace

void BenchConfig::validate() const {
  if (app != "polygon" && app != "postoffice" && app != "rectcount")
    throw ConfigError("unknown app: " + app);
  if (n <= 0) throw ConfigError("n must be positive");
  if (tau <= 0 || tau > 1) throw ConfigError("tau must be in (0, 1]");
  if (query_count <= 0) throw ConfigError("query_count must be positive");
  if (threads <= 0) throw ConfigError("threads must be positive");
  if (min_samples < 1) throw ConfigError("min_samples must be >= 1");
  if (depth_cap_mode != "theoretical" && depth_cap_mode != "practical" &&
      depth_cap_mode != "explicit")
    throw ConfigError("depth_cap_mode must be theoretical, practical or explicit");
  if (depth_cap_mode == "explicit" && !depth_cap_explicit)
    throw ConfigError("explicit depth_cap_mode requires a depth_cap value");
  const int want_dim = app == "rectcount" ? 4 : 2;
  if (dist.dim != want_dim)
    throw ConfigError("distribution dimension does not match the app");
  try {
    dist.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad distribution: ") + e.what());
  }
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
  BenchConfig cfg;
  try {
    cfg.app = j.at("app").get<std::string>();
    cfg.n = j.at("n").get<std::int64_t>();
    cfg.tau = j.at("tau").get<double>();
    if (j.contains("depth_cap_mode")) {
      if (j.at("depth_cap_mode").is_number_integer()) {
        cfg.depth_cap_mode = "explicit";
        cfg.depth_cap_explicit = j.at("depth_cap_mode").get<int>();
      } else {
        cfg.depth_cap_mode = j.at("depth_cap_mode").get<std::string>();
      }
    }
    if (j.contains("depth_cap")) cfg.depth_cap_explicit = j.at("depth_cap").get<int>();
    if (j.contains("min_samples")) cfg.min_samples = j.at("min_samples").get<int>();
    cfg.dist = QueryDistribution::from_json(j.at("distribution"));
    cfg.query_count = j.at("query_count").get<std::int64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("baseline")) cfg.baseline = j.at("baseline").get<bool>();
    if (j.contains("input_path"))
      cfg.input_path = j.at("input_path").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

BenchConfig BenchConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

std::vector<Point> gen_input_points(const std::string& app, std::int64_t n,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 0xDA7A));
  std::vector<Point> pts;
  pts.reserve(n);
  if (app == "polygon") {
    // Strictly convex: n distinct angles on a circle.
    std::vector<double> angles(n);
    std::uniform_real_distribution<double> uni(0.0, 2 * M_PI);
    for (auto& a : angles) a = uni(rng);
    std::sort(angles.begin(), angles.end());
    for (double a : angles)
      pts.push_back({500.0 + 400.0 * std::cos(a), 500.0 + 400.0 * std::sin(a)});
  } else {
    std::uniform_real_distribution<double> uni(0.0, 1000.0);
    for (std::int64_t i = 0; i < n; ++i) pts.push_back({uni(rng), uni(rng)});
  }
  return pts;
}

void write_points(const std::string& path, const std::vector<Point>& pts) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  for (const Point& p : pts) {
    for (size_t i = 0; i < p.size(); ++i)
      out << (i ? " " : "") << fmt_double(p[i]);
    out << "\n";
  }
}

std::vector<Point> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file: " + path);
  std::vector<Point> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Point p;
    double v;
    while (ss >> v) p.push_back(v);
    if (!p.empty()) pts.push_back(std::move(p));
  }
  return pts;
}

nlohmann::json BuildLog::to_json() const {
  return {{"m", m},
          {"depth_cap", depth_cap},
          {"node_count", node_count},
          {"terminal_count", terminal_count},
          {"frontier_count", frontier_count},
          {"interference_calls", interference_calls}};
}

Backup BuiltApp::backup() const {
  if (polygon) {
    const auto* app = &*polygon;
    return [app](const Point& q) {
      const BackupAnswer b = app->backup(q);
      return std::make_pair(b.answer, b.ops);
    };
  }
  if (postoffice) {
    const auto* app = &*postoffice;
    return [app](const Point& q) {
      const BackupAnswer b = app->backup(q);
      return std::make_pair(b.answer, b.ops);
    };
  }
  const auto* app = &*rectcount;
  return [app](const Point& q) {
    const BackupAnswer b = app->backup(q);
    return std::make_pair(b.answer, b.ops);
  };
}

std::function<Answer(const Point&)> BuiltApp::scan_fn() const {
  if (polygon) {
    const auto* app = &*polygon;
    return [app](const Point& q) { return app->scan(q); };
  }
  if (postoffice) {
    const auto* app = &*postoffice;
    return [app](const Point& q) { return app->scan(q); };
  }
  const auto* app = &*rectcount;
  return [app](const Point& q) { return app->scan(q); };
}

nlohmann::json BuiltApp::tree_json() const {
  return ltree ? tree_to_json(*ltree) : tree_to_json(*btree);
}

int resolve_depth_cap(const BenchConfig& cfg, int m, int arity) {
  if (cfg.depth_cap_mode == "theoretical") return theoretical_depth_cap(m, arity);
  if (cfg.depth_cap_mode == "practical") return practical_depth_cap(m, arity);
  return *cfg.depth_cap_explicit;
}

BuiltApp build_app(const BenchConfig& cfg) {
  BuiltApp built;
  std::vector<Point> input = cfg.input_path
                                 ? read_points(*cfg.input_path)
                                 : gen_input_points(cfg.app, cfg.n, cfg.seed);

  OddsOnConfig ocfg;
  ocfg.n = cfg.n;
  ocfg.tau = cfg.tau;
  ocfg.min_samples = cfg.min_samples;
  ocfg.seed = mix_seed(cfg.seed, 0x7EEE);
  const int m = sample_count(ocfg);
  const Sampler sampler = cfg.dist.sampler();

  if (cfg.app == "rectcount") {
    built.rectcount.emplace(std::move(input));
    ocfg.depth_cap = resolve_depth_cap(cfg, m, KdRule::arity);
    const auto* app = &*built.rectcount;
    Interference<BoxRegion> oracle = [app](const BoxRegion& b) {
      return app->interference(b);
    };
    built.btree =
        build_tree(ocfg, sampler, oracle, KdRule{}, BoxRegion::cube(4, kWorkingBoxHalf));
  } else {
    if (cfg.app == "polygon")
      built.polygon.emplace(std::move(input));
    else
      built.postoffice.emplace(std::move(input));
    ocfg.depth_cap = resolve_depth_cap(cfg, m, TwoLineRule::arity);
    Interference<ConvexRegion> oracle;
    if (built.polygon) {
      const auto* app = &*built.polygon;
      oracle = [app](const ConvexRegion& r) { return app->interference(r); };
    } else {
      const auto* app = &*built.postoffice;
      oracle = [app](const ConvexRegion& r) { return app->interference(r); };
    }
    built.ltree = build_tree(ocfg, sampler, oracle, TwoLineRule{},
                             ConvexRegion::working_box());
  }

  built.log.m = m;
  built.log.depth_cap = *ocfg.depth_cap;
  auto tally = [&](const auto& tree) {
    built.log.node_count = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.status == NodeStatus::Terminal) ++built.log.terminal_count;
      if (node.status == NodeStatus::Frontier) ++built.log.frontier_count;
    }
    built.log.interference_calls = tree.interference_calls;
  };
  if (built.ltree)
    tally(*built.ltree);
  else
    tally(*built.btree);
  return built;
}

namespace {

struct RunAcc {
  std::int64_t visits_sum = 0;
  std::int64_t backup_ops_sum = 0;
  std::int64_t fallback = 0;
  std::vector<int> visits;
  std::vector<std::int64_t> leaf_hits;
  std::map<Answer, std::int64_t> answers;
  std::map<int, std::int64_t> depth_hist;  // path length -> queries

  void merge(const RunAcc& o) {
    visits_sum += o.visits_sum;
    backup_ops_sum += o.backup_ops_sum;
    fallback += o.fallback;
    visits.insert(visits.end(), o.visits.begin(), o.visits.end());
    if (leaf_hits.size() < o.leaf_hits.size()) leaf_hits.resize(o.leaf_hits.size());
    for (size_t i = 0; i < o.leaf_hits.size(); ++i) leaf_hits[i] += o.leaf_hits[i];
    for (const auto& [a, c] : o.answers) answers[a] += c;
    for (const auto& [d, c] : o.depth_hist) depth_hist[d] += c;
  }
};

template <class RegionT>
void run_shard(const OddsOnTree<RegionT>* tree, const Backup& backup, bool baseline,
               const std::vector<Point>& queries, size_t lo, size_t hi, RunAcc* acc) {
  acc->leaf_hits.assign(tree ? tree->nodes.size() : 0, 0);
  for (size_t i = lo; i < hi; ++i) {
    QueryStats st;
    if (baseline || !tree) {
      st.nodes_visited = 1;
      st.used_backup = true;
      auto [ans, ops] = backup(queries[i]);
      st.answer = ans;
      st.backup_ops = ops;
    } else {
      st = query(*tree, queries[i], backup);
      if (st.leaf >= 0) ++acc->leaf_hits[st.leaf];
    }
    acc->visits_sum += st.nodes_visited;
    acc->backup_ops_sum += st.backup_ops;
    if (st.used_backup) ++acc->fallback;
    acc->visits.push_back(st.nodes_visited);
    ++acc->answers[st.answer];
    ++acc->depth_hist[st.nodes_visited];
  }
}

template <class RegionT>
RunAcc run_all(const OddsOnTree<RegionT>* tree, const Backup& backup, bool baseline,
               const std::vector<Point>& queries, int threads) {
  const size_t n = queries.size();
  if (threads <= 1) {
    RunAcc acc;
    run_shard(tree, backup, baseline, queries, 0, n, &acc);
    return acc;
  }
  std::vector<RunAcc> accs(threads);
  std::vector<std::thread> workers;
  const size_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const size_t lo = std::min(n, t * chunk);
    const size_t hi = std::min(n, lo + chunk);
    workers.emplace_back(run_shard<RegionT>, tree, std::cref(backup), baseline,
                         std::cref(queries), lo, hi, &accs[t]);
  }
  for (auto& w : workers) w.join();
  RunAcc total;
  for (const RunAcc& a : accs) total.merge(a);
  return total;
}

double entropy_from_counts(const std::map<Answer, std::int64_t>& counts,
                           std::int64_t total) {
  double h = 0;
  for (const auto& [a, c] : counts) {
    (void)a;
    if (c <= 0) continue;
    const double p = double(c) / double(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

BenchRow run_bench(const BenchConfig& cfg, const BuiltApp& built) {
  std::vector<Point> queries;
  queries.reserve(cfg.query_count);
  std::mt19937_64 qrng(mix_seed(cfg.seed, 0x0BE7));
  for (std::int64_t i = 0; i < cfg.query_count; ++i)
    queries.push_back(cfg.dist.draw(qrng));

  const Backup backup = built.backup();
  RunAcc acc;
  if (built.ltree)
    acc = run_all(cfg.baseline ? nullptr : &*built.ltree, backup, cfg.baseline,
                  queries, cfg.threads);
  else
    acc = run_all(cfg.baseline ? nullptr : &*built.btree, backup, cfg.baseline,
                  queries, cfg.threads);

  BenchRow row;
  row.app = cfg.app;
  row.n = cfg.n;
  row.m = built.log.m;
  row.tau = cfg.tau;
  row.depth_cap = built.log.depth_cap;
  row.distribution = cfg.dist.id();
  row.query_count = cfg.query_count;
  row.seed = cfg.seed;

  const double N = double(cfg.query_count);
  row.mean_visits = acc.visits_sum / N;
  std::sort(acc.visits.begin(), acc.visits.end());
  row.p99_visits =
      acc.visits.empty()
          ? 0
          : acc.visits[std::min(acc.visits.size() - 1,
                                static_cast<size_t>(std::ceil(0.99 * N)) - 1)];
  row.fallback_rate = acc.fallback / N;
  row.mean_backup_ops = acc.backup_ops_sum / N;
  row.answer_entropy_bits = entropy_from_counts(acc.answers, cfg.query_count);

  int leaves = 0, terminals = 0;
  std::vector<double> leaf_probs;
  auto scan_tree = [&](const auto& tree) {
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& node = tree.nodes[i];
      if (node.status == NodeStatus::Internal) {
        // An endpoint at an internal node (routing gap) still holds mass.
        if (i < acc.leaf_hits.size() && acc.leaf_hits[i] > 0)
          leaf_probs.push_back(acc.leaf_hits[i] / N);
        continue;
      }
      ++leaves;
      if (node.status == NodeStatus::Terminal) ++terminals;
      if (i < acc.leaf_hits.size()) leaf_probs.push_back(acc.leaf_hits[i] / N);
    }
  };
  if (built.ltree)
    scan_tree(*built.ltree);
  else
    scan_tree(*built.btree);
  row.terminal_fraction = leaves ? double(terminals) / leaves : 0;
  bool any_mass = false;
  for (double p : leaf_probs) any_mass = any_mass || p > 0;
  row.leaf_entropy_bits = any_mass && !cfg.baseline ? leaf_entropy(leaf_probs) : 0;

  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [depth, count] : acc.depth_hist)
    hist[std::to_string(depth)] = count;
  row.sidecar = {{"visits_histogram", hist}};
  return row;
}

std::string BenchRow::csv_header() {
  return "schema_version,app,n,m,tau,depth_cap,distribution,query_count,"
         "mean_visits,p99_visits,fallback_rate,terminal_fraction,"
         "leaf_entropy_bits,answer_entropy_bits,mean_backup_ops,seed";
}

std::string BenchRow::to_csv() const {
  std::ostringstream ss;
  ss << 1 << ',' << app << ',' << n << ',' << m << ',' << fmt_num(tau) << ','
     << depth_cap << ',' << distribution << ',' << query_count << ','
     << fmt_num(mean_visits) << ',' << fmt_num(p99_visits) << ','
     << fmt_num(fallback_rate) << ',' << fmt_num(terminal_fraction) << ','
     << fmt_num(leaf_entropy_bits) << ',' << fmt_num(answer_entropy_bits) << ','
     << fmt_num(mean_backup_ops) << ',' << seed;
  return ss.str();
}

std::vector<CheckItem> run_checks(const BenchConfig& cfg, const BuiltApp& built) {
  std::vector<CheckItem> items;
  const auto scan = built.scan_fn();

  {  // Partition size and crossing bounds on fresh seeded samples.
    CheckItem item{"partition_bounds", true, ""};
    std::mt19937_64 rng(mix_seed(cfg.seed, 0xBEEF));
    std::uniform_real_distribution<double> uni(0.0, 1000.0);
    for (int m : {16, 64, 256, 1024}) {
      for (int rep = 0; rep < 25 && item.pass; ++rep) {
        std::vector<Point> pts;
        pts.reserve(m);
        for (int i = 0; i < m; ++i) pts.push_back({uni(rng), uni(rng)});
        const TwoLineSplit split = two_line_split(pts, 0);
        const int cap = (m + 3) / 4;
        for (const auto& cell : split.assigned) {
          if (static_cast<int>(cell.size()) > cap) {
            item.pass = false;
            item.detail = "cell size " + std::to_string(cell.size()) +
                          " exceeds ceil(m/4) at m=" + std::to_string(m);
          }
        }
        for (int l = 0; l < 25 && item.pass; ++l) {
          const double theta = std::uniform_real_distribution<double>(0, M_PI)(rng);
          const HalfPlane line(std::cos(theta), std::sin(theta), uni(rng));
          const int crossings = crossing_count(split, line);
          if (crossings > 3) {
            item.pass = false;
            item.detail = "line crosses " + std::to_string(crossings) + " cells";
          }
        }
      }
    }
    items.push_back(std::move(item));
  }

  {  // Terminal leaves must be answer-uniform (sampled).
    CheckItem item{"terminal_soundness", true, ""};
    std::mt19937_64 rng(mix_seed(cfg.seed, 0x50D4));
    auto check_tree = [&](const auto& tree, auto sample_fn) {
      for (size_t i = 0; i < tree.nodes.size() && item.pass; ++i) {
        const auto& node = tree.nodes[i];
        if (node.status != NodeStatus::Terminal || node.label == kUnreachable)
          continue;
        for (int s = 0; s < 100; ++s) {
          const Point p = sample_fn(node.poly, rng);
          if (scan(p) != node.label) {
            item.pass = false;
            item.detail = "node " + std::to_string(i) + " labelled " +
                          std::to_string(node.label) + " but sampled answer " +
                          std::to_string(scan(p));
            break;
          }
        }
      }
    };
    if (built.ltree)
      check_tree(*built.ltree,
                 [](const ConvexRegion& r, std::mt19937_64& g) { return sample_point(r, g); });
    else
      check_tree(*built.btree, [](const BoxRegion& r, std::mt19937_64& g) {
        return sample_box_point(r, g);
      });
    items.push_back(std::move(item));
  }

  {  // Theorem-3 Condition 1: visit frequency at depth i at most (3/4)^i
     // plus 3 binomial standard errors (two-line trees only).
    CheckItem item{"condition1_frequencies", true, ""};
    if (built.ltree) {
      const std::int64_t N = 100000;
      const VisitFrequencies vf = estimate_visit_frequencies(
          *built.ltree, cfg.dist.sampler(), mix_seed(cfg.seed, 0xC0D1), N);
      std::map<int, std::pair<int, int>> per_depth;  // depth -> (ok, total)
      for (size_t i = 0; i < built.ltree->nodes.size(); ++i) {
        const int depth = built.ltree->nodes[i].depth;
        const double bound = std::pow(0.75, depth);
        const double limit = bound + 3 * std::sqrt(bound / double(N));
        const double freq = vf.node_visits[i] / double(N);
        auto& [ok, total] = per_depth[depth];
        ++total;
        if (freq <= limit) ++ok;
      }
      for (const auto& [depth, counts] : per_depth) {
        if (counts.first < 0.99 * counts.second) {
          item.pass = false;
          item.detail = "depth " + std::to_string(depth) + ": only " +
                        std::to_string(counts.first) + "/" +
                        std::to_string(counts.second) + " nodes within bound";
        }
      }
    } else {
      item.detail = "skipped (comparison model)";
    }
    items.push_back(std::move(item));
  }

  {  // No query may reach an Unreachable-labelled node.
    CheckItem item{"unreachable_never_routed", true, ""};
    const std::int64_t N = 20000;
    auto check_tree = [&](const auto& tree) {
      const VisitFrequencies vf = estimate_visit_frequencies(
          tree, cfg.dist.sampler(), mix_seed(cfg.seed, 0xDEAD), N);
      for (size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].status == NodeStatus::Terminal &&
            tree.nodes[i].label == kUnreachable && vf.node_visits[i] > 0) {
          item.pass = false;
          item.detail = "node " + std::to_string(i) + " routed " +
                        std::to_string(vf.node_visits[i]) + " times";
        }
      }
    };
    if (built.ltree)
      check_tree(*built.ltree);
    else
      check_tree(*built.btree);
    items.push_back(std::move(item));
  }

  return items;
}

}  // namespace oddson
