#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oddson/geometry.hpp"
#include "oddson/partition.hpp"

namespace oddson {

// Opaque comparable answer value; apps map their answer domains onto it.
using Answer = std::int64_t;

// Sentinel for nodes whose routing region is empty; a query must never reach
// one.
inline constexpr Answer kUnreachable = std::numeric_limits<Answer>::min();

using Sampler = std::function<Point(std::mt19937_64&)>;
// Returns the answer plus the number of elementary operations spent.
using Backup = std::function<std::pair<Answer, std::int64_t>(const Point&)>;
// Engaged optional = Uniform(answer); nullopt = Mixed.
template <class RegionT>
using Interference = std::function<std::optional<Answer>(const RegionT&)>;

struct OddsOnConfig {
  std::int64_t n = 1;
  double tau = 0.5;
  std::optional<int> depth_cap;  // overrides the default when set
  int min_samples = 1;
  std::uint64_t seed = 0;
};

inline int sample_count(const OddsOnConfig& cfg) {
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(std::pow(double(cfg.n), cfg.tau))));
}

// Lemma-style cap floor((1/4) log_{r/3} m); for arities where r/3 <= 1 the
// base falls back to r.
inline int theoretical_depth_cap(int m, int r) {
  const double base = r / 3.0 > 1.0 ? r / 3.0 : double(r);
  return std::max(1, static_cast<int>(std::floor(0.25 * std::log(double(m)) /
                                                 std::log(base))));
}

inline int practical_depth_cap(int m, int r) {
  return std::max(1,
                  static_cast<int>(std::ceil(std::log(double(m)) / std::log(double(r)))));
}

enum class NodeStatus { Internal, Terminal, Frontier };

template <class RegionT>
struct Node {
  RegionT delta;  // region handed down by the parent's split
  RegionT poly;   // delta intersected with all ancestor deltas
  NodeStatus status = NodeStatus::Frontier;
  Answer label = 0;  // valid for Terminal
  int parent = -1;
  int depth = 0;
  std::vector<int> children;  // in routing order
};

template <class RegionT>
struct OddsOnTree {
  std::vector<Node<RegionT>> nodes;  // preorder; nodes[0] is the root
  int arity = 0;
  int m = 0;
  int depth_cap = 0;
  std::uint64_t seed = 0;
  std::int64_t interference_calls = 0;

  const Node<RegionT>& root() const { return nodes.front(); }
};

namespace detail {

inline bool points_equal(const Point& a, const Point& b) { return a == b; }

// Classify a polytope region by decomposing it into simplices and combining
// the per-simplex verdicts.
inline std::optional<Answer> classify_region(const ConvexRegion& poly,
                                             const Interference<ConvexRegion>& oracle,
                                             std::int64_t* calls) {
  if (poly.vertices().size() < 3) return std::nullopt;  // degenerate: stay mixed
  std::optional<Answer> combined;
  for (const auto& t : poly.triangulate()) {
    ++*calls;
    auto v = oracle(ConvexRegion::from_ccw_vertices({t[0], t[1], t[2]}));
    if (!v) return std::nullopt;
    if (*v == kUnreachable) continue;  // zero-area sliver
    if (combined && *combined != *v) return std::nullopt;
    combined = v;
  }
  return combined;
}

inline std::optional<Answer> classify_region(const BoxRegion& poly,
                                             const Interference<BoxRegion>& oracle,
                                             std::int64_t* calls) {
  ++*calls;
  return oracle(poly);
}

}  // namespace detail

template <class Rule>
OddsOnTree<typename Rule::Region> build_tree(
    const OddsOnConfig& cfg, const Sampler& sampler,
    const Interference<typename Rule::Region>& oracle, const Rule& rule,
    const typename Rule::Region& root_region) {
  using RegionT = typename Rule::Region;

  OddsOnTree<RegionT> tree;
  tree.arity = Rule::arity;
  tree.seed = cfg.seed;
  tree.m = sample_count(cfg);
  tree.depth_cap =
      cfg.depth_cap ? *cfg.depth_cap : theoretical_depth_cap(tree.m, Rule::arity);

  std::mt19937_64 rng(cfg.seed);
  std::vector<Point> sample;
  sample.reserve(tree.m);
  for (int i = 0; i < tree.m; ++i) sample.push_back(sampler(rng));

  // Depth-first construction with top-down trimming: a node certified
  // answer-uniform becomes terminal and its subtree is never built.
  struct Frame {
    RegionT delta;
    std::vector<Point> pts;
    int parent;
    int depth;
  };

  std::function<void(Frame&&)> grow = [&](Frame&& f) {
    const int id = static_cast<int>(tree.nodes.size());
    Node<RegionT> node;
    node.delta = f.delta;
    node.parent = f.parent;
    node.depth = f.depth;
    node.poly = f.parent < 0 ? f.delta : tree.nodes[f.parent].poly.intersect(f.delta);
    if (f.parent >= 0) tree.nodes[f.parent].children.push_back(id);
    tree.nodes.push_back(std::move(node));

    if (tree.nodes[id].poly.empty()) {
      tree.nodes[id].status = NodeStatus::Terminal;
      tree.nodes[id].label = kUnreachable;
      return;
    }

    if (auto verdict = detail::classify_region(tree.nodes[id].poly, oracle,
                                               &tree.interference_calls)) {
      tree.nodes[id].status = NodeStatus::Terminal;
      tree.nodes[id].label = *verdict;
      return;
    }

    const bool all_same =
        std::all_of(f.pts.begin(), f.pts.end(),
                    [&](const Point& p) { return detail::points_equal(p, f.pts[0]); });
    if (f.depth >= tree.depth_cap ||
        static_cast<int>(f.pts.size()) <= cfg.min_samples || all_same) {
      tree.nodes[id].status = NodeStatus::Frontier;
      return;
    }

    tree.nodes[id].status = NodeStatus::Internal;
    SplitOutcome<RegionT> split = rule(f.pts, f.depth);
    for (size_t i = 0; i < split.regions.size(); ++i) {
      std::vector<Point> child_pts;
      child_pts.reserve(split.assigned[i].size());
      for (int idx : split.assigned[i]) child_pts.push_back(f.pts[idx]);
      grow(Frame{std::move(split.regions[i]), std::move(child_pts), id, f.depth + 1});
    }
  };

  grow(Frame{root_region, std::move(sample), -1, 0});
  return tree;
}

struct QueryStats {
  int nodes_visited = 0;
  bool used_backup = false;
  bool hit_unreachable = false;
  std::int64_t backup_ops = 0;
  int leaf = -1;  // node index where routing stopped, -1 if outside the box
  Answer answer = 0;
};

// Routing only; leaf and visit count, no backup call.
template <class RegionT>
QueryStats route(const OddsOnTree<RegionT>& tree, const Point& q) {
  QueryStats st;
  if (!tree.root().delta.contains(q)) {
    st.nodes_visited = 1;
    st.used_backup = true;
    return st;
  }
  int cur = 0;
  for (;;) {
    ++st.nodes_visited;
    const Node<RegionT>& node = tree.nodes[cur];
    if (node.status != NodeStatus::Internal) {
      st.leaf = cur;
      return st;
    }
    int next = -1;
    for (int child : node.children) {
      if (tree.nodes[child].delta.contains(q)) {
        next = child;
        break;
      }
    }
    if (next < 0) {  // numerical gap; treat as frontier
      st.leaf = cur;
      st.used_backup = true;
      return st;
    }
    cur = next;
  }
}

// First child of an internal node whose delta contains q.
template <class RegionT>
int route_child(const OddsOnTree<RegionT>& tree, int node, const Point& q) {
  const auto& children = tree.nodes[node].children;
  for (size_t i = 0; i < children.size(); ++i)
    if (tree.nodes[children[i]].delta.contains(q)) return static_cast<int>(i);
  return -1;
}

template <class RegionT>
QueryStats query(const OddsOnTree<RegionT>& tree, const Point& q, const Backup& backup) {
  QueryStats st = route(tree, q);
  if (st.leaf >= 0 && !st.used_backup) {
    const Node<RegionT>& leaf = tree.nodes[st.leaf];
    if (leaf.status == NodeStatus::Terminal) {
      if (leaf.label == kUnreachable) {
        st.hit_unreachable = true;
      } else {
        st.answer = leaf.label;
        return st;
      }
    }
  }
  st.used_backup = true;
  auto [ans, ops] = backup(q);
  st.answer = ans;
  st.backup_ops = ops;
  return st;
}

struct VisitFrequencies {
  std::vector<std::int64_t> node_visits;  // path visits per node
  std::vector<std::int64_t> leaf_hits;    // routing endpoints per node
  std::int64_t outside = 0;
  std::int64_t total = 0;
};

template <class RegionT>
VisitFrequencies estimate_visit_frequencies(const OddsOnTree<RegionT>& tree,
                                            const Sampler& sampler, std::uint64_t seed,
                                            std::int64_t n_draws) {
  VisitFrequencies vf;
  vf.node_visits.assign(tree.nodes.size(), 0);
  vf.leaf_hits.assign(tree.nodes.size(), 0);
  vf.total = n_draws;
  std::mt19937_64 rng(seed);
  for (std::int64_t i = 0; i < n_draws; ++i) {
    const Point q = sampler(rng);
    if (!tree.root().delta.contains(q)) {
      ++vf.outside;
      continue;
    }
    int cur = 0;
    for (;;) {
      ++vf.node_visits[cur];
      const Node<RegionT>& node = tree.nodes[cur];
      if (node.status != NodeStatus::Internal) {
        ++vf.leaf_hits[cur];
        break;
      }
      int next = -1;
      for (int child : node.children)
        if (tree.nodes[child].delta.contains(q)) {
          next = child;
          break;
        }
      if (next < 0) {
        ++vf.leaf_hits[cur];
        break;
      }
      cur = next;
    }
  }
  return vf;
}

// Shannon entropy in bits of a sub-probability vector, renormalized to sum 1.
inline double leaf_entropy(const std::vector<double>& probabilities) {
  double total = 0;
  for (double p : probabilities) {
    if (p < 0) throw std::invalid_argument("negative probability");
    total += p;
  }
  if (total <= 0) throw std::invalid_argument("leaf_entropy: all-zero input");
  double h = 0;
  for (double p : probabilities) {
    if (p <= 0) continue;
    const double q = p / total;
    h -= q * std::log2(q);
  }
  return h;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json region_to_json(const ConvexRegion& r) {
  nlohmann::json hs = nlohmann::json::array();
  for (const HalfPlane& h : r.constraints())
    hs.push_back({fmt_double(h.nx), fmt_double(h.ny), fmt_double(h.c)});
  return nlohmann::json{{"halfplanes", hs}};
}

inline nlohmann::json region_to_json(const BoxRegion& r) {
  nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array();
  for (double v : r.lo()) lo.push_back(fmt_double(v));
  for (double v : r.hi()) hi.push_back(fmt_double(v));
  return nlohmann::json{{"lo", lo}, {"hi", hi}};
}

inline void region_from_json(const nlohmann::json& j, ConvexRegion* out) {
  std::vector<HalfPlane> hs;
  for (const auto& e : j.at("halfplanes")) {
    HalfPlane h;
    h.nx = parse_double(e.at(0).get<std::string>());
    h.ny = parse_double(e.at(1).get<std::string>());
    h.c = parse_double(e.at(2).get<std::string>());
    hs.push_back(h);
  }
  *out = ConvexRegion(std::move(hs));
}

inline void region_from_json(const nlohmann::json& j, BoxRegion* out) {
  std::vector<double> lo, hi;
  for (const auto& e : j.at("lo")) lo.push_back(parse_double(e.get<std::string>()));
  for (const auto& e : j.at("hi")) hi.push_back(parse_double(e.get<std::string>()));
  *out = BoxRegion(std::move(lo), std::move(hi));
}

template <class RegionT>
const char* model_name();
template <>
inline const char* model_name<ConvexRegion>() {
  return "linear2d";
}
template <>
inline const char* model_name<BoxRegion>() {
  return "comparison";
}

template <class RegionT>
nlohmann::json tree_to_json(const OddsOnTree<RegionT>& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node<RegionT>& n : tree.nodes) {
    nlohmann::json jn;
    jn["parent"] = n.parent;
    jn["depth"] = n.depth;
    jn["status"] = n.status == NodeStatus::Internal
                       ? "internal"
                       : (n.status == NodeStatus::Terminal ? "terminal" : "frontier");
    if (n.status == NodeStatus::Terminal) jn["label"] = n.label;
    jn["delta"] = region_to_json(n.delta);
    nodes.push_back(std::move(jn));
  }
  return nlohmann::json{{"format_version", 1},
                        {"model", model_name<RegionT>()},
                        {"arity", tree.arity},
                        {"m", tree.m},
                        {"depth_cap", tree.depth_cap},
                        {"seed", tree.seed},
                        {"interference_calls", tree.interference_calls},
                        {"nodes", nodes}};
}

template <class RegionT>
OddsOnTree<RegionT> tree_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1)
    throw std::invalid_argument("unsupported tree format version");
  if (j.at("model").get<std::string>() != model_name<RegionT>())
    throw std::invalid_argument("tree model mismatch");
  OddsOnTree<RegionT> tree;
  tree.arity = j.at("arity").get<int>();
  tree.m = j.at("m").get<int>();
  tree.depth_cap = j.at("depth_cap").get<int>();
  tree.seed = j.at("seed").get<std::uint64_t>();
  tree.interference_calls = j.at("interference_calls").get<std::int64_t>();
  for (const auto& jn : j.at("nodes")) {
    Node<RegionT> n;
    n.parent = jn.at("parent").get<int>();
    n.depth = jn.at("depth").get<int>();
    const std::string st = jn.at("status").get<std::string>();
    n.status = st == "internal"
                   ? NodeStatus::Internal
                   : (st == "terminal" ? NodeStatus::Terminal : NodeStatus::Frontier);
    if (n.status == NodeStatus::Terminal) n.label = jn.at("label").get<Answer>();
    region_from_json(jn.at("delta"), &n.delta);
    const int id = static_cast<int>(tree.nodes.size());
    n.poly = n.parent < 0 ? n.delta : tree.nodes[n.parent].poly.intersect(n.delta);
    if (n.parent >= 0) tree.nodes[n.parent].children.push_back(id);
    tree.nodes.push_back(std::move(n));
  }
  return tree;
}

}  // namespace oddson
