#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "oddson/apps.hpp"
#include "oddson/core.hpp"

using namespace oddson;

namespace {

Sampler uniform_sampler(double lo, double hi) {
  return [lo, hi](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(lo, hi);
    return pt(uni(rng), uni(rng));
  };
}

Backup app_backup(const PostOffice& app) {
  return [&app](const Point& q) {
    const BackupAnswer b = app.backup(q);
    return std::make_pair(b.answer, b.ops);
  };
}

Interference<ConvexRegion> app_oracle(const PostOffice& app) {
  return [&app](const ConvexRegion& r) { return app.interference(r); };
}

}  // namespace

TEST_CASE("config arithmetic") {
  OddsOnConfig cfg;
  cfg.n = 10000;
  cfg.tau = 0.5;
  CHECK(sample_count(cfg) == 100);
  cfg.n = 1;
  cfg.tau = 1.0;
  CHECK(sample_count(cfg) == 1);
  // floor((1/4) log_{4/3} m)
  CHECK(theoretical_depth_cap(4096, 4) == 7);
  CHECK(theoretical_depth_cap(2, 4) == 1);  // floor clamps to the minimum
  // r=2 leaves r/3 <= 1; base falls back to r
  CHECK(theoretical_depth_cap(4096, 2) == 3);
  CHECK(practical_depth_cap(4096, 4) == 6);
  CHECK(practical_depth_cap(1000, 2) == 10);
}

TEST_CASE("single-sample tree over a single-answer problem is one terminal root") {
  const PostOffice app({pt(0, 0)});
  OddsOnConfig cfg;
  cfg.n = 1;
  cfg.tau = 1.0;
  cfg.seed = 1;
  const auto tree = build_tree(cfg, uniform_sampler(-10, 10), app_oracle(app),
                               TwoLineRule{}, ConvexRegion::working_box());
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.root().status == NodeStatus::Terminal);
  CHECK(tree.root().label == 0);
  const QueryStats st = query(tree, pt(123, -456), app_backup(app));
  CHECK_FALSE(st.used_backup);
  CHECK(st.answer == 0);
}

TEST_CASE("concentrated sampler trims the near cell of a two-site instance") {
  const PostOffice app({pt(0, 0), pt(10, 0)});
  OddsOnConfig cfg;
  cfg.n = 100;
  cfg.tau = 0.5;
  cfg.seed = 7;
  cfg.depth_cap = 3;
  const Sampler near = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-0.1, 0.1);
    return pt(1 + uni(rng), uni(rng));
  };
  const auto tree = build_tree(cfg, near, app_oracle(app), TwoLineRule{},
                               ConvexRegion::working_box());
  CHECK(tree.m == 10);
  // Querying at the sampler's center must resolve to site 0 without backup:
  // the covering cell lies strictly left of the bisector x=5.
  const QueryStats st = query(tree, pt(1, 0), app_backup(app));
  CHECK(st.answer == 0);
  CHECK_FALSE(st.used_backup);
  REQUIRE(st.leaf >= 0);
  CHECK(tree.nodes[st.leaf].status == NodeStatus::Terminal);
  for (const Point& v : tree.nodes[st.leaf].poly.vertices()) CHECK(v[0] < 5.0);
}

TEST_CASE("routing") {
  const PostOffice app({pt(-100, 0), pt(100, 0), pt(0, 100), pt(0, -100)});
  OddsOnConfig cfg;
  cfg.n = 4096;
  cfg.tau = 0.5;
  cfg.seed = 3;
  cfg.depth_cap = 4;
  const auto tree = build_tree(cfg, uniform_sampler(-200, 200), app_oracle(app),
                               TwoLineRule{}, ConvexRegion::working_box());

  SUBCASE("route_child matches a first-containing scan") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-200, 200);
    for (int i = 0; i < 10000; ++i) {
      const Point q = pt(uni(rng), uni(rng));
      int cur = 0;
      while (tree.nodes[cur].status == NodeStatus::Internal) {
        const int pos = route_child(tree, cur, q);
        REQUIRE(pos >= 0);
        int expect = -1;
        for (size_t c = 0; c < tree.nodes[cur].children.size(); ++c) {
          if (tree.nodes[tree.nodes[cur].children[c]].delta.contains(q)) {
            expect = static_cast<int>(c);
            break;
          }
        }
        CHECK(pos == expect);
        cur = tree.nodes[cur].children[pos];
      }
    }
  }

  SUBCASE("path length equals leaf depth plus one") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-300, 300);
    for (int i = 0; i < 5000; ++i) {
      const Point q = pt(uni(rng), uni(rng));
      const QueryStats st = route(tree, q);
      REQUIRE(st.leaf >= 0);
      CHECK(st.nodes_visited == tree.nodes[st.leaf].depth + 1);
    }
  }

  SUBCASE("query outside the working box goes straight to backup") {
    const QueryStats st =
        query(tree, pt(kWorkingBoxHalf * 2, 0), app_backup(app));
    CHECK(st.nodes_visited == 1);
    CHECK(st.used_backup);
    CHECK(st.answer == app.scan(pt(kWorkingBoxHalf * 2, 0)));
  }

  SUBCASE("answers match the scan oracle end to end") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(-250, 250);
    for (int i = 0; i < 10000; ++i) {
      const Point q = pt(uni(rng), uni(rng));
      CHECK(query(tree, q, app_backup(app)).answer == app.scan(q));
    }
  }

  SUBCASE("child polys nest inside parent polys") {
    std::mt19937_64 rng(29);
    for (size_t i = 1; i < tree.nodes.size(); ++i) {
      const auto& node = tree.nodes[i];
      if (node.poly.empty() || node.poly.vertices().size() < 3) continue;
      const auto& parent = tree.nodes[node.parent];
      for (int s = 0; s < 100; ++s)
        CHECK(parent.poly.contains(sample_point(node.poly, rng)));
    }
  }

  SUBCASE("terminal labels are sound under sampling") {
    std::mt19937_64 rng(31);
    for (const auto& node : tree.nodes) {
      if (node.status != NodeStatus::Terminal || node.label == kUnreachable)
        continue;
      for (int s = 0; s < 100; ++s)
        CHECK(app.scan(sample_point(node.poly, rng)) == node.label);
    }
  }
}

TEST_CASE("visit frequency estimation") {
  SUBCASE("single-node tree concentrates all mass at the root") {
    const PostOffice app({pt(0, 0)});
    OddsOnConfig cfg;
    cfg.n = 1;
    cfg.seed = 5;
    const auto tree = build_tree(cfg, uniform_sampler(-1, 1), app_oracle(app),
                                 TwoLineRule{}, ConvexRegion::working_box());
    const VisitFrequencies vf =
        estimate_visit_frequencies(tree, uniform_sampler(-1, 1), 5, 1000);
    CHECK(vf.node_visits[0] == 1000);
    CHECK(vf.leaf_hits[0] == 1000);
    CHECK(vf.outside == 0);
  }

  SUBCASE("two symmetric frontier leaves split the mass evenly") {
    // Hand-built comparison tree: root splits on x at 0.
    OddsOnTree<BoxRegion> tree;
    tree.arity = 2;
    Node<BoxRegion> root;
    root.delta = BoxRegion::cube(2, kWorkingBoxHalf);
    root.poly = root.delta;
    root.status = NodeStatus::Internal;
    root.children = {1, 2};
    tree.nodes.push_back(root);
    for (int side = 0; side < 2; ++side) {
      Node<BoxRegion> leaf;
      leaf.delta = BoxRegion::half(2, 0, side == 1, 0.0);
      leaf.poly = root.delta.intersect(leaf.delta);
      leaf.status = NodeStatus::Frontier;
      leaf.parent = 0;
      leaf.depth = 1;
      tree.nodes.push_back(leaf);
    }
    const VisitFrequencies vf =
        estimate_visit_frequencies(tree, uniform_sampler(-1, 1), 42, 10000);
    CHECK(std::abs(vf.leaf_hits[1] / 10000.0 - 0.5) < 0.02);
    CHECK(std::abs(vf.leaf_hits[2] / 10000.0 - 0.5) < 0.02);
    CHECK(vf.leaf_hits[1] + vf.leaf_hits[2] == 10000);
  }
}

TEST_CASE("leaf entropy") {
  CHECK(leaf_entropy({0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(leaf_entropy({1.0}) == doctest::Approx(0.0));
  CHECK(leaf_entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0));
  CHECK(leaf_entropy({0.2, 0.2}) == doctest::Approx(1.0));  // renormalized
  CHECK_THROWS_AS(leaf_entropy({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(leaf_entropy({-0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("serialization round trip") {
  const PostOffice app({pt(-50, -50), pt(50, 50), pt(-50, 50)});
  OddsOnConfig cfg;
  cfg.n = 1000;
  cfg.tau = 0.7;
  cfg.seed = 99;
  cfg.depth_cap = 3;
  const auto tree = build_tree(cfg, uniform_sampler(-100, 100), app_oracle(app),
                               TwoLineRule{}, ConvexRegion::working_box());
  const nlohmann::json j = tree_to_json(tree);
  const auto restored = tree_from_json<ConvexRegion>(j);

  CHECK(tree_to_json(restored).dump() == j.dump());  // byte-identical re-dump
  REQUIRE(restored.nodes.size() == tree.nodes.size());
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    CHECK(restored.nodes[i].status == tree.nodes[i].status);
    CHECK(restored.nodes[i].label == tree.nodes[i].label);
    CHECK(restored.nodes[i].children == tree.nodes[i].children);
    // Region coefficients are lossless at double precision.
    REQUIRE(restored.nodes[i].delta.constraints().size() ==
            tree.nodes[i].delta.constraints().size());
    for (size_t c = 0; c < tree.nodes[i].delta.constraints().size(); ++c) {
      CHECK(restored.nodes[i].delta.constraints()[c].nx ==
            tree.nodes[i].delta.constraints()[c].nx);
      CHECK(restored.nodes[i].delta.constraints()[c].c ==
            tree.nodes[i].delta.constraints()[c].c);
    }
  }

  SUBCASE("model and version are enforced") {
    CHECK_THROWS_AS(tree_from_json<BoxRegion>(j), std::invalid_argument);
    nlohmann::json bad = j;
    bad["format_version"] = 2;
    CHECK_THROWS_AS(tree_from_json<ConvexRegion>(bad), std::invalid_argument);
  }
}

TEST_CASE("rebuilding with the same seed is byte-identical") {
  const PostOffice app({pt(0, 0), pt(30, 40), pt(-20, 10)});
  OddsOnConfig cfg;
  cfg.n = 2000;
  cfg.tau = 0.6;
  cfg.seed = 2718;
  const auto t1 = build_tree(cfg, uniform_sampler(-60, 60), app_oracle(app),
                             TwoLineRule{}, ConvexRegion::working_box());
  const auto t2 = build_tree(cfg, uniform_sampler(-60, 60), app_oracle(app),
                             TwoLineRule{}, ConvexRegion::working_box());
  CHECK(tree_to_json(t1).dump() == tree_to_json(t2).dump());
}

TEST_CASE("node count respects the arity bound") {
  const PostOffice app({pt(0, 0), pt(10, 0), pt(0, 10)});
  OddsOnConfig cfg;
  cfg.n = 10000;
  cfg.tau = 0.5;
  cfg.seed = 12;
  cfg.depth_cap = 3;
  const auto tree = build_tree(cfg, uniform_sampler(-20, 20), app_oracle(app),
                               TwoLineRule{}, ConvexRegion::working_box());
  CHECK(tree.m == 100);
  const int k = tree.depth_cap;
  const int bound = (static_cast<int>(std::pow(4, k + 1)) - 1) / 3;
  CHECK(static_cast<int>(tree.nodes.size()) <= bound);
  // Each interference call handles one simplex of some poly; a poly with V
  // vertices fans into V-2 triangles, and every poly here has few vertices.
  CHECK(tree.interference_calls <= static_cast<std::int64_t>(tree.nodes.size()) * 16);
}
