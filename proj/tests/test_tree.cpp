#include <doctest.h>

#include "creature_lab/generate.hpp"
#include "creature_lab/tree.hpp"

using namespace cl;

TEST_CASE("build places nodes by level interval") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}});
  CHECK(t.level(0) == 0);
  CHECK(t.level(2) == 1);
  CHECK(t.level(3) == 1);
  CHECK(t.roots() == std::vector<Node>{0});
  CHECK(t.children(0) == std::vector<Node>{2, 3});
  CHECK(t.parent(3) == Node{0});
  CHECK_FALSE(t.parent(0));
  CHECK(t.below(0, 2));
  CHECK_FALSE(t.below(2, 3));
  CHECK_FALSE(t.comparable(2, 3));
  CHECK(t.comparable(2, 2));
}

TEST_CASE("build rejects malformed forests") {
  CHECK_THROWS_AS(AmbientTree::build(2, {{0, 5}}), DomainError);          // level skip
  CHECK_THROWS_AS(AmbientTree::build(2, {{0, 2}, {1, 2}}), DomainError);  // two parents
  CHECK_THROWS_AS(AmbientTree::build(2, {{2, 0}}), DomainError);          // upward edge
  CHECK_THROWS_AS(AmbientTree::build(2, {}, {2}), DomainError);           // orphan above level 0
}

TEST_CASE("single node tree") {
  auto t = AmbientTree::build(2, {}, {0});
  CHECK(t.nodes() == std::vector<Node>{0});
  CHECK(branches_of(t) == std::vector<NodeSet>{{0}});
}

TEST_CASE("branches are maximal chains") {
  CHECK(branches_of(AmbientTree::build(2, {{0, 2}, {0, 3}})) == std::vector<NodeSet>{{0, 2}, {0, 3}});
  CHECK(branches_of(AmbientTree::build(2, {{0, 2}, {2, 4}})) == std::vector<NodeSet>{{0, 2, 4}});
  // A root with no children is a branch of its own.
  CHECK(branches_of(AmbientTree::build(2, {{0, 2}}, {1})) == std::vector<NodeSet>{{0, 2}, {1}});
}

TEST_CASE("initial segments") {
  auto t = AmbientTree::build(2, {{0, 2}, {1, 3}});
  CHECK(initial_segment(t, 0).empty());
  CHECK(initial_segment(t, 1) == NodeSet{0, 1});
  CHECK(initial_segment(t, t.height()) == NodeSet{0, 1, 2, 3});
}

TEST_CASE("random forests: branches against a brute-force chain search") {
  for (Nat seed = 0; seed < 60; ++seed) {
    Rng r = instance_rng(11, seed);
    auto t = random_forest(r, uniform(r, 1, 3), uniform(r, 1, 4), 0.7);
    // Oracle: a maximal chain is the ancestor set of a leaf plus the leaf.
    std::vector<NodeSet> want;
    for (Node x : t.nodes()) {
      bool leaf = std::none_of(t.nodes().begin(), t.nodes().end(), [&](Node y) { return t.below(x, y); });
      if (!leaf) continue;
      NodeSet s{x};
      for (Node y : t.nodes())
        if (t.below(y, x)) s.insert(y);
      want.push_back(s);
    }
    std::sort(want.begin(), want.end());
    auto got = branches_of(t);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
    for (Node x : t.nodes()) {
      CHECK(t.level(x) == x / t.width());
      if (auto p = t.parent(x)) CHECK(t.level(*p) + 1 == t.level(x));
      else CHECK(t.level(x) == 0);
    }
  }
}

TEST_CASE("chain forests") {
  auto t = chain_forest(3, 4);
  CHECK(t.roots().size() == 3);
  CHECK(t.branches().size() == 3);
  CHECK(t.nodes().size() == 12);
  for (const auto& b : t.branches()) CHECK(b.size() == 4);
  auto s = sweep_forests();
  REQUIRE(s.size() == 3);
  for (const auto& f : s) {
    CHECK(f.nodes().size() <= 10);
    CHECK(f.width() <= 3);
  }
}
