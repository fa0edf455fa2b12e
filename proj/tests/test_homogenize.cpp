#include <doctest.h>

#include "creature_lab/generate.hpp"
#include "creature_lab/homogenize.hpp"

using namespace cl;

namespace {

const AmbientTree& chains() {
  static const AmbientTree t = chain_forest(4, 12);
  return t;
}

Fragment two_level(Nat b0, Nat b1) {
  FragmentPlan plan;
  plan.depth = 2;
  plan.dom = {4, 16, 40};
  plan.branching = {b0, b1};
  return build_fragment(chains(), plan);
}

// Cone of a front node either lies in X from some level on, or misses X.
void check_front(const PurifyResult& r, const std::set<SpecFn>& x) {
  const Fragment& q = r.q;
  std::vector<std::size_t> front;
  for (const auto& c : r.front) front.push_back(c.node);
  CHECK(is_front(q, front));
  for (const auto& c : r.front)
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (!q.tree_leq(c.node, j)) continue;
      bool in = x.count(q.node(j).fn) > 0;
      if (!c.level_in_x) CHECK_FALSE(in);
      else if (q.node(j).level >= *c.level_in_x) CHECK(in);
    }
}

LeafLabeling by_cone(const Fragment& p, bool split) {
  LeafLabeling lab;
  auto tops = p.level(1);
  for (std::size_t leaf : p.leaves())
    lab[p.node(leaf).fn] = split && p.tree_leq(tops.front(), leaf) ? 1 : 0;
  return lab;
}

}  // namespace

TEST_CASE("purify at the extremes") {
  auto g = lab_growth();
  Fragment p = two_level(3, 5);

  auto none = purify(p, {}, 0, chains(), g);
  CHECK(none.q == p);
  CHECK(none.changed.empty());
  CHECK(none.leq_kstar);
  REQUIRE(none.front.size() == 1);
  CHECK_FALSE(none.front.front().level_in_x);

  std::set<SpecFn> all;
  for (std::size_t k = 0; k < p.size(); ++k) all.insert(p.node(k).fn);
  auto every = purify(p, all, 0, chains(), g);
  CHECK(every.q == p);
  REQUIRE(every.front.size() == 1);
  CHECK(every.front.front().level_in_x == Nat{0});
  check_front(every, all);
}

TEST_CASE("purify drops a lone leaf in X") {
  auto g = lab_growth();
  Fragment p = two_level(3, 5);
  std::size_t leaf = p.leaves().front();
  std::set<SpecFn> x{p.node(leaf).fn};
  auto r = purify(p, x, 0, chains(), g);
  CHECK(validate_condition(r.q, chains(), g).ok());
  CHECK(r.leq_kstar);
  CHECK_FALSE(r.q.find(p.node(leaf).fn));
  CHECK(r.q.size() + 1 == p.size());
  REQUIRE(r.changed.size() == 1);
  CHECK(r.q.node(r.changed.front()).fn == p.node(*p.node(leaf).parent).fn);
  check_front(r, x);
}

TEST_CASE("purify preconditions") {
  auto g = lab_growth();
  Fragment p = two_level(3, 5);
  // The root alone is not upward closed.
  CHECK_THROWS_AS(purify(p, {p.node(p.root()).fn}, 0, chains(), g), PreconditionError);
  CHECK_THROWS_AS(purify(p, {SpecFn{{47, 0}}}, 0, chains(), g), PreconditionError);
}

TEST_CASE("halve_below") {
  auto g = lab_growth();
  Fragment p = two_level(3, 5);
  CHECK(halve_below(p, 0, chains(), g) == p);
  // Root normhalf 2 with k = 1 leaves nothing strictly between.
  CHECK_THROWS_AS(halve_below(p, 1, chains(), g), DomainError);

  FragmentPlan plan;
  plan.depth = 1;
  plan.dom = {16, 40};
  plan.branching = {5};
  Fragment w = build_fragment(chains(), plan);
  REQUIRE(validate_condition(w, chains(), g).ok());
  Fragment h = halve_below(w, 1, chains(), g);
  CHECK(validate_condition(h, chains(), g).ok());
  Nat k = h.node(h.root()).klabel;
  CHECK(k > 1);
  CHECK(k < 4);
  auto before = node_norm(w, w.root(), chains(), g), after = node_norm(h, h.root(), chains(), g);
  CHECK(lg_geq(after, before, -1));
  CHECK(lg_geq_int(before, 1));
}

TEST_CASE("decide") {
  auto g = lab_growth();
  Fragment p = two_level(2, 2);
  REQUIRE(validate_condition(p, chains(), g).ok());

  auto flat = by_cone(p, false);
  auto c = decide(p, flat, 0, chains(), g);
  REQUIRE(c.found);
  CHECK(c.level == 0);
  CHECK(c.q == p);
  CHECK(decide_oracle(p, flat, 0, chains(), g) == Nat{0});

  // Dropping a root successor kills the root creature, so level 0 is out of reach.
  auto split = by_cone(p, true);
  auto d = decide(p, split, 0, chains(), g);
  REQUIRE(d.found);
  CHECK(d.level == 1);
  CHECK(d.q == p);
  CHECK(decides_at(d.q, split, 1));
  CHECK_FALSE(decides_at(p, split, 0));
  CHECK(d.values.size() == 2);
  CHECK(decide_oracle(p, split, 0, chains(), g) == Nat{1});

  LeafLabeling missing = split;
  missing.erase(missing.begin());
  CHECK_THROWS_AS(decide(p, missing, 0, chains(), g), DomainError);
}

TEST_CASE("decide agrees with the oracle on random plans") {
  auto g = lab_growth();
  Nat found = 0;
  for (Nat s = 0; s < 25; ++s) {
    Rng r = instance_rng(41, s);
    Fragment p = build_fragment(chains(), random_plan(r, chains(), 2, 3, 1));
    LeafLabeling lab;
    for (std::size_t leaf : p.leaves()) lab[p.node(leaf).fn] = uniform(r, 0, 1);
    auto d = decide(p, lab, 0, chains(), g);
    auto o = decide_oracle(p, lab, 0, chains(), g);
    CHECK(d.found == o.has_value());
    if (d.found) {
      CHECK(d.level == *o);
      CHECK(leq_n(p, d.q, 0, chains(), g).ok);
      ++found;
    }
  }
  CHECK(found > 0);
}
