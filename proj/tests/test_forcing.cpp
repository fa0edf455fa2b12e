#include <doctest.h>

#include "creature_lab/generate.hpp"
#include "creature_lab/verify.hpp"

using namespace cl;

namespace {

const AmbientTree& chains() {
  static const AmbientTree t = chain_forest(4, 12);
  return t;
}

// Root kind 2 with b0 children, each with b1 children.
Fragment two_level(Nat b0, Nat b1, std::vector<Nat> klabel = {}) {
  FragmentPlan plan;
  plan.depth = 2;
  plan.dom = {4, 16, 40};
  plan.branching = {b0, b1};
  plan.klabel = std::move(klabel);
  return build_fragment(chains(), plan);
}

Fragment one_level(Nat b0) {
  FragmentPlan plan;
  plan.depth = 1;
  plan.dom = {4, 16};
  plan.branching = {b0};
  plan.coverage = Coverage{0, 4, {}};
  return build_fragment(chains(), plan);
}

bool fails(const Report& r, const std::string& clause) {
  return std::any_of(r.checks.begin(), r.checks.end(),
                     [&](const ClauseCheck& c) { return c.clause == clause && !c.ok; });
}

Fragment thinned(const Fragment& p, Nat level, Nat n, Nat seed = 0) {
  for (Nat s = seed; s < seed + 50; ++s) {
    Rng r = instance_rng(77, s);
    Fragment q = thin_above(r, p, level, n, chains(), lab_growth());
    if (!(q == p)) return q;
  }
  FAIL("thin_above never removed a node");
  return p;
}

}  // namespace

TEST_CASE("validate_condition") {
  auto g = lab_growth();
  Fragment single(0, {FNode{SpecFn{}, 0, std::nullopt, 1}});
  CHECK(validate_condition(single, chains(), g).ok());

  Fragment p = two_level(3, 3);
  CHECK(validate_condition(p, chains(), g).ok());
  CHECK(*p.kind(g) == 2);
  CHECK(p.level(1).size() == 3);
  CHECK(p.leaves().size() == 9);

  // Root creature has normhalf 2.
  Fragment high = two_level(3, 3, {5});
  auto rep = validate_condition(high, chains(), g);
  CHECK(fails(rep, "(iv) klabel"));

  // Two compatible siblings whose union is missing.
  SpecFn root{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  std::vector<FNode> ns{{root, 0, std::nullopt, 1}};
  for (Node x : {4, 5}) ns.push_back(FNode{root.with(x, 1), 1, 0, 1});
  Fragment open(1, ns);
  CHECK(fails(validate_condition(open, chains(), g), "(v) closure"));
}

TEST_CASE("leq: identity, transitivity and clause (f)") {
  auto g = lab_growth();
  const auto& t = chains();
  Fragment p = two_level(3, 4);
  auto id = leq(p, p, t, g);
  REQUIRE(id.ok);
  for (std::size_t j = 0; j < p.size(); ++j) CHECK(id.map[j] == j);

  Fragment q = thinned(p, 1, 0);
  Fragment s = thinned(q, 0, 0, 100);
  auto pq = leq(p, q, t, g), qs = leq(q, s, t, g), ps = leq(p, s, t, g);
  REQUIRE(pq.ok);
  REQUIRE(qs.ok);
  REQUIRE(ps.ok);
  for (std::size_t j = 0; j < s.size(); ++j) {
    auto mid = qs.map[j];
    CHECK((mid ? pq.map[*mid] : std::nullopt) == ps.map[j]);
  }
  auto all = all_projections(p, q, g, 3);
  REQUIRE(all.size() == 1);
  CHECK(all.front() == pq.map);

  // The root of q already holds a point that p adds one level up.
  Fragment p1 = one_level(3);
  const SpecFn& r0 = p1.node(p1.root()).fn;
  const SpecFn& c0 = p1.node(p1.children(p1.root()).front()).fn;
  SpecFn rq = r0.with(4, *c0.at(4));
  std::vector<FNode> qn{{rq, 0, std::nullopt, 1}};
  for (Nat j = 0; j < 2; ++j) qn.push_back(FNode{c0.with(16, 100 + j), 1, 0, 1});
  Fragment bad(1, qn);
  auto f = leq(p1, bad, t, g);
  CHECK_FALSE(f.ok);
  CHECK(f.clause == "(f)");
}

TEST_CASE("leq_n") {
  auto g = lab_growth();
  const auto& t = chains();
  Fragment p = two_level(3, 4);
  for (Nat n = 0; n <= 3; ++n) CHECK(leq_n(p, p, n, t, g).ok);

  Fragment low = thinned(p, 0, 0);
  CHECK(leq_n(p, low, 0, t, g).ok);
  auto r = leq_n(p, low, 1, t, g);
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "(iii) level 1");

  Fragment high = thinned(p, 1, 1);
  CHECK(leq_n(p, high, 1, t, g).ok);
  CHECK_FALSE(leq_n(p, high, 2, t, g).ok);
}

TEST_CASE("restrict") {
  auto g = lab_growth();
  Fragment p = two_level(3, 3);
  auto leaf = restrict(p, p.leaves().front());
  CHECK(leaf.size() == 1);
  CHECK(leaf.depth() == 0);

  std::size_t eta = p.level(1).front();
  auto cone = restrict(p, eta);
  CHECK(cone.depth() == 1);
  CHECK(cone.size() == 4);
  CHECK(cone.node(cone.root()).fn == p.node(eta).fn);
  CHECK(validate_condition(cone, chains(), g).ok());
  CHECK(leq(p, cone, chains(), g).ok);
  CHECK(restrict(p, p.root()) == p);
}

TEST_CASE("fuse") {
  auto g = lab_growth();
  const auto& t = chains();
  Fragment p = two_level(3, 4);
  CHECK(fuse({p}, {0}, t, g) == p);

  Fragment q = thinned(p, 1, 1);
  REQUIRE(leq_n(p, q, 1, t, g).ok);
  auto f = fuse({p, q}, {1, 2}, t, g);
  CHECK(validate_condition(f, t, g).ok());
  CHECK(leq_n(p, f, 1, t, g).ok);
  CHECK(leq_n(q, f, 2, t, g).ok);

  CHECK_THROWS_AS(fuse({q, p}, {1, 2}, t, g), PreconditionError);
  CHECK_THROWS_AS(fuse({p, q}, {2, 1}, t, g), PreconditionError);
}

TEST_CASE("classify") {
  auto g = lab_growth();
  Fragment single(0, {FNode{SpecFn{}, 0, std::nullopt, 1}}, Coverage{0, 0, {}});
  auto c = classify(single, chains(), g);
  CHECK(c.smooth);
  CHECK(c.alpha == Nat{0});

  // Root norm lg(2/1) = 1; level-1 creatures with 2 children have norm 0.
  CHECK_FALSE(classify(two_level(3, 2), chains(), g).normal);
  CHECK(classify(two_level(3, 5), chains(), g).normal);

  auto wide = chain_forest(4, 80);
  FragmentPlan plan;
  plan.depth = 1;
  plan.dom = {4, 18};
  plan.branching = {4};
  plan.coverage = Coverage{0, 4, {16, 17}};
  Fragment w = build_fragment(wide, plan);
  REQUIRE(validate_condition(w, wide, g).ok());
  auto cw = classify(w, wide, g);
  CHECK(cw.weakly_smooth);
  CHECK_FALSE(cw.smooth);
}

TEST_CASE("smoothen") {
  auto g = lab_growth();
  Fragment p = one_level(3);
  REQUIRE(classify(p, chains(), g).smooth);
  CHECK(smoothen(p, 4, 0, chains(), g) == p);
  // Filling the whole tree is beyond any norm budget.
  CHECK_THROWS_AS(smoothen(p, 12, 0, chains(), g), DomainError);

  const auto& wide = [] () -> const AmbientTree& {
    static const AmbientTree t = chain_forest(4, 80);
    return t;
  }();
  Nat done = 0;
  for (Nat s = 0; s < 30 && done < 3; ++s) {
    Rng r = instance_rng(31, s);
    auto sc = smoothen_case(r, wide, 1);
    SmoothenStats st;
    Fragment q;
    try {
      q = smoothen(sc.p, sc.alpha, sc.m, wide, g, &st);
    } catch (const DomainError&) {
      continue;
    }
    CHECK(validate_condition(q, wide, g).ok());
    auto cls = classify(q, wide, g);
    CHECK(cls.smooth);
    CHECK(cls.alpha == sc.alpha);
    CHECK(leq_n(sc.p, q, sc.m, wide, g).ok);
    CHECK(st.points_added >= 1);
    ++done;
  }
  CHECK(done == 3);
}

TEST_CASE("fronts and amalgamation") {
  auto g = lab_growth();
  const auto& t = chains();
  Fragment p = two_level(2, 4);
  CHECK(is_front(p, {p.root()}));
  CHECK(is_front(p, p.level(1)));
  CHECK(is_front(p, p.leaves()));
  CHECK_FALSE(is_front(p, {p.level(1).front()}));
  CHECK_FALSE(is_front(p, {p.root(), p.level(1).front()}));

  Fragment q0 = thinned(p, 1, 0);
  CHECK(amalgamate(p, {p.root()}, {q0}, t, g) == q0);

  auto front = p.level(1);
  std::vector<Fragment> same;
  for (std::size_t f : front) same.push_back(restrict(p, f));
  CHECK(amalgamate(p, front, same, t, g) == p);

  std::vector<Fragment> stronger;
  for (std::size_t j = 0; j < front.size(); ++j) stronger.push_back(thinned(restrict(p, front[j]), 0, 0, 10 * j));
  auto r = amalgamate(p, front, stronger, t, g);
  CHECK(validate_condition(r, t, g).ok());
  CHECK(leq(p, r, t, g).ok);
  for (std::size_t j = 0; j < front.size(); ++j) {
    auto at = r.find(p.node(front[j]).fn);
    REQUIRE(at);
    CHECK(restrict(r, *at) == stronger[j]);
  }
  CHECK_THROWS_AS(amalgamate(p, {front.front()}, {stronger.front()}, t, g), PreconditionError);
}

TEST_CASE("node norm") {
  auto g = lab_growth();
  Fragment p = two_level(3, 5);
  auto n = node_norm(p, p.root(), chains(), g);
  CHECK(lg_str(n) == "1.000000");
  auto direct = norms(Creature{p.creature(p.root(), g), 1}, chains(), g);
  CHECK(direct.norm0 == 2);
  CHECK(direct.normstar == 3);
}
