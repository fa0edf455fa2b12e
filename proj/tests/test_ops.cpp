#include <doctest.h>

#include "creature_lab/generate.hpp"
#include "creature_lab/verify.hpp"

using namespace cl;

namespace {

SimpleCreature worked() {
  return make_simple(1, SpecFn{{0, 0}},
                     {SpecFn{{0, 0}, {2, 1}}, SpecFn{{0, 0}, {2, 2}}, SpecFn{{0, 0}, {3, 1}},
                      SpecFn{{0, 0}, {3, 2}}});
}

// Root 0 with children 4..7, a spare root 1, and 8 below 4.
AmbientTree fan4() { return AmbientTree::build(4, {{0, 4}, {0, 5}, {0, 6}, {0, 7}, {4, 8}}, {1}); }

bool precondition_fails(const std::function<void()>& f, const std::string& clause) {
  try {
    f();
  } catch (const PreconditionError& e) {
    return std::string(e.what()).find("clause " + clause) == 0;
  }
  return false;
}

}  // namespace

TEST_CASE("glue with identity extensions") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}});
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {2, 1}}, SpecFn{{0, 0}, {3, 1}}});
  REQUIRE(norm0(c, t, g) == 1);
  std::vector<std::vector<SpecFn>> ext{{c.val[0], c.val[0]}, {c.val[1], c.val[1]}};
  auto res = glue(c, ext, 2, t, g);
  CHECK(res.d.val == c.val);
  CHECK(norm0(res.d, t, g) == norm0(c, t, g));
  CHECK(norm0(res.d, t, g) >= res.m0);
}

TEST_CASE("glue with fresh incomparable points") {
  auto t = fan4();
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {4, 1}}, SpecFn{{0, 0}, {5, 1}}});
  REQUIRE(validate_creature(c, g, t).ok());
  std::vector<std::vector<SpecFn>> ext;
  for (const auto& eta : c.val) ext.push_back({eta.with(6, 1), eta.with(7, 1)});
  auto res = glue(c, ext, 2, t, g);
  CHECK(res.ell_star == 4);
  CHECK(res.m0 == std::min<Nat>(norm0(c, t, g), 1));
  CHECK(validate_creature(res.d, g, t).ok());
  Nat n = oracle_norm0(res.d, t, g);
  CHECK(n == norm0(res.d, t, g));
  CHECK(n >= res.m0);
}

TEST_CASE("glue rejects comparable new points across counters") {
  auto t = fan4();
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {5, 1}}, SpecFn{{0, 0}, {6, 1}}});
  std::vector<std::vector<SpecFn>> ext;
  for (const auto& eta : c.val) ext.push_back({eta.with(4, 1), eta.with(8, 2)});
  CHECK(precondition_fails([&] { glue(c, ext, 2, t, g); }, "(e)"));
  CHECK(precondition_fails([&] { glue(c, ext, 1, t, g); }, "(c)"));
}

TEST_CASE("glue bound fails at the ceiling edge") {
  // l* = 7 gives ceil lg(8/7) = 1, but the 6-point extensions fail (beta) already at k = 1
  // and the small ones are all hit by one value on one branch.
  auto t = AmbientTree::build(8, {{0, 8}, {0, 9}, {0, 10}, {0, 11}, {0, 12}, {0, 13}});
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {8, 1}}, SpecFn{{0, 0}, {9, 1}}});
  REQUIRE(norm0(c, t, g) == 1);
  std::vector<std::vector<SpecFn>> ext;
  for (const auto& eta : c.val) {
    SpecFn small = eta.defined(8) ? eta.with(9, 1) : eta.with(8, 1);
    ext.push_back({small, eta.with(10, 2).with(11, 2).with(12, 2).with(13, 2)});
  }
  auto res = glue(c, ext, 2, t, g);
  CHECK(res.ell_star == 7);
  CHECK(res.m0 == 1);
  CHECK(validate_creature(res.d, g, t).ok());
  CHECK(oracle_norm0(res.d, t, g) == 0);
  CHECK(norm0(res.d, t, g) == 0);
}

TEST_CASE("fill") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}}, {1});
  auto g = toy_growth();
  auto c = worked();
  auto res = fill(c, {1}, t, g);
  CHECK(res.k == 1);
  CHECK(res.m == 1);
  for (const auto& nu : res.d.val) CHECK(nu.defined(1));
  CHECK(norm0(res.d, t, g) + res.m >= res.k);
  // m = k with no room for a spare value: one value tuple, so every output agrees at x.
  CHECK(res.pool.size() == res.k);
  CHECK(validate_creature(res.d, g, t).first_failure() == "(d)");

  CHECK(precondition_fails([&] { fill(c, {1, 2}, t, g); }, "(c)"));
}

TEST_CASE("fill takes a spare value when there is room") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}}, {1});
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {2, 1}}, SpecFn{{0, 0}, {3, 1}}});
  REQUIRE(norm0(c, t, g) == 1);
  auto res = fill(c, {1}, t, g);
  CHECK(res.pool.size() == 2);
  CHECK(validate_creature(res.d, g, t).ok());
  for (const auto& nu : res.d.val) CHECK(nu.defined(1));
  CHECK(oracle_norm0(res.d, t, g) + res.m >= res.k);
}

TEST_CASE("fill avoids base values on the chain through x") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}, {2, 4}});
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {3, 1}}, SpecFn{{0, 0}, {3, 2}}});
  REQUIRE(norm0(c, t, g) == 1);
  auto res = fill(c, {4}, t, g);
  CHECK(res.pool == std::vector<Nat>{1, 2});
  for (const auto& tup : res.tuples)
    for (Nat z : tup) CHECK(z != 0);
  CHECK(validate_creature(res.d, g, t).ok());
}

TEST_CASE("rebase") {
  auto t = fan4();
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}},
                       {SpecFn{{0, 0}, {4, 1}}, SpecFn{{0, 0}, {4, 2}}, SpecFn{{0, 0}, {4, 3}}});
  REQUIRE(norm0(c, t, g) == 2);

  auto same = rebase(c, c.base, t, g);
  CHECK(same.d == c);
  CHECK(same.ell1 == 0);
  CHECK(same.ell2 == 0);

  auto res = rebase(c, SpecFn{{0, 0}, {1, 0}}, t, g);
  CHECK(res.ell1 == 0);
  CHECK(res.ell2 == 1);
  CHECK(res.bound == 1);
  CHECK(validate_creature(res.d, g, t).ok());
  CHECK(res.d.base == (SpecFn{{0, 0}, {1, 0}}));
  Nat n = oracle_norm0(res.d, t, g);
  CHECK(n == norm0(res.d, t, g));
  CHECK(n >= res.bound);
  CHECK(normstar(res.d, g) == normstar(c, g));
}

TEST_CASE("rebase premises") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}}, {1});
  auto g = toy_growth();
  auto c = worked();
  // One new point already costs the whole norm.
  CHECK(precondition_fails([&] { rebase(c, SpecFn{{0, 0}, {1, 0}}, t, g); }, "(d)"));
  CHECK(precondition_fails([&] { rebase(c, SpecFn{{1, 0}}, t, g); }, "(c)"));
  // A new point of eta* inside a value domain.
  auto t2 = fan4();
  auto c2 = make_simple(1, SpecFn{{0, 0}},
                        {SpecFn{{0, 0}, {4, 1}}, SpecFn{{0, 0}, {4, 2}}, SpecFn{{0, 0}, {4, 3}}});
  CHECK(precondition_fails([&] { rebase(c2, SpecFn{{0, 0}, {4, 0}}, t2, g); }, "(c)"));
}

TEST_CASE("shrink_to_norm") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}});
  auto g = toy_growth();
  auto c = worked();
  auto d = shrink_to_norm(c, 1, t, g);
  CHECK(norm0(d, t, g) == 1);
  for (const auto& e : d.val) CHECK(std::binary_search(c.val.begin(), c.val.end(), e));
  // Exhaustive: some subset has norm exactly 1, and no proper subset of the result keeps it.
  bool exists = false;
  for (Nat mask = 1; mask < 16; ++mask) {
    std::vector<SpecFn> v;
    for (int j = 0; j < 4; ++j)
      if (mask >> j & 1) v.push_back(c.val[j]);
    exists = exists || norm0(make_simple(1, c.base, v), t, g) == 1;
  }
  CHECK(exists);
  for (std::size_t j = 0; j < d.val.size(); ++j) {
    auto v = d.val;
    v.erase(v.begin() + j);
    if (!v.empty()) CHECK(norm0(make_simple(1, c.base, v), t, g) < 1);
  }

  auto single = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}, {2, 1}}});
  REQUIRE(norm0(single, t, g) == 0);
  CHECK(precondition_fails([&] { shrink_to_norm(single, 1, t, g); }, "pre"));
}

TEST_CASE("exact-norm shrink fails when the base is the only value") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}});
  auto g = toy_growth();
  auto c = make_simple(1, SpecFn{{0, 0}}, {SpecFn{{0, 0}}});
  REQUIRE(norm0(c, t, g) == 3);
  auto d = shrink_to_norm(c, 2, t, g);
  CHECK(d == c);
  CHECK(norm0(d, t, g) == 3);  // k = 2 is unreachable
}

TEST_CASE("bigness split") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}});
  auto g = toy_growth();
  auto c = worked();
  auto whole = bigness_split(c, c.val, {}, t, g);
  CHECK(whole.side == 1);
  CHECK(whole.survivor == c);
  CHECK_FALSE(whole.value2);

  std::vector<SpecFn> b{c.val[0], c.val[1]}, cc{c.val[2], c.val[3]};
  auto s = bigness_split(c, b, cc, t, g);
  auto n1 = simple_norms(c, t, g).norm1;
  CHECK(*(s.side == 1 ? s.value1 : s.value2) + 1 >= n1);
  CHECK(precondition_fails([&] { bigness_split(c, b, {c.val[2]}, t, g); }, "pre"));
}

TEST_CASE("bigness under the ceiling convention loses two steps at norm0 = 3") {
  auto t = chain_forest(4, 3);
  auto g = lab_growth();
  SpecFn base{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  std::vector<SpecFn> val;
  for (Nat v = 1; v <= 4; ++v) val.push_back(base.with(4, v));
  auto c = make_simple(2, base, val);
  REQUIRE(validate_creature(c, g, t).ok());
  CHECK(norm0(c, t, g) == 3);
  CHECK(simple_norms(c, t, g).norm1 == 2);
  auto s = bigness_split(c, {val[0], val[1]}, {val[2], val[3]}, t, g);
  CHECK(*s.value1 == 0);
  CHECK(*s.value2 == 0);
}

TEST_CASE("halving") {
  auto t = AmbientTree::build(2, {{0, 2}, {0, 3}});
  auto g = toy_growth();
  Creature c{worked(), 1};
  // normhalf = 16, k = 1: the rounded witness 4 drops the norm from 4 to 2.
  auto h = halve(c, 16);
  CHECK(h.rounded == 4);
  CHECK(h.repaired);
  CHECK(h.kprime == 2);
  CHECK(h.out.k == 2);
  CHECK(h.prop2);
  CHECK_FALSE(h.prop3);  // (3) needs k' >= 15 here
  CHECK(halving_prop2(16, 1, 2));
  CHECK_FALSE(halving_prop2(16, 1, 4));
  CHECK_FALSE(halving_prop3(16, 1, 2));

  // Both properties hold once normhalf <= 2k + 1.
  auto ok = halve(Creature{worked(), 3}, 7);
  CHECK(ok.prop2);
  CHECK(ok.prop3);

  CHECK_THROWS_AS(halve(Creature{worked(), 16}, 16), PreconditionError);
  CHECK_THROWS_AS(halve(c, t, g), PreconditionError);  // normhalf 1, norm 0
}

TEST_CASE("halving (2) and (3) together need normhalf <= 2k + 1") {
  for (Nat nh = 2; nh <= 64; ++nh)
    for (Nat k = 1; 2 * k <= nh && k + 2 <= nh; ++k) {
      bool both = false;
      for (Nat kp = k + 1; kp < nh; ++kp) both = both || (halving_prop2(nh, k, kp) && halving_prop3(nh, k, kp));
      CHECK(both == (nh <= 2 * k + 1));
    }
}
