#include <doctest.h>

#include "creature_lab/verify.hpp"

#include <cstdio>
#include <fstream>

using namespace cl;

namespace {

Fixture worked() {
  Fixture f;
  f.params = toy_growth();
  f.tree = AmbientTree::build(2, {{0, 2}, {0, 3}});
  f.specfns.push_back(SpecFn{{0, 0}});
  f.creatures.push_back(Creature{make_simple(1, SpecFn{{0, 0}},
                                             {SpecFn{{0, 0}, {2, 1}}, SpecFn{{0, 0}, {2, 2}},
                                              SpecFn{{0, 0}, {3, 1}}, SpecFn{{0, 0}, {3, 2}}}),
                                 1});
  return f;
}

// Round trip through text, then once more: the canonical form is a fixed point.
void round_trip(const Fixture& f) {
  std::string a = emit(f);
  Fixture back = parse_fixture(a);
  CHECK(emit(back) == a);
  CHECK(back.specfns == f.specfns);
  CHECK(back.conditions == f.conditions);
  CHECK(back.labelings == f.labelings);
  REQUIRE(back.creatures.size() == f.creatures.size());
  for (std::size_t j = 0; j < f.creatures.size(); ++j) {
    CHECK(back.creatures[j].k == f.creatures[j].k);
    CHECK(back.creatures[j].c.i == f.creatures[j].c.i);
    CHECK(back.creatures[j].c.base == f.creatures[j].c.base);
    CHECK(back.creatures[j].c.val == f.creatures[j].c.val);
  }
}

}  // namespace

TEST_CASE("spec fn json") {
  SpecFn f{{3, 1}, {0, 2}};
  Json j = spec_to_json(f);
  CHECK(j["assignments"] == Json::parse("[[0,2],[3,1]]"));
  CHECK(j["bound"] == 3);
  CHECK(spec_from_json(j) == f);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"assignments":[[0,1],[0,2]]})")), DomainError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"assignments":[[0,3]],"bound":3})")), DomainError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"assignments":[[0,-1]]})")), DomainError);
  CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"assignments":[[0]]})")), DomainError);
}

TEST_CASE("round trip: worked example") {
  auto f = worked();
  round_trip(f);
  std::string text = emit(f);
  CHECK(text.back() == '\n');
  CHECK(text.find("\n  \"conditions\"") != std::string::npos);
}

TEST_CASE("round trip: corpus") {
  auto c = fixture_corpus();
  for (const auto& [fi, cr] : c.creatures) {
    Fixture f;
    f.params = c.toy;
    f.tree = c.forests[fi];
    f.creatures.push_back(Creature{cr, 1});
    round_trip(f);
  }
  Fixture f;
  f.params = c.lab;
  f.tree = c.chains;
  f.conditions = c.fragments;
  for (const auto& p : c.fragments) {
    LeafLabeling lab;
    Nat v = 0;
    for (std::size_t leaf : p.leaves()) lab[p.node(leaf).fn] = v++ % 3;
    f.labelings.push_back(lab);
  }
  round_trip(f);
}

TEST_CASE("emit ignores input key and list order") {
  std::string canon = emit(worked());
  Json j = Json::parse(canon);
  Json shuffled = Json::object();
  for (auto it = j.rbegin(); it != j.rend(); ++it) shuffled[it.key()] = it.value();
  shuffled["tree"]["nodes"] = Json::parse("[3,2,0]");
  shuffled["tree"]["edges"] = Json::parse("[[0,3],[0,2]]");
  shuffled["specfns"][0]["assignments"] = Json::parse("[[0,0]]");
  CHECK(emit(fixture_from_json(shuffled)) == canon);
}

TEST_CASE("malformed fixtures") {
  CHECK_THROWS_AS(parse_fixture("{"), DomainError);
  CHECK_THROWS_AS(parse_fixture("[]"), DomainError);
  CHECK_THROWS_AS(parse_fixture(R"({"params":{"n1":[2]}})"), DomainError);
  CHECK_THROWS_AS(parse_fixture(R"({"tree":{"width":2,"edges":[[0,5]]}})"), DomainError);
  CHECK_THROWS_AS(parse_fixture(R"({"tree":{"width":2,"edges":[[0]]}})"), DomainError);
  CHECK_THROWS_AS(parse_fixture(R"({"specfns":[{"assignments":"x"}]})"), DomainError);
  CHECK_THROWS_AS(parse_fixture(R"({"creatures":[{"i":1}]})"), DomainError);
  CHECK_THROWS_AS(parse_fixture(R"({"params":{"imax":0,"n1":[3],"n2":[2],"n3":[4]}})"), DomainError);
  CHECK_THROWS_AS(load_fixture("/nonexistent/fixture.json"), DomainError);
  // Empty object is an empty fixture.
  auto e = parse_fixture("{}");
  CHECK_FALSE(e.params);
  CHECK(e.creatures.empty());
}

TEST_CASE("save and load") {
  auto f = worked();
  std::string path = "fixture_roundtrip_test.json";
  save_fixture(path, f);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == emit(f));
  CHECK(emit(load_fixture(path)) == text);
  std::remove(path.c_str());
}
