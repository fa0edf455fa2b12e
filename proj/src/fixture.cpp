#include "creature_lab/fixture.hpp"

#include <fstream>
#include <sstream>

namespace cl {

namespace {

Nat nat(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw DomainError(std::string("fixture: ") + what + " must be a natural number");
  return j.get<Nat>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw DomainError(std::string("fixture: missing key '") + key + "'");
  return j.at(key);
}

std::vector<Nat> nat_list(const Json& j, const char* what) {
  if (!j.is_array()) throw DomainError(std::string("fixture: ") + what + " must be a list");
  std::vector<Nat> r;
  for (const auto& e : j) r.push_back(nat(e, what));
  return r;
}

SpecFn assignments(const Json& j) {
  if (!j.is_array()) throw DomainError("fixture: assignments must be a list");
  std::vector<SpecFn::Entry> e;
  for (const auto& pr : j) {
    if (!pr.is_array() || pr.size() != 2) throw DomainError("fixture: assignment must be [node, value]");
    e.emplace_back(Node(nat(pr[0], "node")), nat(pr[1], "value"));
  }
  return SpecFn(std::move(e));
}

Json assignments_json(const SpecFn& f) {
  Json a = Json::array();
  for (auto& [x, v] : f.entries()) a.push_back({x, v});
  return a;
}

}  // namespace

Json spec_to_json(const SpecFn& f) {
  return Json{{"assignments", assignments_json(f)}, {"bound", f.value_bound()}};
}

SpecFn spec_from_json(const Json& j) {
  SpecFn f = assignments(field(j, "assignments"));
  if (j.contains("bound") && f.value_bound() > nat(j.at("bound"), "bound"))
    throw DomainError("fixture: a value reaches the declared bound");
  return f;
}

Json to_json(const Fixture& f) {
  Json j = Json::object();
  if (f.params)
    j["params"] = {{"imax", f.params->imax}, {"n1", f.params->n1}, {"n2", f.params->n2},
                   {"n3", f.params->n3}};
  else
    j["params"] = nullptr;
  if (f.tree) {
    Json edges = Json::array();
    auto es = f.tree->edges();
    std::sort(es.begin(), es.end());
    for (auto& [a, b] : es) edges.push_back({a, b});
    j["tree"] = {{"width", f.tree->width()}, {"edges", edges}, {"nodes", f.tree->nodes()}};
  } else {
    j["tree"] = nullptr;
  }
  j["specfns"] = Json::array();
  for (const auto& s : f.specfns) j["specfns"].push_back(spec_to_json(s));
  j["creatures"] = Json::array();
  for (const auto& c : f.creatures) {
    Json val = Json::array();
    for (const auto& e : c.c.val) val.push_back(assignments_json(e));
    j["creatures"].push_back(
        {{"i", c.c.i}, {"base", assignments_json(c.c.base)}, {"valrange", val}, {"k", c.k}});
  }
  j["conditions"] = Json::array();
  for (const auto& p : f.conditions) {
    Json nodes = Json::array();
    for (const auto& n : p.nodes()) {
      Json e{{"fn", assignments_json(n.fn)}, {"level", n.level}, {"klabel", n.klabel}};
      e["parent"] = n.parent ? Json(*n.parent) : Json(nullptr);
      nodes.push_back(e);
    }
    Json c{{"depth", p.depth()}, {"nodes", nodes}};
    if (p.coverage()) {
      const auto& cv = *p.coverage();
      c["coverage"] = {{"k", cv.k}, {"alpha", cv.alpha}, {"u", Json(std::vector<Node>(cv.u.begin(), cv.u.end()))}};
    } else {
      c["coverage"] = nullptr;
    }
    j["conditions"].push_back(c);
  }
  j["labelings"] = Json::array();
  for (const auto& l : f.labelings) {
    Json a = Json::array();
    for (const auto& [fn, v] : l) a.push_back({{"fn", assignments_json(fn)}, {"value", v}});
    j["labelings"].push_back(a);
  }
  return j;
}

Fixture fixture_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("fixture: top level must be an object");
  Fixture f;
  try {
    if (j.contains("params") && !j.at("params").is_null()) {
      const auto& p = j.at("params");
      auto n1 = nat_list(field(p, "n1"), "n1"), n2 = nat_list(field(p, "n2"), "n2"),
           n3 = nat_list(field(p, "n3"), "n3");
      f.params = make_growth(nat(field(p, "imax"), "imax"), n1, n2, n3);
    }
    if (j.contains("tree") && !j.at("tree").is_null()) {
      const auto& t = j.at("tree");
      std::vector<std::pair<Node, Node>> edges;
      for (const auto& e : field(t, "edges")) {
        if (!e.is_array() || e.size() != 2) throw DomainError("fixture: edge must be [parent, child]");
        edges.emplace_back(Node(nat(e[0], "edge")), Node(nat(e[1], "edge")));
      }
      std::vector<Node> extra;
      if (t.contains("nodes"))
        for (Nat x : nat_list(t.at("nodes"), "nodes")) extra.push_back(Node(x));
      f.tree = AmbientTree::build(nat(field(t, "width"), "width"), edges, extra);
    }
    if (j.contains("specfns"))
      for (const auto& s : j.at("specfns")) f.specfns.push_back(spec_from_json(s));
    if (j.contains("creatures"))
      for (const auto& c : j.at("creatures")) {
        std::vector<SpecFn> val;
        for (const auto& e : field(c, "valrange")) val.push_back(assignments(e));
        Nat k = c.contains("k") ? nat(c.at("k"), "k") : 1;
        f.creatures.push_back(
            Creature{make_simple(nat(field(c, "i"), "i"), assignments(field(c, "base")), val), k});
      }
    if (j.contains("conditions"))
      for (const auto& c : j.at("conditions")) {
        std::vector<FNode> nodes;
        for (const auto& n : field(c, "nodes")) {
          FNode fn{assignments(field(n, "fn")), nat(field(n, "level"), "level"), std::nullopt,
                   n.contains("klabel") ? nat(n.at("klabel"), "klabel") : 1};
          if (n.contains("parent") && !n.at("parent").is_null()) fn.parent = nat(n.at("parent"), "parent");
          nodes.push_back(std::move(fn));
        }
        std::optional<Coverage> cov;
        if (c.contains("coverage") && !c.at("coverage").is_null()) {
          const auto& cv = c.at("coverage");
          Coverage x{nat(field(cv, "k"), "k"), nat(field(cv, "alpha"), "alpha"), {}};
          for (Nat u : nat_list(field(cv, "u"), "u")) x.u.insert(Node(u));
          cov = x;
        }
        f.conditions.emplace_back(nat(field(c, "depth"), "depth"), std::move(nodes), cov);
      }
    if (j.contains("labelings"))
      for (const auto& l : j.at("labelings")) {
        LeafLabeling lab;
        for (const auto& e : l) lab[assignments(field(e, "fn"))] = nat(field(e, "value"), "value");
        f.labelings.push_back(std::move(lab));
      }
  } catch (const Json::exception& e) {
    throw DomainError(std::string("fixture: ") + e.what());
  }
  return f;
}

std::string emit(const Fixture& f) { return to_json(f).dump(2) + "\n"; }

Fixture parse_fixture(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("fixture: ") + e.what());
  }
  return fixture_from_json(j);
}

Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open fixture " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fixture(ss.str());
}

void save_fixture(const std::string& path, const Fixture& f) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write fixture " + path);
  out << emit(f);
}

}  // namespace cl
