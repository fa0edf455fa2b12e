#include "creature_lab/spec.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <sstream>

namespace cl {

SpecFn::SpecFn(std::vector<Entry> entries) : a_(std::move(entries)) {
  std::sort(a_.begin(), a_.end());
  a_.erase(std::unique(a_.begin(), a_.end()), a_.end());
  for (std::size_t k = 1; k < a_.size(); ++k)
    if (a_[k].first == a_[k - 1].first)
      throw DomainError("node " + std::to_string(a_[k].first) + " assigned two values");
}

std::optional<Nat> SpecFn::at(Node x) const {
  auto it = std::lower_bound(a_.begin(), a_.end(), Entry{x, 0});
  if (it == a_.end() || it->first != x) return std::nullopt;
  return it->second;
}

NodeSet SpecFn::dom() const {
  NodeSet s;
  for (auto& e : a_) s.insert(e.first);
  return s;
}

Nat SpecFn::value_bound() const {
  Nat b = 0;
  for (auto& e : a_) b = std::max(b, e.second + 1);
  return b;
}

bool SpecFn::subset_of(const SpecFn& o) const {
  return std::includes(o.a_.begin(), o.a_.end(), a_.begin(), a_.end());
}

std::vector<Node> SpecFn::new_points(const SpecFn& o) const {
  std::vector<Node> r;
  for (auto& e : a_)
    if (!o.defined(e.first)) r.push_back(e.first);
  return r;
}

SpecFn SpecFn::with(Node x, Nat v) const {
  auto e = a_;
  e.emplace_back(x, v);
  return SpecFn(std::move(e));
}

SpecFn SpecFn::without(Node x) const {
  SpecFn r = *this;
  std::erase_if(r.a_, [x](const Entry& e) { return e.first == x; });
  return r;
}

std::string SpecFn::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < a_.size(); ++k)
    os << (k ? "," : "") << a_[k].first << "->" << a_[k].second;
  os << '}';
  return os.str();
}

std::optional<SpecViolation> spec_violation(const AmbientTree& t, const SpecFn& f, Nat bound) {
  const auto& e = f.entries();
  for (auto& [x, v] : e)
    if (v >= bound) return SpecViolation{x, std::nullopt};
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = a + 1; b < e.size(); ++b)
      if (e[a].second == e[b].second && t.comparable(e[a].first, e[b].first))
        return SpecViolation{e[a].first, e[b].first};
  return std::nullopt;
}

bool is_spec(const AmbientTree& t, const SpecFn& f, Nat bound) {
  return !spec_violation(t, f, bound);
}

bool is_spec(const AmbientTree& t, const SpecFn& f) {
  return !spec_violation(t, f, std::numeric_limits<Nat>::max());
}

std::vector<SpecFn> enumerate_spec(const AmbientTree& t, const NodeSet& u, Nat n) {
  std::vector<Node> xs(u.begin(), u.end());
  std::vector<SpecFn::Entry> cur;
  std::vector<SpecFn> out;
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == xs.size()) {
      out.emplace_back(cur);
      return;
    }
    for (Nat v = 0; v < n; ++v) {
      bool ok = true;
      for (auto& [y, w] : cur)
        if (w == v && t.comparable(y, xs[k])) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.emplace_back(xs[k], v);
      self(self, k + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

UnionResult union_spec(const AmbientTree& t, const SpecFn& a, const SpecFn& b) {
  std::map<Node, Nat> m;
  for (auto& [x, v] : a.entries()) m[x] = v;
  for (auto& [x, v] : b.entries()) {
    auto it = m.find(x);
    if (it != m.end() && it->second != v) return Incompatible{x, std::nullopt};
    m[x] = v;
  }
  SpecFn u(std::vector<SpecFn::Entry>(m.begin(), m.end()));
  // Witness pairs only across the two sides; each side is assumed valid.
  for (auto& [x, v] : a.entries())
    for (auto& [y, w] : b.entries())
      if (v == w && x != y && t.comparable(x, y)) return Incompatible{std::min(x, y), std::max(x, y)};
  if (auto bad = spec_violation(t, u, std::numeric_limits<Nat>::max()))
    return Incompatible{bad->x, bad->y};
  return u;
}

std::optional<SpecFn> try_union(const AmbientTree& t, const SpecFn& a, const SpecFn& b) {
  auto r = union_spec(t, a, b);
  if (auto* f = std::get_if<SpecFn>(&r)) return *f;
  return std::nullopt;
}

std::optional<NodeMap> isomorphic_over(const AmbientTree& t, const SpecFn& a, const SpecFn& b,
                                       const NodeSet& base) {
  if (a.size() != b.size()) return std::nullopt;
  NodeMap f;
  for (Node x : base) f[x] = x;
  std::vector<Node> todo;
  for (auto& [x, v] : a.entries()) {
    if (base.count(x)) {
      if (b.at(x) != v) return std::nullopt;
    } else {
      todo.push_back(x);
    }
  }
  std::vector<Node> targets;
  for (auto& [y, w] : b.entries())
    if (!base.count(y)) targets.push_back(y);
    else if (a.at(y) != w) return std::nullopt;
  if (todo.size() != targets.size()) return std::nullopt;

  std::set<Node> used;
  auto fits = [&](Node x, Node y) {
    for (auto& [p, q] : f) {
      if (t.below(p, x) != t.below(q, y)) return false;
      if (t.below(x, p) != t.below(y, q)) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t k) -> bool {
    if (k == todo.size()) return true;
    Node x = todo[k];
    for (Node y : targets) {
      if (used.count(y) || b.at(y) != a.at(x) || !fits(x, y)) continue;
      f[x] = y;
      used.insert(y);
      if (self(self, k + 1)) return true;
      f.erase(x);
      used.erase(y);
    }
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  return f;
}

namespace {

bool off_root_ok(const NodeSet& s1, const NodeSet& s2, const NodeSet& root, const AmbientTree& t) {
  for (Node x : s1) {
    if (root.count(x)) continue;
    for (Node y : s2) {
      if (root.count(y)) continue;
      if (t.comparable(x, y)) return false;
    }
  }
  return true;
}

NodeSet intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

}  // namespace

bool is_delta_system(const std::vector<NodeSet>& family, const AmbientTree& t,
                     const DeltaSystem& d) {
  if (d.members.empty()) return false;
  for (std::size_t a : d.members) {
    if (a >= family.size()) return false;
    if (!std::includes(family[a].begin(), family[a].end(), d.root.begin(), d.root.end()))
      return false;
  }
  for (std::size_t p = 0; p < d.members.size(); ++p)
    for (std::size_t q = p + 1; q < d.members.size(); ++q) {
      const auto& s1 = family[d.members[p]];
      const auto& s2 = family[d.members[q]];
      if (intersect(s1, s2) != d.root) return false;
      if (!off_root_ok(s1, s2, d.root, t)) return false;
    }
  return true;
}

DeltaSystem delta_system(const std::vector<NodeSet>& family, const AmbientTree& t) {
  std::set<NodeSet> candidates{NodeSet{}};
  for (std::size_t a = 0; a < family.size(); ++a) {
    candidates.insert(family[a]);
    for (std::size_t b = a + 1; b < family.size(); ++b)
      candidates.insert(intersect(family[a], family[b]));
  }
  DeltaSystem best;
  for (const auto& root : candidates) {
    DeltaSystem d{root, {}};
    for (std::size_t a = 0; a < family.size(); ++a) {
      if (!std::includes(family[a].begin(), family[a].end(), root.begin(), root.end())) continue;
      bool ok = true;
      for (std::size_t b : d.members)
        if (intersect(family[a], family[b]) != root || !off_root_ok(family[a], family[b], root, t)) {
          ok = false;
          break;
        }
      if (ok) d.members.push_back(a);
    }
    if (d.members.size() > best.members.size()) best = d;
  }
  return best;
}

}  // namespace cl
