#include "creature_lab/creature.hpp"

#include <algorithm>
#include <sstream>

namespace cl {

void SimpleCreature::normalize() {
  std::sort(val.begin(), val.end());
  val.erase(std::unique(val.begin(), val.end()), val.end());
}

SimpleCreature make_simple(Nat i, SpecFn base, std::vector<SpecFn> val) {
  SimpleCreature c{i, std::move(base), std::move(val)};
  c.normalize();
  return c;
}

std::optional<Nat> kind_of(const SpecFn& base, const GrowthSequences& g) {
  if (base.empty()) return 0;
  for (Nat i = 1; i <= g.imax; ++i)
    if (base.size() <= g.n2[i - 1]) return i;
  return std::nullopt;
}

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](auto& c) { return c.ok; });
}

std::string Report::first_failure() const {
  for (auto& c : checks)
    if (!c.ok) return c.clause;
  return {};
}

std::string Report::str() const {
  std::ostringstream os;
  for (auto& c : checks) {
    os << c.clause << ": " << (c.ok ? "pass" : "FAIL");
    if (!c.ok && !c.witness.empty()) os << " (" << c.witness << ")";
    os << '\n';
  }
  return os.str();
}

Report validate_shape(const SimpleCreature& c, const GrowthSequences& g, const AmbientTree& t) {
  Report r;
  ClauseCheck a{"(a)", c.i <= g.imax, ""};
  if (!a.ok) a.witness = "kind " + std::to_string(c.i) + " > imax";
  r.checks.push_back(a);
  if (!a.ok) return r;

  ClauseCheck b{"(b)", true, ""};
  auto k = kind_of(c.base, g);
  if (k != c.i) {
    b.ok = false;
    b.witness = "base " + c.base.str() + " forces kind " + (k ? std::to_string(*k) : "none");
  } else if (c.i > 0 && !is_spec(t, c.base, g.n3[c.i - 1])) {
    b.ok = false;
    b.witness = "base " + c.base.str() + " not in spec_n3[i-1]";
  }
  for (auto& [x, v] : c.base.entries())
    if (b.ok && !t.contains(x)) {
      b.ok = false;
      b.witness = "node " + std::to_string(x) + " not in tree";
    }
  r.checks.push_back(b);

  ClauseCheck cc{"(c)", true, ""};
  if (c.val.empty()) {
    cc = {"(c)", false, "empty value range"};
  } else if (c.val.size() >= g.n1[c.i]) {
    cc = {"(c)", false, "|val| = " + std::to_string(c.val.size()) + " >= n1[i]"};
  } else {
    for (auto& eta : c.val) {
      std::string why;
      if (!c.base.subset_of(eta))
        why = "base not contained";
      else if (!is_spec(t, eta, g.n3[c.i]))
        why = "not in spec_n3[i]";
      else if (eta.size() >= g.n2[c.i])
        why = "|dom| >= n2[i]";
      else
        for (auto& [x, v] : eta.entries())
          if (!t.contains(x)) why = "node outside tree";
      if (!why.empty()) {
        cc = {"(c)", false, eta.str() + ": " + why};
        break;
      }
    }
  }
  r.checks.push_back(cc);
  return r;
}

std::optional<std::pair<SpecFn, Node>> clause_d_violation(const SimpleCreature& c) {
  for (auto& e1 : c.val)
    for (Node x : e1.new_points(c.base)) {
      Nat v = *e1.at(x);
      bool found = std::any_of(c.val.begin(), c.val.end(), [&](const SpecFn& e2) {
        auto w = e2.at(x);
        return !w || *w != v;
      });
      if (!found) return std::make_pair(e1, x);
    }
  return std::nullopt;
}

Report validate_creature(const SimpleCreature& c, const GrowthSequences& g, const AmbientTree& t) {
  Report r = validate_shape(c, g, t);
  if (r.checks.size() < 3) return r;
  ClauseCheck d{"(d)", true, ""};
  if (auto w = clause_d_violation(c)) {
    d.ok = false;
    d.witness = w->first.str() + " at " + std::to_string(w->second);
  }
  r.checks.push_back(d);
  return r;
}

namespace {

using ValueSet = std::vector<Nat>;

// Is there a set of at most `budget` values meeting every set?
bool hittable(const std::vector<ValueSet>& sets, std::vector<bool>& hit, Nat budget) {
  std::vector<std::size_t> open;
  for (std::size_t s = 0; s < sets.size(); ++s)
    if (!hit[s]) open.push_back(s);
  if (open.empty()) return true;
  if (budget == 0) return false;
  std::sort(open.begin(), open.end(),
            [&](std::size_t a, std::size_t b) { return sets[a].size() < sets[b].size(); });

  // Pairwise disjoint open sets each need their own value.
  std::vector<Nat> used;
  Nat packing = 0;
  for (std::size_t s : open) {
    bool clash = std::any_of(sets[s].begin(), sets[s].end(), [&](Nat v) {
      return std::binary_search(used.begin(), used.end(), v);
    });
    if (clash) continue;
    ++packing;
    used.insert(used.end(), sets[s].begin(), sets[s].end());
    std::sort(used.begin(), used.end());
  }
  if (packing > budget) return false;

  // Branch on the smallest open set; values hitting the same open sets are interchangeable,
  // and a value whose open sets are a subset of another's is dominated.
  const auto& pick = sets[open.front()];
  std::vector<std::vector<std::size_t>> sigs;
  for (Nat v : pick) {
    std::vector<std::size_t> sig;
    for (std::size_t s : open)
      if (std::binary_search(sets[s].begin(), sets[s].end(), v)) sig.push_back(s);
    sigs.push_back(std::move(sig));
  }
  std::vector<std::size_t> order;
  for (std::size_t a = 0; a < sigs.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < sigs.size() && !dominated; ++b) {
      if (a == b) continue;
      bool sub = std::includes(sigs[b].begin(), sigs[b].end(), sigs[a].begin(), sigs[a].end());
      if (sub && (sigs[a] != sigs[b] || b < a)) dominated = true;
    }
    if (!dominated) order.push_back(a);
  }
  for (std::size_t a : order) {
    for (std::size_t s : sigs[a]) hit[s] = true;
    bool ok = hittable(sets, hit, budget - 1);
    for (std::size_t s : sigs[a]) hit[s] = false;
    if (ok) return true;
  }
  return false;
}

}  // namespace

Nat norm0(const SimpleCreature& c, const AmbientTree& t, const GrowthSequences& g) {
  auto rep = validate_shape(c, g, t);
  if (!rep.ok()) throw DomainError("norm0 of invalid creature: clause " + rep.first_failure());
  const Nat cap = g.n1[c.i], n2 = g.n2[c.i];

  std::vector<std::vector<Node>> fresh;
  NodeSet relevant;
  std::set<Nat> all_values;
  for (auto& eta : c.val) {
    fresh.push_back(eta.new_points(c.base));
    for (Node x : fresh.back()) {
      relevant.insert(x);
      all_values.insert(*eta.at(x));
    }
  }

  // Only a branch's trace on the relevant nodes matters; larger traces dominate.
  std::vector<NodeSet> traces;
  for (auto& b : t.branches()) {
    NodeSet tr;
    for (Node x : b)
      if (relevant.count(x)) tr.insert(x);
    traces.push_back(tr);
  }
  std::sort(traces.begin(), traces.end());
  traces.erase(std::unique(traces.begin(), traces.end()), traces.end());
  std::vector<NodeSet> maximal;
  for (auto& s : traces) {
    bool dominated = std::any_of(traces.begin(), traces.end(), [&](const NodeSet& o) {
      return o != s && std::includes(o.begin(), o.end(), s.begin(), s.end());
    });
    if (!dominated) maximal.push_back(s);
  }
  if (t.branches().empty()) return cap;

  const Nat T = maximal.size();
  const Nat threshold = std::max<Nat>({T, all_values.size(), 1});
  const bool base_in_val = std::binary_search(c.val.begin(), c.val.end(), c.base);

  for (Nat k = 1; k <= cap; ++k) {
    const Nat room = shr_floor(n2, k);
    std::vector<std::size_t> small;
    for (std::size_t e = 0; e < c.val.size(); ++e)
      if (c.val[e].size() <= room) small.push_back(e);
    if (small.empty()) return k - 1;

    if (k >= threshold) {
      // The adversary takes every trace and every value; only the base survives.
      if (!base_in_val || c.base.size() > room) return k - 1;
      if (c.base.empty()) return cap;
      Nat m = k;
      while (m < cap && c.base.size() <= shr_floor(n2, m + 1)) ++m;
      return m;
    }

    const Nat pickn = std::min(k, T);
    std::vector<bool> mask(T, false);
    std::fill(mask.begin(), mask.begin() + pickn, true);
    bool adversary_wins = false;
    do {
      NodeSet covered;
      for (Nat j = 0; j < T; ++j)
        if (mask[j]) covered.insert(maximal[j].begin(), maximal[j].end());
      std::vector<ValueSet> sets;
      bool survivor = false;
      for (std::size_t e : small) {
        ValueSet h;
        for (Node x : fresh[e])
          if (covered.count(x)) h.push_back(*c.val[e].at(x));
        if (h.empty()) {
          survivor = true;
          break;
        }
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
        sets.push_back(std::move(h));
      }
      if (survivor) continue;
      std::vector<bool> hit(sets.size(), false);
      if (hittable(sets, hit, k)) adversary_wins = true;
    } while (!adversary_wins && std::prev_permutation(mask.begin(), mask.end()));
    if (adversary_wins) return k - 1;
  }
  return cap;
}

Nat normstar(const SimpleCreature& c, const GrowthSequences& g) {
  if (c.i > g.imax) throw DomainError("kind beyond imax");
  return log2_ceil_ratio(g.n1[c.i], std::max<Nat>(c.val.size(), 1));
}

Norms simple_norms(const SimpleCreature& c, const AmbientTree& t, const GrowthSequences& g) {
  Norms n;
  n.norm0 = norm0(c, t, g);
  n.normstar = normstar(c, g);
  n.normhalf = std::min(n.norm0, n.normstar);
  n.norm1 = log2_ceil(n.norm0);
  n.norm2 = log2_ceil(n.normhalf);
  return n;
}

Norms norms(const Creature& c, const AmbientTree& t, const GrowthSequences& g,
            const NormShape& shape) {
  if (c.k == 0) throw DomainError("creature counter k must be positive");
  Norms n = simple_norms(c.c, t, g);
  n.norm = f_eval(shape, n.normhalf, c.k);
  return n;
}

Reconstruction reconstruct(const SimpleCreature& c, const GrowthSequences& g) {
  Reconstruction r;
  if (c.val.empty()) return r;
  std::vector<SpecFn::Entry> common = c.val.front().entries();
  for (auto& eta : c.val)
    std::erase_if(common, [&](const SpecFn::Entry& e) { return eta.at(e.first) != e.second; });
  r.base = SpecFn(common);
  r.i = kind_of(r.base, g);
  r.matches = r.base == c.base && r.i == c.i;
  return r;
}

}  // namespace cl
