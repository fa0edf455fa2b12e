#include "creature_lab/homogenize.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <functional>

namespace cl {

Nat work_budget() {
  if (const char* s = std::getenv("CREATURE_LAB_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 100000000ULL;
}

namespace {

// Rebuilds p keeping the nodes flagged in `keep` (parents of kept nodes must be kept).
Fragment keep_nodes(const Fragment& p, const std::vector<bool>& keep) {
  std::vector<FNode> out;
  std::vector<std::optional<std::size_t>> where(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!keep[k]) continue;
    FNode f = p.node(k);
    if (f.parent) {
      if (!where[*f.parent]) continue;
      f.parent = *where[*f.parent];
    }
    where[k] = out.size();
    out.push_back(std::move(f));
  }
  return Fragment(p.depth(), std::move(out), p.coverage());
}

SimpleCreature creature_with(const Fragment& p, std::size_t k, const std::vector<std::size_t>& kids,
                             const GrowthSequences& g) {
  std::vector<SpecFn> val;
  for (std::size_t c : kids) val.push_back(p.node(c).fn);
  return make_simple(p.creature(k, g).i, p.node(k).fn, std::move(val));
}

}  // namespace

PurifyResult purify(const Fragment& p, const std::set<SpecFn>& x, Nat kstar, const AmbientTree& t,
                    const GrowthSequences& g, const NormShape& shape) {
  std::vector<bool> in_x(p.size(), false);
  for (std::size_t k = 0; k < p.size(); ++k) in_x[k] = x.count(p.node(k).fn) > 0;
  for (const auto& f : x)
    if (!p.find(f)) throw PreconditionError("purify: X names " + f.str() + ", not a node of p");
  for (std::size_t k = 0; k < p.size(); ++k)
    for (std::size_t c : p.children(k))
      if (in_x[k] && !in_x[c]) throw PreconditionError("purify: X is not upward closed");
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p.internal(k) && norm0(p.creature(k, g), t, g) == 0)
      throw PreconditionError("purify: norm0 = 0 at " + p.node(k).fn.str());
  // Stand-in for norms growing along branches: a changed node may lose 1 and must keep kstar.
  if (kstar > 0)
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p.internal(k) && p.node(k).level >= kstar &&
          !lg_geq_int(node_norm(p, k, t, g, shape), static_cast<std::int64_t>(kstar) + 1))
        throw PreconditionError("purify: norm below kstar + 1 at " + p.node(k).fn.str());

  enum Color { kIn = 0, kOut = 1, kMixed = 2 };
  std::vector<Color> color(p.size(), kMixed);
  std::vector<std::vector<std::size_t>> kept(p.size());
  for (std::size_t k = p.size(); k-- > 0;) {
    kept[k] = p.children(k);
    if (in_x[k]) {
      color[k] = kIn;
      continue;
    }
    if (!p.internal(k)) {
      color[k] = kOut;
      continue;
    }
    std::vector<std::size_t> side[2];
    bool mixed_child = false;
    for (std::size_t c : p.children(k)) {
      if (color[c] == kMixed) mixed_child = true;
      else side[color[c]].push_back(c);
    }
    if (!mixed_child && side[1].empty()) {
      color[k] = kIn;
      continue;
    }
    if (!mixed_child && side[0].empty()) {
      color[k] = kOut;
      continue;
    }
    if (mixed_child || p.node(k).level < kstar) continue;

    // Two-colouring of the successors: keep the side with the larger norm, ties to colour 0.
    std::optional<int> best;
    Norms best_n;
    for (int s = 0; s < 2; ++s) {
      auto c = creature_with(p, k, side[s], g);
      if (!validate_creature(c, g, t).ok()) continue;
      auto n = norms(Creature{c, p.node(k).klabel}, t, g, shape);
      if (n.normhalf < p.node(k).klabel) continue;
      bool better = !best || !lg_geq(best_n.norm, n.norm) ||
                    (lg_geq(n.norm, best_n.norm) && n.norm2 > best_n.norm2);
      if (better) {
        best = s;
        best_n = n;
      }
    }
    if (!best) continue;
    color[k] = Color(*best);
    kept[k] = side[*best];
  }

  std::vector<bool> keep(p.size(), false);
  keep[p.root()] = true;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (keep[k])
      for (std::size_t c : kept[k]) keep[c] = true;

  PurifyResult r;
  r.q = keep_nodes(p, keep);
  const Fragment& q = r.q;
  for (std::size_t k = 0; k < q.size(); ++k) {
    auto pk = p.find(q.node(k).fn);
    if (q.children(k).size() < p.children(*pk).size()) r.changed.push_back(k);
  }

  std::function<void(std::size_t)> walk = [&](std::size_t k) {
    auto pk = *p.find(q.node(k).fn);
    if (color[pk] != kMixed && q.node(k).level >= kstar) {
      PurifiedCone cone{k, std::nullopt};
      if (color[pk] == kIn) {
        for (Nat l = q.node(k).level; l <= q.depth(); ++l) {
          bool all = true;
          for (std::size_t j : q.level(l))
            if (q.tree_leq(k, j) && !in_x[*p.find(q.node(j).fn)]) all = false;
          if (all) {
            cone.level_in_x = l;
            break;
          }
        }
      }
      r.front.push_back(cone);
      return;
    }
    for (std::size_t c : q.children(k)) walk(c);
  };
  walk(q.root());
  r.leq_kstar = leq_n(p, q, kstar, t, g, shape).ok;
  return r;
}

Fragment halve_below(const Fragment& p, Nat nstar, const AmbientTree& t, const GrowthSequences& g,
                     const NormShape& shape) {
  Fragment q = p;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!p.internal(k) || p.node(k).level >= nstar) continue;
    Creature c{p.creature(k, g), p.node(k).klabel};
    try {
      q.set_klabel(k, halve(c, t, g, shape).out.k);
    } catch (const DomainError& e) {
      throw DomainError("halve_below: cannot halve at " + p.node(k).fn.str() + ": " + e.what());
    }
  }
  return q;
}

bool decides_at(const Fragment& q, const LeafLabeling& label, Nat l) {
  for (std::size_t k : q.level(l)) {
    std::optional<Nat> seen;
    for (std::size_t leaf : q.leaves()) {
      if (!q.tree_leq(k, leaf)) continue;
      auto it = label.find(q.node(leaf).fn);
      if (it == label.end()) throw DomainError("labeling misses leaf " + q.node(leaf).fn.str());
      if (seen && *seen != it->second) return false;
      seen = it->second;
    }
  }
  return true;
}

namespace {

using Mask = std::uint32_t;

// Local admissibility of shrinking the successors of one node, shared by both searches.
struct LocalCheck {
  const Fragment& p;
  const AmbientTree& t;
  const GrowthSequences& g;
  const NormShape& shape;
  Nat m;
  std::map<std::pair<std::size_t, Mask>, bool> cache;

  Mask full(std::size_t k) const { return Mask((1ull << p.children(k).size()) - 1); }

  bool ok(std::size_t k, Mask s) {
    if (s == 0) return false;
    if (s == full(k)) return true;
    if (p.node(k).level < m) return false;
    auto key = std::make_pair(k, s);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<std::size_t> kids;
    for (std::size_t j = 0; j < p.children(k).size(); ++j)
      if (s >> j & 1) kids.push_back(p.children(k)[j]);
    auto c = creature_with(p, k, kids, g);
    bool good = validate_creature(c, g, t).ok();
    if (good) {
      auto n = norms(Creature{c, p.node(k).klabel}, t, g, shape);
      good = n.normhalf >= p.node(k).klabel && lg_geq_int(n.norm, std::int64_t(m));
    }
    return cache[key] = good;
  }
};

// Subsets of `avail`, largest first, ties by mask value.
std::vector<Mask> subsets_desc(Mask avail) {
  std::vector<Mask> r;
  for (Mask s = avail;; s = (s - 1) & avail) {
    if (s) r.push_back(s);
    if (s == 0) break;
  }
  std::stable_sort(r.begin(), r.end(),
                   [](Mask a, Mask b) { return std::popcount(a) > std::popcount(b); });
  return r;
}

struct DecideSearch {
  const Fragment& p;
  const LeafLabeling& label;
  LocalCheck& local;
  bool exhaustive;
  Nat ell = 0;
  std::vector<Nat> values;  // candidate labels
  std::map<std::pair<std::size_t, Nat>, std::optional<Mask>> cone_memo;
  std::map<std::size_t, std::optional<Mask>> top_memo;
  std::map<std::size_t, Nat> cone_value;

  std::optional<Mask> choose(std::size_t k, Mask avail) {
    if (!exhaustive) {
      if (local.ok(k, avail)) return avail;
      return std::nullopt;
    }
    for (Mask s : subsets_desc(avail))
      if (local.ok(k, s)) return s;
    return std::nullopt;
  }

  bool cone(std::size_t k, Nat v) {
    auto key = std::make_pair(k, v);
    if (auto it = cone_memo.find(key); it != cone_memo.end()) return it->second.has_value();
    std::optional<Mask> res;
    if (!p.internal(k)) {
      auto it = label.find(p.node(k).fn);
      if (it == label.end()) throw DomainError("labeling misses leaf " + p.node(k).fn.str());
      if (it->second == v) res = 0;
    } else {
      Mask avail = 0;
      for (std::size_t j = 0; j < p.children(k).size(); ++j)
        if (cone(p.children(k)[j], v)) avail |= Mask(1) << j;
      res = choose(k, avail);
    }
    cone_memo[key] = res;
    return res.has_value();
  }

  bool top(std::size_t k) {
    if (auto it = top_memo.find(k); it != top_memo.end()) return it->second.has_value();
    std::optional<Mask> res;
    if (p.node(k).level == ell) {
      for (Nat v : values)
        if (cone(k, v)) {
          cone_value[k] = v;
          res = 0;
          break;
        }
    } else {
      Mask avail = 0;
      for (std::size_t j = 0; j < p.children(k).size(); ++j)
        if (top(p.children(k)[j])) avail |= Mask(1) << j;
      res = choose(k, avail);
    }
    top_memo[k] = res;
    return res.has_value();
  }

  Fragment build() {
    std::vector<bool> keep(p.size(), false);
    std::vector<std::optional<Nat>> val(p.size());
    keep[p.root()] = true;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!keep[k] || !p.internal(k)) continue;
      Mask s;
      if (p.node(k).level < ell) {
        s = *top_memo.at(k);
      } else {
        if (p.node(k).level == ell) val[k] = cone_value.at(k);
        s = *cone_memo.at({k, *val[k]});
      }
      for (std::size_t j = 0; j < p.children(k).size(); ++j)
        if (s >> j & 1) {
          keep[p.children(k)[j]] = true;
          val[p.children(k)[j]] = val[k];
        }
    }
    return keep_nodes(p, keep);
  }
};

}  // namespace

DecideResult decide(const Fragment& p, const LeafLabeling& label, Nat m, const AmbientTree& t,
                    const GrowthSequences& g, const NormShape& shape) {
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p.children(k).size() > 20) throw DomainError("decide: branching above 20 is not supported");
  LocalCheck local{p, t, g, shape, m, {}};
  std::set<Nat> vs;
  for (std::size_t leaf : p.leaves()) {
    auto it = label.find(p.node(leaf).fn);
    if (it == label.end()) throw DomainError("labeling misses leaf " + p.node(leaf).fn.str());
    vs.insert(it->second);
  }
  DecideResult r;
  for (Nat ell = 0; ell < std::max<Nat>(p.depth(), 1); ++ell) {
    for (bool exhaustive : {false, true}) {
      DecideSearch s{p, label, local, exhaustive, ell, {vs.begin(), vs.end()}, {}, {}, {}};
      if (!s.top(p.root())) continue;
      Fragment q = s.build();
      if (!validate_condition(q, t, g).ok() || !leq_n(p, q, m, t, g, shape).ok ||
          !decides_at(q, label, ell))
        continue;
      r.found = true;
      r.q = std::move(q);
      r.level = ell;
      r.path = exhaustive ? "exhaustive" : "greedy";
      break;
    }
    if (r.found) break;
  }
  if (!r.found) return r;

  const Fragment& q = r.q;
  const SpecFn& root = q.node(q.root()).fn;
  std::vector<NodeSet> family;
  std::vector<std::size_t> lev = q.level(r.level);
  for (std::size_t k : lev) {
    NodeSet d;
    for (Node x : q.node(k).fn.new_points(root)) d.insert(x);
    family.push_back(std::move(d));
    for (std::size_t leaf : q.leaves())
      if (q.tree_leq(k, leaf)) {
        r.values[q.node(k).fn] = label.at(q.node(leaf).fn);
        break;
      }
  }
  auto ds = delta_system(family, t);
  r.delta_root = ds.root.size();
  r.delta_members = ds.members.size();
  std::vector<std::size_t> reps;
  for (std::size_t k : lev) {
    bool fresh = std::none_of(reps.begin(), reps.end(), [&](std::size_t o) {
      return isomorphic_over(t, q.node(o).fn, q.node(k).fn, root.dom()).has_value();
    });
    if (fresh) reps.push_back(k);
  }
  r.iso_classes = reps.size();
  return r;
}

std::optional<Nat> decide_oracle(const Fragment& p, const LeafLabeling& label, Nat m,
                                 const AmbientTree& t, const GrowthSequences& g,
                                 const NormShape& shape) {
  LocalCheck local{p, t, g, shape, m, {}};
  const Nat budget = work_budget();
  Nat steps = 0;
  const Nat top = std::max<Nat>(p.depth(), 1);
  std::optional<Nat> best;
  std::vector<bool> keep(p.size(), false);
  keep[p.root()] = true;

  auto evaluate = [&] {
    if (++steps > budget) throw BudgetError("decide oracle exceeded the step budget");
    for (Nat ell = 0; ell < (best ? *best : top); ++ell) {
      bool ok = true;
      for (std::size_t k : p.level(ell)) {
        if (!keep[k]) continue;
        std::optional<Nat> seen;
        for (std::size_t leaf : p.leaves()) {
          if (!keep[leaf] || !p.tree_leq(k, leaf)) continue;
          Nat v = label.at(p.node(leaf).fn);
          if (seen && *seen != v) ok = false;
          seen = v;
        }
      }
      if (ok) {
        best = ell;
        return;
      }
    }
  };
  // Assign a successor subset to every kept internal node in index order.
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (best && *best == 0) return;
    while (k < p.size() && (!keep[k] || !p.internal(k))) ++k;
    if (k == p.size()) {
      evaluate();
      return;
    }
    const auto& kids = p.children(k);
    for (Mask s = local.full(k); s > 0; --s) {
      if (!local.ok(k, s)) continue;
      for (std::size_t j = 0; j < kids.size(); ++j) keep[kids[j]] = s >> j & 1;
      rec(k + 1);
      for (std::size_t kid : kids) keep[kid] = false;
    }
  };
  rec(0);
  return best;
}

}  // namespace cl
