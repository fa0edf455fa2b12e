#include "creature_lab/generate.hpp"

#include <algorithm>

namespace cl {

Nat splitmix64(Nat& state) {
  Nat z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng instance_rng(Nat seed, Nat index) {
  Nat s = seed * 0x100000001b3ULL + index;
  Nat a = splitmix64(s);
  return Rng(a ^ splitmix64(s));
}

Nat uniform(Rng& r, Nat lo, Nat hi) {
  if (hi <= lo) return lo;
  return lo + r() % (hi - lo + 1);
}

GrowthSequences toy_growth() { return make_growth(1, {2, 5}, {2, 8}, {1, 8}); }

GrowthSequences lab_growth() {
  return make_growth(4, {2, 4, 16, 256, 65536}, {3, 15, 255, 65535, 65536},
                     {64, 256, 1024, 65536, 1u << 20});
}

AmbientTree random_forest(Rng& r, Nat width, Nat height, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<std::pair<Node, Node>> edges;
  std::vector<Node> extra;
  std::vector<Node> prev;
  for (Nat w = 0; w < width; ++w)
    if (keep(r)) prev.push_back(Node(w));
  if (prev.empty()) prev.push_back(Node(uniform(r, 0, width - 1)));
  extra = prev;
  for (Nat l = 1; l < height && !prev.empty(); ++l) {
    std::vector<Node> cur;
    for (Nat w = 0; w < width; ++w) {
      if (!keep(r)) continue;
      Node x = Node(l * width + w);
      edges.emplace_back(prev[uniform(r, 0, prev.size() - 1)], x);
      cur.push_back(x);
    }
    prev = cur;
  }
  return AmbientTree::build(width, edges, extra);
}

AmbientTree chain_forest(Nat width, Nat height) {
  std::vector<std::pair<Node, Node>> edges;
  std::vector<Node> extra;
  for (Nat w = 0; w < width; ++w) extra.push_back(Node(w));
  for (Nat l = 1; l < height; ++l)
    for (Nat w = 0; w < width; ++w) edges.emplace_back(Node((l - 1) * width + w), Node(l * width + w));
  return AmbientTree::build(width, edges, extra);
}

std::vector<AmbientTree> sweep_forests() {
  return {
      AmbientTree::build(2, {{0, 2}, {0, 3}, {2, 4}, {3, 5}}, {1}),
      AmbientTree::build(3, {{0, 3}, {0, 4}, {1, 5}, {3, 6}, {4, 7}, {5, 8}}),
      AmbientTree::build(3, {{0, 3}, {0, 4}, {0, 5}, {3, 6}, {3, 7}, {4, 8}, {6, 9}}, {1}),
  };
}

std::optional<SimpleCreature> random_creature(Rng& r, const AmbientTree& t,
                                              const GrowthSequences& g, Nat i,
                                              const CreatureGen& opt, int tries) {
  const auto& nodes = t.nodes();
  if (nodes.empty() || i > g.imax) return std::nullopt;
  const Nat bound = opt.value_bound ? std::min(opt.value_bound, g.n3[i]) : g.n3[i];
  for (int attempt = 0; attempt < tries; ++attempt) {
    std::vector<SpecFn::Entry> base;
    if (i > 0) {
      Nat want = uniform(r, g.n2_prev(i - 1) + 1, std::min<Nat>(g.n2_prev(i), nodes.size()));
      if (i == 1) want = uniform(r, 1, std::min<Nat>(g.n2[0], nodes.size()));
      std::vector<Node> pool(nodes);
      std::shuffle(pool.begin(), pool.end(), r);
      for (Nat k = 0; k < want && k < pool.size(); ++k)
        base.emplace_back(pool[k], uniform(r, 0, g.n3[i - 1] - 1));
    }
    SpecFn b;
    try {
      b = SpecFn(base);
    } catch (const DomainError&) {
      continue;
    }
    if (kind_of(b, g) != i || !is_spec(t, b, i ? g.n3[i - 1] : 1)) continue;

    std::vector<Node> free;
    for (Node x : nodes)
      if (!b.defined(x)) free.push_back(x);
    const Nat nval = uniform(r, 1, std::min(opt.max_val, g.n1[i] - 1));
    std::vector<SpecFn> val;
    for (Nat e = 0; e < nval; ++e) {
      SpecFn eta = b;
      Nat extra = uniform(r, 0, std::min<Nat>(opt.max_new, free.size()));
      std::vector<Node> pool(free);
      std::shuffle(pool.begin(), pool.end(), r);
      for (Nat k = 0; k < extra; ++k) eta = eta.with(pool[k], uniform(r, 0, bound - 1));
      val.push_back(eta);
    }
    auto c = make_simple(i, b, std::move(val));
    if (validate_creature(c, g, t).ok()) return c;
  }
  return std::nullopt;
}

Fragment build_fragment(const AmbientTree& t, const FragmentPlan& plan) {
  const auto& pts = t.nodes();
  if (plan.dom.size() != plan.depth + 1 || plan.branching.size() < plan.depth)
    throw DomainError("fragment plan sizes do not match the depth");
  if (plan.dom.back() > pts.size()) throw DomainError("tree too small for the plan");
  Nat B = 1;
  for (Nat b : plan.branching) B = std::max(B, b);

  std::vector<FNode> nodes;
  std::vector<SpecFn::Entry> root;
  for (Nat k = 0; k < plan.dom[0]; ++k) root.emplace_back(pts[k], t.level(pts[k]) * B);
  nodes.push_back(FNode{SpecFn(root), 0, std::nullopt, plan.klabel.empty() ? 1 : plan.klabel[0]});
  std::vector<std::size_t> frontier{0};
  for (Nat l = 0; l < plan.depth; ++l) {
    std::vector<std::size_t> next;
    for (std::size_t par : frontier) {
      for (Nat j = 0; j < plan.branching[l]; ++j) {
        SpecFn f = nodes[par].fn;
        for (Nat k = plan.dom[l]; k < plan.dom[l + 1]; ++k) f = f.with(pts[k], t.level(pts[k]) * B + j);
        Nat kl = l + 1 < plan.klabel.size() ? plan.klabel[l + 1] : 1;
        nodes.push_back(FNode{std::move(f), l + 1, par, kl});
        next.push_back(nodes.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return Fragment(plan.depth, std::move(nodes), plan.coverage);
}

namespace {
// Cumulative domain sizes per kind that leave norm0 >= 1 one level down.
const Nat dom_lo[] = {0, 1, 4, 16, 256}, dom_hi[] = {0, 2, 7, 31, 300};
}  // namespace

FragmentPlan random_plan(Rng& r, const AmbientTree& t, Nat depth, Nat max_branch, Nat i0) {
  if (i0 < 1 || i0 + depth > 4) throw DomainError("lab plans need 1 <= i0 and i0 + depth <= 4");
  FragmentPlan p;
  p.depth = depth;
  const Nat cap = t.nodes().size();
  for (Nat l = 0; l <= depth; ++l)
    p.dom.push_back(std::min(uniform(r, dom_lo[i0 + l], dom_hi[i0 + l]), cap));
  for (Nat l = 0; l < depth; ++l)
    p.branching.push_back(uniform(r, 2, i0 + l == 1 ? std::min<Nat>(3, max_branch) : max_branch));
  const Nat W = t.width();
  if (p.dom[depth] % W == 0 && t.initial_segment(p.dom[depth] / W).size() == p.dom[depth])
    p.coverage = Coverage{0, p.dom[depth] / W, {}};
  return p;
}

SmoothCase smoothen_case(Rng& r, const AmbientTree& t, Nat depth) {
  if (depth < 1 || depth > 2) throw DomainError("smoothen cases have depth 1 or 2");
  const Nat W = t.width();
  SmoothCase c;
  FragmentPlan plan;
  plan.depth = depth;
  // Filling m points costs up to m of norm0 and needs |val| C(norm0, m) <= n1[i];
  // these ranges keep the norm1 loss at one.
  if (depth == 1) {
    c.alpha = uniform(r, 5, 7);
    plan.dom = {uniform(r, 4, 7), W * c.alpha - 1};
    plan.branching = {uniform(r, 4, 5)};
  } else {
    c.alpha = uniform(r, 64, 70);
    plan.dom = {uniform(r, 4, 7), uniform(r, 16, 31), W * c.alpha - uniform(r, 1, 3)};
    plan.branching = {uniform(r, 2, 4), uniform(r, 5, 7)};
  }
  c.m = depth == 1 ? 0 : uniform(r, 0, 1);
  c.p = build_fragment(t, plan);
  return c;
}

Fragment thin_above(Rng& r, const Fragment& p, Nat level, Nat n, const AmbientTree& t,
                    const GrowthSequences& g) {
  std::vector<bool> drop(p.size(), false);
  for (std::size_t k : p.level(level)) {
    if (!p.internal(k)) continue;
    auto kids = p.children(k);
    std::shuffle(kids.begin(), kids.end(), r);
    std::vector<SpecFn> val;
    for (std::size_t c : kids) val.push_back(p.node(c).fn);
    for (std::size_t c : kids) {
      if (val.size() <= 1) break;
      std::vector<SpecFn> trial;
      for (const auto& f : val)
        if (f != p.node(c).fn) trial.push_back(f);
      Creature cp{make_simple(p.creature(k, g).i, p.node(k).fn, trial), p.node(k).klabel};
      if (!validate_creature(cp.c, g, t).ok()) continue;
      auto nm = norms(cp, t, g);
      if (nm.normhalf < cp.k || !lg_geq_int(nm.norm, std::int64_t(n))) continue;
      val = std::move(trial);
      drop[c] = true;
    }
  }
  std::vector<FNode> out;
  std::vector<std::optional<std::size_t>> where(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto par = p.node(k).parent;
    if (drop[k] || (par && !where[*par])) continue;
    FNode f = p.node(k);
    if (par) f.parent = *where[*par];
    where[k] = out.size();
    out.push_back(std::move(f));
  }
  return Fragment(p.depth(), std::move(out), p.coverage());
}

}  // namespace cl
