#include "creature_lab/ops.hpp"

#include <algorithm>

namespace cl {

namespace {

[[noreturn]] void fail(const std::string& clause, const std::string& why) {
  throw PreconditionError("clause " + clause + ": " + why);
}

void require_valid(const SimpleCreature& c, const GrowthSequences& g, const AmbientTree& t,
                   const std::string& clause) {
  auto r = validate_shape(c, g, t);
  if (!r.ok()) fail(clause, "not a simple creature, " + r.first_failure());
}

}  // namespace

GlueResult glue(const SimpleCreature& c, const std::vector<std::vector<SpecFn>>& ext, Nat kstar,
                const AmbientTree& t, const GrowthSequences& g) {
  if (!is_spec(t, c.base)) fail("(a)", "base is not a specialization function");
  require_valid(c, g, t, "(b)");
  if (norm0(c, t, g) == 0) fail("(b)", "norm0(c) = 0");
  const Nat i = c.i;
  if (kstar <= 1) fail("(c)", "kstar must exceed 1");
  if (Nat(c.val.size()) * kstar > g.n1[i]) fail("(c)", "|val| * kstar > n1[i]");
  if (ext.size() != c.val.size()) fail("(d)", "one extension family per value element");

  Nat ell = 0;
  std::vector<SpecFn> out;
  for (std::size_t e = 0; e < c.val.size(); ++e) {
    const SpecFn& eta = c.val[e];
    if (ext[e].size() != kstar) fail("(d)", "need kstar extensions of " + eta.str());
    for (const auto& rho : ext[e]) {
      if (!eta.subset_of(rho)) fail("(d)", rho.str() + " does not extend " + eta.str());
      if (!is_spec(t, rho, g.n3[i])) fail("(d)", rho.str() + " not in spec_n3[i]");
      if (rho.size() >= g.n2[i]) fail("(d)", rho.str() + " has |dom| >= n2[i]");
      for (auto& [x, v] : rho.entries())
        if (!t.contains(x)) fail("(d)", "node " + std::to_string(x) + " not in tree");
      ell = std::max<Nat>(ell, rho.size() + 1);
      out.push_back(rho);
    }
    for (Nat k1 = 0; k1 < kstar; ++k1)
      for (Nat k2 = k1 + 1; k2 < kstar; ++k2)
        for (Node x1 : ext[e][k1].new_points(eta))
          for (Node x2 : ext[e][k2].new_points(eta))
            if (t.comparable(x1, x2))
              fail("(e)", "new points " + std::to_string(x1) + " and " + std::to_string(x2) +
                              " are comparable");
  }
  GlueResult r;
  r.ell_star = ell;
  r.d = make_simple(i, c.base, std::move(out));
  // A creature needs |val| < n1[i]; the premise only bounds it by n1[i].
  if (r.d.val.size() >= g.n1[i]) fail("(c)", "glued value range reaches n1[i]");
  r.m0 = std::min({norm0(c, t, g), log2_ceil_ratio(g.n2[i], ell), kstar - 1});
  return r;
}

FillResult fill(const SimpleCreature& c, const std::vector<Node>& xs, const AmbientTree& t,
                const GrowthSequences& g, FillOptions opt) {
  require_valid(c, g, t, "(a)");
  const Nat i = c.i, k = norm0(c, t, g), m = xs.size();
  if (k < 1) fail("(b)", "norm0(c) = 0");
  if (k > g.n1[i]) fail("(b)", "norm0(c) > n1[i]");
  if (m < 1 || m > k || m > shr_floor(g.n2[i], k)) fail("(c)", "need 1 <= m <= min(k, n2/2^k)");
  for (std::size_t a = 0; a < xs.size(); ++a) {
    if (!t.contains(xs[a])) fail("(c)", "node " + std::to_string(xs[a]) + " not in tree");
    for (std::size_t b = a + 1; b < xs.size(); ++b)
      if (xs[a] == xs[b]) fail("(c)", "repeated node " + std::to_string(xs[a]));
  }
  const Nat tuples_per = binomial(k, m);
  if (Nat(c.val.size()) * tuples_per > g.n1[i]) fail("(d)", "|val| * C(k,m) > n1[i]");

  auto above_some_x = [&](Node y) {
    return std::any_of(xs.begin(), xs.end(), [&](Node x) { return t.below(x, y); });
  };
  for (const auto& eta : c.val) {
    Nat cnt = 0;
    for (auto& [y, v] : eta.entries()) cnt += above_some_x(y);
    if (cnt >= i) fail("(e)", eta.str() + " has " + std::to_string(cnt) + " points above the x's");
  }

  std::set<Nat> forbidden;
  if (!opt.skip_avoidance) {
    for (const auto& eta : c.val)
      for (auto& [y, v] : eta.entries())
        if (above_some_x(y)) forbidden.insert(v);
    for (auto& [y, v] : c.base.entries())
      for (Node x : xs)
        if (t.comparable(x, y)) forbidden.insert(v);
  }

  FillResult r;
  r.k = k;
  r.m = m;
  // k values suffice for the norm. With m = k they give a single tuple, so every output
  // agrees on the x's and clause (d) fails; one spare value fixes that when it fits.
  Nat want = k;
  if (m == k && Nat(c.val.size()) * (k + 1) < g.n1[i]) ++want;
  for (Nat z = 0; z < g.n3[i] && r.pool.size() < want; ++z)
    if (!forbidden.count(z)) r.pool.push_back(z);
  if (r.pool.size() < k) throw DomainError("fill: fewer than k admissible values below n3[i]");
  const Nat ps = r.pool.size();

  std::vector<bool> mask(ps, false);
  std::fill(mask.begin(), mask.begin() + m, true);
  do {
    std::vector<Nat> tup;
    for (Nat j = 0; j < ps; ++j)
      if (mask[j]) tup.push_back(r.pool[j]);
    r.tuples.push_back(tup);
  } while (std::prev_permutation(mask.begin(), mask.end()));

  std::vector<SpecFn> out;
  for (const auto& eta : c.val)
    for (const auto& tup : r.tuples) {
      SpecFn nu = eta;
      for (Nat j = 0; j < m; ++j)
        if (!nu.defined(xs[j])) nu = nu.with(xs[j], tup[j]);
      if (is_spec(t, nu, g.n3[i]) && nu.size() < g.n2[i]) out.push_back(nu);
    }
  r.d = make_simple(i, c.base, std::move(out));
  if (r.d.val.empty()) throw DomainError("fill: no admissible extension survived");
  if (r.d.val.size() >= g.n1[i]) throw DomainError("fill: value range reaches n1[i]");
  return r;
}

RebaseResult rebase(const SimpleCreature& c, const SpecFn& eta_star, const AmbientTree& t,
                    const GrowthSequences& g) {
  require_valid(c, g, t, "(a)");
  const Nat i = c.i, k = norm0(c, t, g);
  if (k < 1) fail("(b)", "norm0(c) = 0");
  if (!c.base.subset_of(eta_star)) fail("(c)", "eta* does not extend the base");
  if (!is_spec(t, eta_star, g.n3[i])) fail("(c)", "eta* not in spec_n3[i]");
  if (eta_star.size() > g.n2_prev(i)) fail("(c)", "|dom eta*| > n2[i-1]");
  if (i > 0 && !is_spec(t, eta_star, g.n3[i - 1])) fail("(c)", "eta* not in spec_n3[i-1]");
  for (auto& [x, v] : eta_star.entries())
    if (!t.contains(x)) fail("(c)", "node " + std::to_string(x) + " not in tree");

  const auto fresh = eta_star.new_points(c.base);
  for (Node x : fresh)
    for (const auto& nu : c.val)
      if (nu.defined(x))
        fail("(c)", "new point " + std::to_string(x) + " of eta* lies in dom " + nu.str());

  RebaseResult r;
  r.ell2 = fresh.size();
  NodeSet ys;
  for (const auto& nu : c.val)
    for (Node y : nu.new_points(c.base))
      if (std::any_of(fresh.begin(), fresh.end(), [&](Node x) { return t.below(x, y); }))
        ys.insert(y);
  r.ell1 = ys.size();
  const Nat ell = r.ell1 + r.ell2;
  if (ell >= k) fail("(d)", "ell1* + ell2* >= norm0(c)");
  const Nat n2 = g.n2[i];
  if (shr_floor(n2, k) + r.ell2 > shr_floor(n2, k - ell))
    fail("(d)", "n2[i]/2^k too small to absorb ell2* points");

  std::vector<SpecFn> out;
  for (const auto& nu : c.val) {
    auto u = try_union(t, nu, eta_star);
    if (!u || !is_spec(t, *u, g.n3[i]) || u->size() >= n2) continue;
    out.push_back(*u);
  }
  r.d = make_simple(i, eta_star, std::move(out));
  if (r.d.val.empty()) throw DomainError("rebase: empty value range");
  r.bound = k - ell;
  return r;
}

SimpleCreature shrink_to_norm(const SimpleCreature& c, Nat k, const AmbientTree& t,
                              const GrowthSequences& g) {
  if (k < 1) fail("pre", "k must be at least 1");
  const Nat have = norm0(c, t, g);
  if (k > have) fail("pre", "k > norm0(c)");
  SimpleCreature cur = c;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < cur.val.size() && cur.val.size() > 1;) {
      SimpleCreature trial = cur;
      trial.val.erase(trial.val.begin() + e);
      if (norm0(trial, t, g) >= k) {
        cur = std::move(trial);
        changed = true;
      } else {
        ++e;
      }
    }
  }
  return cur;
}

SplitResult bigness_split(const SimpleCreature& c, const std::vector<SpecFn>& val1,
                          const std::vector<SpecFn>& val2, const AmbientTree& t,
                          const GrowthSequences& g, Measure m, Nat k, const NormShape& shape) {
  std::set<SpecFn> whole(c.val.begin(), c.val.end()), parts(val1.begin(), val1.end());
  parts.insert(val2.begin(), val2.end());
  if (whole != parts) fail("pre", "parts do not cover the value range exactly");
  if (m == Measure::norm && k == 0) fail("pre", "counter k must be positive");

  SplitResult r;
  auto side = [&](const std::vector<SpecFn>& v, std::optional<Nat>& nat,
                  std::optional<LgRatio>& real) {
    if (v.empty()) return;
    auto s = make_simple(c.i, c.base, v);
    auto n = simple_norms(s, t, g);
    if (m == Measure::norm1) nat = n.norm1;
    if (m == Measure::norm2) nat = n.norm2;
    if (m == Measure::norm) real = f_eval(shape, n.normhalf, k);
  };
  side(val1, r.value1, r.real1);
  side(val2, r.value2, r.real2);

  bool two = false;
  if (m == Measure::norm) {
    if (!r.real1) two = true;
    else if (r.real2) two = !lg_geq(*r.real1, *r.real2);
  } else {
    if (!r.value1) two = true;
    else if (r.value2) two = *r.value2 > *r.value1;
  }
  r.side = two ? 2 : 1;
  r.survivor = make_simple(c.i, c.base, two ? val2 : val1);
  return r;
}

bool halving_prop2(Nat nh, Nat k, Nat kprime, const NormShape& shape) {
  return lg_geq(f_eval(shape, nh, kprime), f_eval(shape, nh, k), -1);
}

bool halving_prop3(Nat nh, Nat k, Nat kprime, const NormShape& shape) {
  return lg_geq(f_eval(shape, kprime + 1, k), f_eval(shape, nh, k));
}

HalveResult halve(const Creature& c, Nat normhalf, const NormShape& shape) {
  if (c.k == 0) throw DomainError("creature counter k must be positive");
  const Nat k = c.k;
  if (!lg_geq_int(f_eval(shape, normhalf, k), 1))
    throw PreconditionError("halve needs norm >= 1");
  HalveResult r;
  r.rounded = halving_witness(shape, normhalf, k);
  r.kprime = r.rounded;
  if (!halving_prop2(normhalf, k, r.kprime, shape) || !halving_prop3(normhalf, k, r.kprime, shape)) {
    // Integer repair: a k' with both (2) and (3) if one exists, else keep (2) and push the
    // (3) margin as far as it goes.
    std::optional<Nat> both, best;
    for (Nat cand = k + 1; cand < normhalf; ++cand) {
      if (!halving_prop2(normhalf, k, cand, shape)) continue;
      if (!both && halving_prop3(normhalf, k, cand, shape)) both = cand;
      if (!best || !lg_geq(f_eval(shape, *best + 1, k), f_eval(shape, cand + 1, k))) best = cand;
    }
    std::optional<Nat> pick = both;
    if (!pick && !halving_prop2(normhalf, k, r.kprime, shape)) pick = best;
    if (!pick && !halving_prop2(normhalf, k, r.kprime, shape))
      throw PreconditionError("no integer k' keeps the norm drop within 1");
    if (pick) {
      r.kprime = *pick;
      r.repaired = true;
    }
  }
  r.out = Creature{c.c, r.kprime};
  r.prop2 = halving_prop2(normhalf, k, r.kprime, shape);
  r.prop3 = halving_prop3(normhalf, k, r.kprime, shape);
  return r;
}

HalveResult halve(const Creature& c, const AmbientTree& t, const GrowthSequences& g,
                  const NormShape& shape) {
  return halve(c, simple_norms(c.c, t, g).normhalf, shape);
}

}  // namespace cl
