#include "creature_lab/verify.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace cl {

// ---------------------------------------------------------------------------
// Oracles

Nat oracle_norm0(const SimpleCreature& c, const AmbientTree& t, const GrowthSequences& g,
                 Nat budget) {
  if (budget == 0) budget = work_budget();
  auto rep = validate_shape(c, g, t);
  if (!rep.ok()) throw DomainError("oracle_norm0 of invalid creature: clause " + rep.first_failure());
  const Nat cap = g.n1[c.i], n2 = g.n2[c.i], n3 = g.n3[c.i];
  const auto& branches = t.branches();
  if (branches.empty()) return cap;
  const Nat B = branches.size();
  Nat steps = 0;

  for (Nat k = 1; k <= cap; ++k) {
    // Guard before the sweep: sum_s C(n3, s) * B^k * |val|.
    double est = 0;
    for (Nat s = 0; s <= std::min(k, n3); ++s) est += double(binomial(n3, s));
    for (Nat j = 0; j < k; ++j) est *= double(B);
    est *= double(c.val.size());
    if (est + double(steps) > double(budget))
      throw BudgetError("oracle_norm0: k = " + std::to_string(k) + " needs about " +
                        std::to_string(Nat(est)) + " steps");

    std::vector<std::size_t> tuple(k, 0);
    bool done = false;
    while (!done) {
      NodeSet u;
      for (std::size_t b : tuple) u.insert(branches[b].begin(), branches[b].end());
      // Values each element exposes on the union; empty optional when (β) fails.
      std::vector<std::optional<std::vector<Nat>>> exposed;
      for (const auto& eta : c.val) {
        bool small = k >= 63 ? eta.size() == 0 : Nat(eta.size()) * (Nat{1} << k) <= n2;
        if (!small) {
          exposed.emplace_back();
          continue;
        }
        std::vector<Nat> vs;
        for (auto& [x, v] : eta.entries())
          if (!c.base.defined(x) && u.count(x)) vs.push_back(v);
        exposed.emplace_back(std::move(vs));
      }
      for (Nat s = 0; s <= std::min(k, n3); ++s) {
        std::vector<Nat> a(s);
        for (Nat j = 0; j < s; ++j) a[j] = j;
        while (true) {
          bool survivor = false;
          for (const auto& e : exposed) {
            ++steps;
            if (!e) continue;
            bool clean = std::none_of(e->begin(), e->end(), [&](Nat v) {
              return std::find(a.begin(), a.end(), v) != a.end();
            });
            if (clean) {
              survivor = true;
              break;
            }
          }
          if (!survivor) return k - 1;
          // Next s-subset of [0, n3) in lexicographic order.
          Nat j = s;
          while (j > 0 && a[j - 1] == n3 - s + j - 1) --j;
          if (j == 0) break;
          ++a[j - 1];
          for (Nat l = j; l < s; ++l) a[l] = a[l - 1] + 1;
        }
      }
      std::size_t pos = 0;
      while (pos < k && ++tuple[pos] == B) tuple[pos++] = 0;
      done = pos == k;
    }
  }
  return cap;
}

namespace {

NodeSet dom_meet(const SpecFn& a, const SpecFn& b) {
  NodeSet r;
  for (auto& [x, v] : a.entries())
    if (b.defined(x)) r.insert(x);
  return r;
}

}  // namespace

std::vector<std::vector<std::optional<std::size_t>>> all_projections(const Fragment& p,
                                                                     const Fragment& q,
                                                                     const GrowthSequences& g,
                                                                     std::size_t limit) {
  std::vector<std::vector<std::optional<std::size_t>>> found;
  auto ip = p.kind(g), iq = q.kind(g);
  if (!ip || !iq || *ip > *iq) return found;
  const Nat s = *iq - *ip;
  std::vector<std::optional<std::size_t>> map(q.size());

  // q's nodes come parent-first, so one pass in index order suffices.
  std::function<void(std::size_t)> go = [&](std::size_t j) {
    if (found.size() >= limit) return;
    if (j == q.size()) {
      found.push_back(map);
      return;
    }
    const auto& qn = q.node(j);
    std::vector<std::size_t> cands;
    if (!qn.parent) {
      for (std::size_t k = 0; k < p.size(); ++k)
        if (p.node(k).level == s) cands.push_back(k);
    } else if (map[*qn.parent]) {
      if (!p.internal(*map[*qn.parent])) {
        map[j].reset();
        go(j + 1);
        return;
      }
      cands = p.children(*map[*qn.parent]);
    } else {
      map[j].reset();
      go(j + 1);
      return;
    }
    for (std::size_t k : cands) {
      const auto& pn = p.node(k);
      if (pn.level != qn.level + s) continue;                                     // (b)
      if (!pn.fn.subset_of(qn.fn)) continue;                                      // (e)
      if (q.internal(j) && p.internal(k) && qn.klabel < pn.klabel) continue;      // (d)
      if (qn.parent) {                                                            // (f)
        const auto& par = q.node(*qn.parent);
        if (dom_meet(pn.fn, par.fn) != p.node(*map[*qn.parent]).fn.dom()) continue;
      }
      map[j] = k;
      go(j + 1);
    }
    map[j].reset();
  };
  go(0);
  return found;
}

// ---------------------------------------------------------------------------
// Instances and shrinking

namespace {

enum class Status { pass, fail, skip, budget };

struct Outcome {
  Status status = Status::pass;
  std::string message;
  std::map<std::string, Nat> stats;
  std::optional<Json> counterexample;
};

[[noreturn]] void violated(const std::string& what) { throw std::logic_error(what); }
void expect(bool ok, const std::string& what) {
  if (!ok) violated(what);
}

// Creature-level instance: everything the creature suites need to replay a check.
struct CInst {
  AmbientTree t;
  GrowthSequences g;
  SimpleCreature c;
  Nat k = 1;
  Nat kstar = 0;
  std::vector<Node> xs;
  SpecFn eta;
  std::vector<std::vector<SpecFn>> ext;  // aligned with c.val
};

using CCheck = std::function<void(const CInst&, std::map<std::string, Nat>&)>;

// Runs one check; logic_error marks a violated invariant, PreconditionError an
// instance outside the claim's premises.
Outcome run_check(const CCheck& check, const CInst& in) {
  Outcome o;
  try {
    if (!validate_creature(in.c, in.g, in.t).ok()) throw PreconditionError("input creature invalid");
    check(in, o.stats);
  } catch (const std::logic_error& e) {
    o.status = Status::fail;
    o.message = e.what();
  } catch (const PreconditionError& e) {
    o.status = Status::skip;
    o.message = e.what();
  } catch (const BudgetError& e) {
    o.status = Status::budget;
    o.message = e.what();
  } catch (const DomainError& e) {
    o.status = Status::fail;
    o.message = std::string("construction failed: ") + e.what();
  }
  return o;
}

bool still_fails(const CCheck& check, const CInst& in) {
  return run_check(check, in).status == Status::fail;
}

NodeSet used_nodes(const CInst& in) {
  NodeSet u = in.c.base.dom();
  for (const auto& e : in.c.val)
    for (auto& [x, v] : e.entries()) u.insert(x);
  for (const auto& row : in.ext)
    for (const auto& e : row)
      for (auto& [x, v] : e.entries()) u.insert(x);
  for (auto& [x, v] : in.eta.entries()) u.insert(x);
  u.insert(in.xs.begin(), in.xs.end());
  return u;
}

std::optional<AmbientTree> without_leaf(const AmbientTree& t, Node leaf) {
  std::vector<std::pair<Node, Node>> edges;
  for (auto& e : t.edges())
    if (e.second != leaf) edges.push_back(e);
  std::vector<Node> extra;
  for (Node x : t.nodes())
    if (x != leaf) extra.push_back(x);
  if (extra.empty()) return std::nullopt;
  return AmbientTree::build(t.width(), edges, extra);
}

// Greedy local minimization: drop value elements, prune unused tree leaves, lower values.
CInst shrink(const CCheck& check, CInst in, Nat& steps) {
  bool changed = true;
  while (changed && steps < 400) {
    changed = false;
    for (std::size_t e = 0; e < in.c.val.size() && in.c.val.size() > 1; ++e) {
      CInst trial = in;
      trial.c.val.erase(trial.c.val.begin() + e);
      if (!trial.ext.empty()) trial.ext.erase(trial.ext.begin() + e);
      ++steps;
      if (still_fails(check, trial)) {
        in = std::move(trial);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    NodeSet used = used_nodes(in);
    // Leaf pruning pays off only on small forests; each trial recomputes every norm.
    if (in.t.nodes().size() <= 16)
    for (Node leaf : in.t.leaves()) {
      if (used.count(leaf)) continue;
      auto t2 = without_leaf(in.t, leaf);
      if (!t2) continue;
      CInst trial = in;
      trial.t = *t2;
      ++steps;
      if (still_fails(check, trial)) {
        in = std::move(trial);
        changed = true;
        break;
      }
    }
    if (changed || in.t.nodes().size() > 16) continue;
    for (std::size_t e = 0; e < in.c.val.size() && !changed; ++e)
      for (auto& [x, v] : in.c.val[e].entries()) {
        if (in.c.base.defined(x) || v == 0) continue;
        CInst trial = in;
        trial.c.val[e] = in.c.val[e].without(x).with(x, v - 1);
        std::vector<SpecFn> val = trial.c.val;
        auto ext = trial.ext;
        trial.c = make_simple(in.c.i, in.c.base, val);
        if (trial.c.val.size() != val.size()) continue;  // collapsed into a duplicate
        if (!ext.empty() && trial.c.val != val) continue;  // would misalign ext rows
        ++steps;
        if (still_fails(check, trial)) {
          in = std::move(trial);
          changed = true;
          break;
        }
      }
  }
  return in;
}

Json cinst_json(const CInst& in) {
  Fixture f;
  f.params = in.g;
  f.tree = in.t;
  f.creatures.push_back(Creature{in.c, std::max<Nat>(in.k, 1)});
  Json j = to_json(f);
  Json extra = Json::object();
  extra["k"] = in.k;
  extra["kstar"] = in.kstar;
  extra["xs"] = in.xs;
  extra["eta"] = spec_to_json(in.eta)["assignments"];
  Json ext = Json::array();
  for (const auto& row : in.ext) {
    Json r = Json::array();
    for (const auto& e : row) r.push_back(spec_to_json(e)["assignments"]);
    ext.push_back(r);
  }
  extra["ext"] = ext;
  j["instance"] = extra;
  return j;
}

Outcome run_creature(const CCheck& check, const CInst& in) {
  Outcome o = run_check(check, in);
  if (o.status != Status::fail) return o;
  Nat steps = 0;
  CInst m = shrink(check, in, steps);
  Outcome again = run_check(check, m);
  o.counterexample = cinst_json(m);
  o.message = again.message;
  o.stats["shrink_steps"] += steps;
  return o;
}

// ---------------------------------------------------------------------------
// Generators

AmbientTree small_forest(Rng& r) {
  for (;;) {
    auto t = random_forest(r, uniform(r, 2, 3), uniform(r, 2, 4), 0.75);
    if (t.nodes().size() >= 3) return t;
  }
}

std::vector<Node> shuffled(Rng& r, std::vector<Node> v) {
  std::shuffle(v.begin(), v.end(), r);
  return v;
}

// Base of pairwise incomparable nodes valued 0, plus a fan of one-point extensions.
std::optional<SimpleCreature> fan_creature(Rng& r, const AmbientTree& t, const GrowthSequences& g,
                                           Nat max_val) {
  const Nat i = 1;
  for (int attempt = 0; attempt < 50; ++attempt) {
    auto nodes = shuffled(r, t.nodes());
    Nat bs = uniform(r, 1, std::min<Nat>(g.n2[0], 2));
    std::vector<SpecFn::Entry> be;
    for (Node x : nodes) {
      if (be.size() == bs) break;
      if (std::none_of(be.begin(), be.end(), [&](auto& e) { return t.comparable(e.first, x); }))
        be.emplace_back(x, 0);
    }
    SpecFn base(be);
    std::vector<Node> free;
    for (Node x : nodes)
      if (!base.defined(x)) free.push_back(x);
    if (free.empty()) continue;
    std::vector<SpecFn> val;
    Nat s = uniform(r, 1, std::min<Nat>(2, free.size()));
    for (Nat j = 0; j < s; ++j) {
      Nat nv = uniform(r, 2, 3);
      std::vector<Nat> vals;
      while (vals.size() < nv) {
        Nat v = uniform(r, 0, g.n3[i] - 1);
        if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
      }
      for (Nat v : vals) val.push_back(base.with(free[j], v));
    }
    if (uniform(r, 0, 2) == 0) val.push_back(base);
    if (s == 2 && uniform(r, 0, 3) == 0)
      val.push_back(base.with(free[0], uniform(r, 0, g.n3[i] - 1)).with(free[1], uniform(r, 0, g.n3[i] - 1)));
    std::shuffle(val.begin(), val.end(), r);
    if (val.size() > max_val) val.resize(max_val);
    auto c = make_simple(i, base, val);
    if (validate_creature(c, g, t).ok()) return c;
  }
  return std::nullopt;
}

std::optional<SimpleCreature> toy_creature(Rng& r, const AmbientTree& t, const GrowthSequences& g,
                                           Nat max_val = 4) {
  if (uniform(r, 0, 1) == 0) return fan_creature(r, t, g, max_val);
  CreatureGen opt;
  opt.max_val = max_val;
  return random_creature(r, t, g, 1, opt, 50);
}

// Creature with positive norm0 over a fresh small forest; nullopt after a few tries.
std::optional<CInst> toy_positive(Rng& r, Nat max_val, Nat min_norm = 1) {
  for (int attempt = 0; attempt < 40; ++attempt) {
    CInst in;
    in.g = toy_growth();
    in.t = small_forest(r);
    auto c = toy_creature(r, in.t, in.g, max_val);
    if (!c) continue;
    if (norm0(*c, in.t, in.g) < min_norm) continue;
    in.c = *c;
    return in;
  }
  return std::nullopt;
}

const AmbientTree& lab_chains() {
  static const AmbientTree t = chain_forest(4, 12);
  return t;
}

const AmbientTree& smooth_chains() {
  static const AmbientTree t = chain_forest(4, 80);
  return t;
}

// Creature at some internal node of a random lab fragment.
std::optional<SimpleCreature> lab_creature(Rng& r, Nat max_branch) {
  const auto& t = lab_chains();
  auto g = lab_growth();
  Nat i0 = uniform(r, 2, 3);
  auto plan = random_plan(r, t, 1, max_branch, i0);
  auto p = build_fragment(t, plan);
  return p.creature(p.root(), g);
}

Fragment lab_fragment(Rng& r, Nat depth, Nat max_branch) {
  return build_fragment(lab_chains(), random_plan(r, lab_chains(), depth, max_branch));
}

Outcome skip(std::string why) {
  Outcome o;
  o.status = Status::skip;
  o.message = std::move(why);
  return o;
}

// Runs a fragment-level body with the same error classification as creature checks.
Outcome run_plain(const std::function<void(std::map<std::string, Nat>&)>& body) {
  Outcome o;
  try {
    body(o.stats);
  } catch (const std::logic_error& e) {
    o.status = Status::fail;
    o.message = e.what();
  } catch (const PreconditionError& e) {
    o.status = Status::skip;
    o.message = e.what();
  } catch (const BudgetError& e) {
    o.status = Status::budget;
    o.message = e.what();
  } catch (const DomainError& e) {
    o.status = Status::fail;
    o.message = std::string("construction failed: ") + e.what();
  }
  return o;
}

Json fragments_json(const std::vector<Fragment>& ps, const GrowthSequences& g, const AmbientTree& t,
                    const std::vector<LeafLabeling>& labs = {}) {
  Fixture f;
  f.params = g;
  f.tree = t;
  f.conditions = ps;
  f.labelings = labs;
  return to_json(f);
}

// ---------------------------------------------------------------------------
// Suites

struct Ctx {
  bool inject_fill_fault = false;
};

using Suite = std::function<Outcome(Rng&, const Ctx&)>;

std::optional<std::string> naive_growth_violation(const GrowthSequences& g) {
  const std::size_t n = g.imax + 1;
  if (g.n1.size() != n || g.n2.size() != n || g.n3.size() != n) return "length";
  for (std::size_t i = 0; i < n; ++i)
    if (!g.n1[i] || !g.n2[i] || !g.n3[i]) return "positivity";
  for (std::size_t i = 0; i < n; ++i) {
    if (!((unsigned __int128)i * g.n1[i] < g.n3[i])) return "(1.1)";
    if (i + 1 < n && !(g.n2[i] < g.n1[i + 1])) return "(1.2)";
    if (i + 1 < n && !((unsigned __int128)g.n1[i] * g.n1[i] <= g.n1[i + 1])) return "(1.3)";
    if (!(g.n1[i] <= g.n2[i])) return "(1.4)";
  }
  return std::nullopt;
}

Outcome suite_growth(Rng& r, const Ctx&) {
  return run_plain([&](auto& st) {
    GrowthSequences g;
    g.imax = uniform(r, 0, 3);
    Nat a = uniform(r, 1, 4);
    for (std::size_t i = 0; i <= g.imax; ++i) {
      g.n1.push_back(a);
      a = a * a + uniform(r, 0, 3);
    }
    for (std::size_t i = 0; i <= g.imax; ++i) {
      Nat hi = i < g.imax ? g.n1[i + 1] - 1 : g.n1[i] + 5;
      g.n2.push_back(uniform(r, g.n1[i], std::max(g.n1[i], hi)));
      g.n3.push_back(i * g.n1[i] + 1 + uniform(r, 0, 5));
    }
    if (uniform(r, 0, 1)) {
      st["perturbed"]++;
      std::size_t i = uniform(r, 0, g.imax);
      auto& seq = uniform(r, 0, 2) == 0 ? g.n1 : uniform(r, 0, 1) ? g.n2 : g.n3;
      seq[i] = uniform(r, 0, 2 * seq[i]);
    }
    auto mine = growth_violation(g);
    auto ref = naive_growth_violation(g);
    expect(mine.has_value() == ref.has_value(),
           "growth validator disagrees with the direct check (" + (ref ? *ref : "valid") + ")");
    if (mine) {
      expect(mine->find("violated") != std::string::npos, "violation message unnamed: " + *mine);
      st["invalid"]++;
    }
    std::size_t d = uniform(r, 0, 3);
    auto def = make_growth(d);
    expect(!naive_growth_violation(def), "default profile fails the direct check");
    for (std::size_t i = 1; i <= d; ++i) {
      Nat k = uniform(r, 0, def.n1[i]);
      expect((unsigned __int128)(i - 1) * def.n1[i] + k < def.n3[i],
             "(i-1) n1[i] + k < n3[i] fails at i=" + std::to_string(i));
    }
  });
}

Nat log_uniform(Rng& r, Nat lo, Nat hi) {
  Nat bits = uniform(r, 0, 16);
  Nat x = uniform(r, 0, (Nat{1} << bits));
  return std::clamp(x, lo, hi);
}

Outcome suite_normshape(Rng& r, const Ctx&) {
  return run_plain([&](auto& st) {
    const auto& s = default_shape();
    const Nat top = Nat{1} << 16;
    Nat n1 = log_uniform(r, 1, top), n2 = log_uniform(r, 1, top), k1 = log_uniform(r, 1, top),
        k2 = log_uniform(r, 1, top);
    std::vector<Nat> v{n1, n2, k1, k2};
    std::sort(v.rbegin(), v.rend());
    // Monotone in n, antitone in k, on the sorted quadruple n1 >= n2 >= k2 >= k1.
    expect(lg_geq(f_eval(s, v[0], v[3]), f_eval(s, v[1], v[2])),
           "monotonicity fails at " + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," +
               std::to_string(v[2]) + "," + std::to_string(v[3]));
    Nat n = log_uniform(r, 1, top), k = log_uniform(r, 1, top);
    auto f = f_eval(s, n, k);
    expect(lg_geq(f_eval(s, (n + 1) / 2, k), f, -1), "halving n costs more than 1 at n=" + std::to_string(n) +
                                                          " k=" + std::to_string(k));
    if (n <= k) expect(f.is_zero(), "f > 0 with n <= k at n=" + std::to_string(n));
    if (!lg_geq_int(f, 1)) return;
    st["f>=1"]++;
    Nat kp = halving_witness(s, n, k);
    expect(k < kp && kp < n, "k < k' < n fails at n=" + std::to_string(n) + " k=" + std::to_string(k));
    std::vector<Nat> probes{kp + 1, n - 1, (kp + n) / 2, uniform(r, kp + 1, n - 1)};
    for (Nat np : probes) {
      if (np <= kp || np >= n) continue;
      auto lhs = f_eval(s, np, k);
      expect(lg_geq(lhs, f, -1), "witness slack fails: f(" + std::to_string(np) + "," + std::to_string(k) +
                                     ") < f(" + std::to_string(n) + "," + std::to_string(k) +
                                     ") - 1 with k'=" + std::to_string(kp));
    }
  });
}

const CCheck check_norm_oracle = [](const CInst& in, auto& st) {
  Nat fast = norm0(in.c, in.t, in.g);
  Nat slow = oracle_norm0(in.c, in.t, in.g);
  st["norm0=" + std::to_string(fast)]++;
  expect(fast == slow, "norm0 " + std::to_string(fast) + " != oracle " + std::to_string(slow));
};

Outcome suite_norm_oracle(Rng& r, const Ctx&) {
  CInst in;
  in.g = toy_growth();
  in.t = small_forest(r);
  std::optional<SimpleCreature> c;
  if (uniform(r, 0, 9) == 0) c = random_creature(r, in.t, in.g, 0);
  else c = toy_creature(r, in.t, in.g);
  if (!c) return skip("no valid creature");
  in.c = *c;
  return run_creature(check_norm_oracle, in);
}

// Oracle confirmation where affordable; the reduction is itself oracle-checked elsewhere.
void confirm_norm(const SimpleCreature& d, const AmbientTree& t, const GrowthSequences& g, Nat fast,
                  std::map<std::string, Nat>& st) {
  try {
    Nat slow = oracle_norm0(d, t, g, 5000000);
    expect(fast == slow, "norm0 " + std::to_string(fast) + " != oracle " + std::to_string(slow));
    st["oracle_confirmed"]++;
  } catch (const BudgetError&) {
    st["oracle_over_budget"]++;
  }
}

const CCheck check_glue = [](const CInst& in, auto& st) {
  auto res = glue(in.c, in.ext, in.kstar, in.t, in.g);
  const auto& d = res.d;
  expect(validate_creature(d, in.g, in.t).ok(),
         "glued creature invalid: " + validate_creature(d, in.g, in.t).first_failure());
  expect(d.base == in.c.base, "glued base differs from eta*");
  Nat n = norm0(d, in.t, in.g);
  confirm_norm(d, in.t, in.g, n, st);
  expect(n >= res.m0, "norm0(d) = " + std::to_string(n) + " < m0 = " + std::to_string(res.m0));
  Nat sc = normstar(in.c, in.g), sd = normstar(d, in.g);
  expect(sd + log2_ceil(in.kstar) >= sc, "normstar fell by more than lg(k*)");
  if (sd + in.kstar < sc) violated("normstar fell by more than k*");
  st["m0=" + std::to_string(res.m0)]++;
};

Outcome suite_glue(Rng& r, const Ctx&) {
  for (int attempt = 0; attempt < 30; ++attempt) {
    auto base = toy_positive(r, 2);
    if (!base) continue;
    CInst in = *base;
    const Nat n1 = in.g.n1[in.c.i];
    Nat top = std::min<Nat>(n1 / in.c.val.size(), (n1 - 1) / in.c.val.size());
    if (top < 2) continue;
    in.kstar = uniform(r, 2, top);
    in.ext.clear();
    for (const auto& eta : in.c.val) {
      std::vector<SpecFn> row;
      std::vector<Node> taken;
      for (Nat k = 0; k < in.kstar; ++k) {
        SpecFn rho = eta;
        std::vector<Node> mine;
        Nat want = uniform(r, 0, 2);
        for (Node x : shuffled(r, in.t.nodes())) {
          if (mine.size() == want) break;
          if (rho.defined(x)) continue;
          if (std::any_of(taken.begin(), taken.end(), [&](Node y) { return in.t.comparable(x, y); }))
            continue;
          SpecFn trial = rho.with(x, uniform(r, 0, in.g.n3[in.c.i] - 1));
          if (!is_spec(in.t, trial, in.g.n3[in.c.i]) || trial.size() >= in.g.n2[in.c.i]) continue;
          rho = trial;
          mine.push_back(x);
        }
        taken.insert(taken.end(), mine.begin(), mine.end());
        row.push_back(rho);
      }
      in.ext.push_back(row);
    }
    Outcome o = run_creature(check_glue, in);
    if (o.status == Status::skip) continue;
    o.stats["premise_attempts"] += attempt + 1;
    return o;
  }
  return skip("no premise-satisfying glue instance");
}

std::set<Nat> fill_forbidden(const CInst& in) {
  auto above = [&](Node y) {
    return std::any_of(in.xs.begin(), in.xs.end(), [&](Node x) { return in.t.below(x, y); });
  };
  std::set<Nat> f;
  for (const auto& eta : in.c.val)
    for (auto& [y, v] : eta.entries())
      if (above(y)) f.insert(v);
  for (auto& [y, v] : in.c.base.entries())
    for (Node x : in.xs)
      if (in.t.comparable(x, y)) f.insert(v);
  return f;
}

CCheck make_check_fill(bool fault) {
  return [fault](const CInst& in, auto& st) {
    FillOptions opt;
    opt.skip_avoidance = fault;
    auto res = fill(in.c, in.xs, in.t, in.g, opt);
    const auto& d = res.d;
    auto forb = fill_forbidden(in);
    for (const auto& tup : res.tuples)
      for (Nat z : tup) expect(!forb.count(z), "value " + std::to_string(z) + " is forbidden");
    for (const auto& nu : d.val)
      for (Node x : in.xs)
        expect(nu.defined(x), nu.str() + " misses x = " + std::to_string(x));
    if (auto rep = validate_creature(d, in.g, in.t); !rep.ok())
      violated("(alpha) filled creature invalid: " + rep.first_failure() +
               (res.m == res.k && res.pool.size() == res.k ? " (m = k, single value tuple)" : ""));
    expect(d.val.size() <= in.g.n1[d.i], "|val(d)| > n1[i]");
    Nat n = norm0(d, in.t, in.g);
    confirm_norm(d, in.t, in.g, n, st);
    expect(n + res.m >= res.k, "norm0(d) = " + std::to_string(n) + " < k - m = " +
                                   std::to_string(res.k) + " - " + std::to_string(res.m));
    if (res.pool.size() == res.k)
      expect(normstar(d, in.g) + log2_ceil(binomial(res.k, res.m)) >= normstar(in.c, in.g),
             "normstar fell by more than log_2 C(k,m)");
    else
      st["spare_value"]++;
    st["m=" + std::to_string(res.m)]++;
  };
}

Outcome suite_fill(Rng& r, const Ctx& ctx) {
  const CCheck check = make_check_fill(ctx.inject_fill_fault);
  for (int attempt = 0; attempt < 30; ++attempt) {
    auto base = toy_positive(r, 4);
    if (!base) continue;
    CInst in = *base;
    Nat k = norm0(in.c, in.t, in.g);
    Nat mmax = std::min(k, shr_floor(in.g.n2[in.c.i], k));
    if (mmax < 1) continue;
    Nat m = uniform(r, 1, mmax);
    if (in.c.val.size() * binomial(k, m) > in.g.n1[in.c.i]) continue;
    // Premise (e) with i = 1: no domain point may sit above an x.
    std::vector<Node> ok;
    for (Node x : shuffled(r, in.t.nodes())) {
      bool clear = std::none_of(in.c.val.begin(), in.c.val.end(), [&](const SpecFn& e) {
        return std::any_of(e.entries().begin(), e.entries().end(),
                           [&](auto& ent) { return in.t.below(x, ent.first); });
      });
      if (clear) ok.push_back(x);
    }
    if (ok.size() < m) continue;
    in.xs.assign(ok.begin(), ok.begin() + m);
    Outcome o = run_creature(check, in);
    if (o.status == Status::skip) continue;
    o.stats["premise_attempts"] += attempt + 1;
    return o;
  }
  return skip("no premise-satisfying fill instance");
}

const CCheck check_rebase = [](const CInst& in, auto& st) {
  auto res = rebase(in.c, in.eta, in.t, in.g);
  const auto& d = res.d;
  expect(validate_creature(d, in.g, in.t).ok(),
         "rebased creature invalid: " + validate_creature(d, in.g, in.t).first_failure());
  expect(d.base == in.eta, "base(d) != eta*");
  Nat n = norm0(d, in.t, in.g);
  confirm_norm(d, in.t, in.g, n, st);
  expect(n >= res.bound, "norm0(d) = " + std::to_string(n) + " < bound " + std::to_string(res.bound));
  Nat sc = normstar(in.c, in.g), sd = normstar(d, in.g);
  expect(sd >= sc, "normstar decreased under rebase");
  st[sd == sc ? "normstar_same" : "normstar_up"]++;
  st["ell=" + std::to_string(res.ell1 + res.ell2)]++;
};

Outcome suite_rebase(Rng& r, const Ctx&) {
  for (int attempt = 0; attempt < 30; ++attempt) {
    auto base = toy_positive(r, 4);
    if (!base) continue;
    CInst in = *base;
    Nat k = norm0(in.c, in.t, in.g);
    const Nat room = in.g.n2_prev(in.c.i) - std::min<Nat>(in.g.n2_prev(in.c.i), in.c.base.size());
    Nat ell2 = uniform(r, 0, std::min<Nat>(room, k - 1));
    NodeSet used;
    for (const auto& e : in.c.val)
      for (auto& [x, v] : e.entries()) used.insert(x);
    SpecFn eta = in.c.base;
    for (Node z : shuffled(r, in.t.nodes())) {
      if (eta.size() == in.c.base.size() + ell2) break;
      if (used.count(z) || eta.defined(z)) continue;
      // Values below n3[i-1] = 1: new points must avoid every comparable base point.
      SpecFn trial = eta.with(z, 0);
      if (is_spec(in.t, trial, in.g.n3[in.c.i - 1])) eta = trial;
    }
    in.eta = eta;
    Outcome o = run_creature(check_rebase, in);
    if (o.status == Status::skip) continue;
    o.stats["premise_attempts"] += attempt + 1;
    return o;
  }
  return skip("no premise-satisfying rebase instance");
}

const CCheck check_shrink = [](const CInst& in, auto& st) {
  auto d = shrink_to_norm(in.c, in.k, in.t, in.g);
  for (const auto& e : d.val)
    expect(std::binary_search(in.c.val.begin(), in.c.val.end(), e), "val(c') not inside val(c)");
  Nat n = norm0(d, in.t, in.g);
  confirm_norm(d, in.t, in.g, n, st);
  if (n != in.k) {
    bool base_in = std::binary_search(in.c.val.begin(), in.c.val.end(), in.c.base);
    violated("norm0(c') = " + std::to_string(n) + " != k = " + std::to_string(in.k) +
             (base_in ? " (base in val)" : ""));
  }
  st["removed"] += in.c.val.size() - d.val.size();
};

Outcome suite_shrink(Rng& r, const Ctx&) {
  auto base = toy_positive(r, 4);
  if (!base) return skip("no creature with positive norm0");
  CInst in = *base;
  in.k = uniform(r, 1, norm0(in.c, in.t, in.g));
  return run_creature(check_shrink, in);
}

std::vector<std::pair<std::vector<SpecFn>, std::vector<SpecFn>>> bipartitions(
    const std::vector<SpecFn>& val) {
  std::vector<std::pair<std::vector<SpecFn>, std::vector<SpecFn>>> out;
  const std::size_t n = val.size();
  for (Nat mask = 1; mask + 1 < (Nat{1} << n); ++mask) {
    std::vector<SpecFn> a, b;
    for (std::size_t j = 0; j < n; ++j) (mask >> j & 1 ? a : b).push_back(val[j]);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

const CCheck check_bigness = [](const CInst& in, auto& st) {
  auto whole = norms(Creature{in.c, in.k}, in.t, in.g);
  for (auto& [a, b] : bipartitions(in.c.val)) {
    auto na = norms(Creature{make_simple(in.c.i, in.c.base, a), in.k}, in.t, in.g);
    auto nb = norms(Creature{make_simple(in.c.i, in.c.base, b), in.k}, in.t, in.g);
    if (whole.norm1 >= 1)
      expect(std::max(na.norm1, nb.norm1) + 1 >= whole.norm1, "norm1 split loses more than 1");
    if (whole.norm2 >= 1)
      expect(std::max(na.norm2, nb.norm2) + 1 >= whole.norm2, "norm2 split loses more than 1");
    expect(lg_geq(na.norm, whole.norm, -1) || lg_geq(nb.norm, whole.norm, -1),
           "norm split loses more than 1");
    for (Measure m : {Measure::norm1, Measure::norm2, Measure::norm}) {
      auto s = bigness_split(in.c, a, b, in.t, in.g, m, in.k);
      if (m == Measure::norm1) expect(s.value1 && s.value2 && *(s.side == 1 ? s.value1 : s.value2) ==
                                          std::max(na.norm1, nb.norm1), "split picked the weaker side");
      if (m == Measure::norm2) expect(*(s.side == 1 ? s.value1 : s.value2) == std::max(na.norm2, nb.norm2),
                                      "split picked the weaker side");
      if (m == Measure::norm) {
        const auto& mine = *(s.side == 1 ? s.real1 : s.real2);
        const auto& other = *(s.side == 1 ? s.real2 : s.real1);
        expect(lg_geq(mine, other), "split picked the weaker side");
      }
    }
    st["bipartitions"]++;
  }
  st["norm1>=1"] += whole.norm1 >= 1;
};

Outcome suite_bigness(Rng& r, const Ctx&) {
  CInst in;
  if (uniform(r, 0, 1) == 0) {
    in.g = toy_growth();
    in.t = small_forest(r);
    auto c = toy_creature(r, in.t, in.g);
    if (!c) return skip("no valid creature");
    in.c = *c;
  } else {
    in.g = lab_growth();
    in.t = lab_chains();
    auto c = lab_creature(r, 6);
    if (!c) return skip("no lab creature");
    in.c = *c;
  }
  if (in.c.val.size() < 2) return skip("singleton value range");
  Nat nh = simple_norms(in.c, in.t, in.g).normhalf;
  in.k = uniform(r, 1, std::max<Nat>(nh, 1));
  return run_creature(check_bigness, in);
}

const CCheck check_halving = [](const CInst& in, auto& st) {
  Creature c{in.c, in.k};
  Nat nh = simple_norms(in.c, in.t, in.g).normhalf;
  auto before = f_eval(default_shape(), nh, in.k);
  if (!lg_geq_int(before, 1)) throw PreconditionError("norm < 1");
  auto h = halve(c, in.t, in.g);
  st[h.repaired ? "repaired" : "rounded_ok"]++;
  expect(h.out.c == in.c, "(1) simple part changed");
  expect(h.out.k > in.k, "k' does not exceed k");
  auto after = f_eval(default_shape(), nh, h.out.k);
  expect(lg_geq(after, before, -1), "(2) norm fell by more than 1");
  // (3) by direct sweep over normhalf(c') and counters kk >= k'.
  for (Nat nh2 = 1; nh2 <= 2 * nh + 2; ++nh2)
    for (Nat kk = h.out.k; kk < nh2; ++kk)
      if (!f_eval(default_shape(), nh2, kk).is_zero())
        expect(lg_geq(f_eval(default_shape(), nh2, in.k), before),
               "(3) fails: normhalf(c') = " + std::to_string(nh2) + ", k' = " +
                   std::to_string(h.out.k) + ", normhalf(c) = " + std::to_string(nh) +
                   ", k = " + std::to_string(in.k));
};

Outcome suite_halving(Rng& r, const Ctx&) {
  CInst in;
  in.g = lab_growth();
  in.t = lab_chains();
  auto c = lab_creature(r, 6);
  if (!c) return skip("no lab creature");
  in.c = *c;
  Nat nh = simple_norms(in.c, in.t, in.g).normhalf;
  if (nh < 2) return skip("normhalf below 2 leaves no norm >= 1");
  in.k = uniform(r, 1, nh / 2);
  return run_creature(check_halving, in);
}

void check_projection_sane(const Fragment& p, const Fragment& q, const Projection& pr,
                           const GrowthSequences& g, const std::string& what) {
  expect(pr.ok, what + ": leq rejected at " + pr.clause + " " + pr.witness);
  auto all = all_projections(p, q, g, 2);
  expect(all.size() == 1, what + ": " + std::to_string(all.size()) + " projections");
  expect(all.front() == pr.map, what + ": brute force finds a different projection");
}

Outcome suite_leq(Rng& r, const Ctx&) {
  return run_plain([&](auto& st) {
    const auto& t = lab_chains();
    auto g = lab_growth();
    Nat D = uniform(r, 1, 3);
    Fragment p = lab_fragment(r, D, 3);
    expect(validate_condition(p, t, g).ok(), "generated p invalid");
    auto id = leq(p, p, t, g);
    expect(id.ok, "leq(p,p) fails");
    for (std::size_t j = 0; j < p.size(); ++j) expect(id.map[j] == j, "leq(p,p) is not the identity");

    Nat lvl = uniform(r, 0, D - 1), n = uniform(r, 0, lvl);
    Fragment q = thin_above(r, p, lvl, n, t, g);
    st[q == p ? "thin_trivial" : "thin_nontrivial"]++;
    expect(validate_condition(q, t, g).ok(), "thinned q invalid");
    auto pq = leq(p, q, t, g);
    check_projection_sane(p, q, pq, g, "p <= q");
    expect(leq_n(p, q, n, t, g).ok, "p <=_n q fails for a thinning above level n");
    for (Nat m = 0; m <= D + 1; ++m) {
      bool a = leq_n(p, q, m + 1, t, g).ok, b = leq_n(p, q, m, t, g).ok;
      expect(!a || b, "<=_{n+1} not inside <=_n at n=" + std::to_string(m));
      expect(!b || leq(p, q, t, g).ok, "<=_n not inside <=");
    }

    Nat lvl2 = uniform(r, 0, D - 1);
    Fragment s = thin_above(r, q, lvl2, 0, t, g);
    auto qs = leq(q, s, t, g), ps = leq(p, s, t, g);
    expect(qs.ok && ps.ok, "transitivity: p <= q <= s but not p <= s");
    for (std::size_t j = 0; j < s.size(); ++j) {
      auto mid = qs.map[j];
      auto comp = mid ? pq.map[*mid] : std::nullopt;
      expect(comp == ps.map[j], "composed projection differs from the direct one");
    }

    // Leaves carry no creature, so their kind is not pinned; restrict at internal nodes.
    std::vector<std::size_t> inner;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p.internal(j)) inner.push_back(j);
    std::size_t eta = inner[uniform(r, 0, inner.size() - 1)];
    auto cone = restrict(p, eta);
    expect(validate_condition(cone, t, g).ok(), "restriction invalid");
    auto pc = leq(p, cone, t, g);
    expect(pc.ok, "p <= p^<eta> fails at " + pc.clause);
    for (std::size_t j = 0; j < cone.size(); ++j)
      expect(pc.map[j] && p.node(*pc.map[j]).fn == cone.node(j).fn, "restriction map not inclusion");
    st["depth=" + std::to_string(D)]++;
  });
}

Outcome suite_claim28(Rng& r, const Ctx&) {
  return run_plain([&](auto& st) {
    const auto& t = lab_chains();
    auto g = lab_growth();
    Nat D = uniform(r, 1, 3);
    Fragment p = lab_fragment(r, D, 3);
    Nat n = uniform(r, 0, D - 1);
    Fragment q = thin_above(r, p, uniform(r, n, D - 1), n, t, g);
    Fragment s = thin_above(r, q, uniform(r, n, D - 1), n, t, g);
    const Fragment* fr[] = {&p, &q, &s};
    auto ip = *p.kind(g);
    for (const Fragment* f : fr) {
      auto rep = validate_condition(*f, t, g);
      expect(rep.ok(), "fragment invalid: " + rep.first_failure());
      for (Nat l = 0; l <= f->depth(); ++l)                                              // (2)
        expect(f->level(l).size() < g.n1[ip + l], "(2) level " + std::to_string(l) + " too large");
      for (const auto& nd : f->nodes()) {                                               // (11)
        bool ok = (nd.level == 0 && ip == 0 && nd.fn.empty()) ||
                  (ip + nd.level >= 1 && nd.fn.size() < g.n2[ip + nd.level - 1]);
        expect(ok, "(11) domain bound fails at " + nd.fn.str());
      }
    }
    auto pq = leq(p, q, t, g), qs = leq(q, s, t, g), ps = leq(p, s, t, g);
    check_projection_sane(p, q, pq, g, "(1) p <= q");                                  // (1)
    check_projection_sane(q, s, qs, g, "(1) q <= s");
    expect(ps.ok, "(3) p <= s fails");                                                   // (3)
    for (std::size_t j = 0; j < s.size(); ++j) {
      auto mid = qs.map[j];
      expect((mid ? pq.map[*mid] : std::nullopt) == ps.map[j], "(3) composed map differs");
    }
    for (std::size_t j = 0; j < q.size(); ++j) {                                        // (4)(5)
      auto pj = pq.map[j];
      if (!pj || !q.internal(j) || !p.internal(*pj)) continue;
      auto cq = q.creature(j, g), cp = p.creature(*pj, g);
      expect(cq.i == cp.i, "(4) kind changes along the projection");
      expect(norm0(cq, t, g) <= norm0(cp, t, g), "(5) norm0 grows along the projection");
      st["(4)(5) nodes"]++;
    }
    expect(leq_n(p, q, n, t, g).ok && leq_n(q, s, n, t, g).ok, "thinning not <=_n");   // (6)
    expect(leq_n(p, s, n, t, g).ok, "(6) <=_n not transitive");
    for (Nat m = 0; m <= D; ++m) {                                                      // (7)
      if (leq_n(p, s, m + 1, t, g).ok) expect(leq_n(p, s, m, t, g).ok, "(7) <=_{n+1} not in <=_n");
      if (leq_n(p, s, m, t, g).ok) expect(leq(p, s, t, g).ok, "(7) <=_n not in <=");
    }
    for (std::size_t j = 0; j < p.size(); ++j) {                                        // (8)
      if (!p.internal(j)) continue;
      auto c = p.creature(j, g);
      Nat have = norm0(c, t, g);
      if (have < 1) continue;
      Nat k = uniform(r, 1, have);
      auto d = shrink_to_norm(c, k, t, g);
      expect(norm0(d, t, g) == k, "(8) shrink misses the exact norm");
      for (const auto& e : d.val)
        expect(std::binary_search(c.val.begin(), c.val.end(), e), "(8) val(c') not inside val(c)");
      st["(8) shrinks"]++;
      break;
    }
  });
}

Outcome suite_fusion(Rng& r, const Ctx&) {
  return run_plain([&](auto& st) {
    const auto& t = lab_chains();
    auto g = lab_growth();
    const Nat D = 3;
    Fragment q0 = lab_fragment(r, D, 4);
    Nat len = uniform(r, 1, 4);
    std::vector<Nat> pool{0, 1, 2, 3};
    std::shuffle(pool.begin(), pool.end(), r);
    std::vector<Nat> ns(pool.begin(), pool.begin() + len);
    std::sort(ns.begin(), ns.end());
    std::vector<Fragment> qs{q0};
    for (std::size_t i = 0; i + 1 < len; ++i) {
      const Fragment& cur = qs.back();
      Fragment nxt = ns[i] < D ? thin_above(r, cur, uniform(r, ns[i], D - 1), ns[i], t, g) : cur;
      expect(leq_n(cur, nxt, ns[i], t, g).ok, "thinning is not a <=_n step");
      st[nxt == cur ? "steps_trivial" : "steps_nontrivial"]++;
      qs.push_back(std::move(nxt));
    }
    Fragment q = fuse(qs, ns, t, g);
    expect(validate_condition(q, t, g).ok(), "fused fragment invalid");
    for (std::size_t i = 0; i < qs.size(); ++i)
      expect(leq_n(qs[i], q, ns[i], t, g).ok, "q not >=_n above q_" + std::to_string(i));
    st["len=" + std::to_string(len)]++;
  });
}

Outcome suite_smoothen(Rng& r, const Ctx&) {
  const auto& t = smooth_chains();
  auto g = lab_growth();
  Nat D = uniform(r, 1, 2);
  auto sc = smoothen_case(r, t, D);
  Outcome o;
  SmoothenStats ss;
  std::optional<Fragment> q;
  try {
    q = smoothen(sc.p, sc.alpha, sc.m, t, g, &ss);
  } catch (const PreconditionError& e) {
    return skip(e.what());
  } catch (const DomainError& e) {
    // The construction names the node where the norm budget runs out.
    o = skip(e.what());
    o.stats["blocked"]++;
    return o;
  }
  o = run_plain([&](auto& st) {
    auto rep = validate_condition(*q, t, g);
    expect(rep.ok(), "smoothen output invalid: " + rep.first_failure());
    auto cls = classify(*q, t, g);
    expect(cls.smooth && cls.alpha == sc.alpha, "output not smooth at alpha");
    auto ln = leq_n(sc.p, *q, sc.m, t, g);
    expect(ln.ok, "p <=_m q fails at " + ln.clause);
    for (std::size_t j = 0; j < q->size(); ++j) {
      auto pj = ln.pr.map[j];
      if (!pj || !q->internal(j) || !sc.p.internal(*pj)) continue;
      Nat a = simple_norms(q->creature(j, g), t, g).norm1;
      Nat b = simple_norms(sc.p.creature(*pj, g), t, g).norm1;
      expect(a + 1 >= b, "norm1 drops by more than 1 at " + q->node(j).fn.str());
    }
    st["fills"] += ss.fills;
    st["rebases"] += ss.rebases;
    st["points_added"] += ss.points_added;
    st["depth=" + std::to_string(D)]++;
  });
  if (o.status == Status::fail) o.counterexample = fragments_json({sc.p, *q}, g, t);
  return o;
}

std::set<SpecFn> upward_closure(const Fragment& p, const std::vector<std::size_t>& gens) {
  std::set<SpecFn> x;
  for (std::size_t k = 0; k < p.size(); ++k)
    for (std::size_t s : gens)
      if (p.tree_leq(s, k)) x.insert(p.node(k).fn);
  return x;
}

Outcome suite_purify(Rng& r, const Ctx&) {
  const auto& t = lab_chains();
  auto g = lab_growth();
  Nat D = uniform(r, 2, 3);
  Fragment p = lab_fragment(r, D, 3);
  std::vector<std::size_t> gens;
  Nat ng = uniform(r, 0, 3);
  for (Nat j = 0; j < ng; ++j) gens.push_back(uniform(r, 0, p.size() - 1));
  auto x = upward_closure(p, gens);
  Nat kstar = uniform(r, 0, D - 1);
  std::optional<PurifyResult> res;
  Outcome o = run_plain([&](auto& st) {
    res = purify(p, x, kstar, t, g);
    const Fragment& q = res->q;
    auto rep = validate_condition(q, t, g);
    expect(rep.ok(), "purified q invalid: " + rep.first_failure());
    expect(res->leq_kstar && leq_n(p, q, kstar, t, g).ok, "p <=_kstar q fails");
    for (std::size_t k = 0; k < q.size(); ++k) {
      auto pk = p.find(q.node(k).fn);
      expect(pk && p.node(*pk).klabel == q.node(k).klabel, "q is not p restricted to dom(q)");
      if (q.node(k).parent)
        expect(p.node(*pk).parent && p.node(*p.node(*pk).parent).fn == q.node(*q.node(k).parent).fn,
               "q changes a tree edge");
    }
    std::vector<std::size_t> front;
    for (auto& c : res->front) front.push_back(c.node);
    expect(is_front(q, front), "reported front is not a front of q");
    for (auto& c : res->front) {
      expect(q.node(c.node).level >= kstar, "front node below kstar");
      bool any_in = false, all_from = true;
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (!q.tree_leq(c.node, j)) continue;
        bool in = x.count(q.node(j).fn) > 0;
        any_in |= in;
        if (c.level_in_x && q.node(j).level >= *c.level_in_x && !in) all_from = false;
      }
      if (c.level_in_x) {
        expect(all_from, "cone claimed inside X from level " + std::to_string(*c.level_in_x));
        st["cones_in_x"]++;
      } else {
        expect(!any_in, "cone claimed disjoint from X meets X");
        st["cones_off_x"]++;
      }
    }
    for (std::size_t k : res->changed) {
      auto pk = *p.find(q.node(k).fn);
      auto nq = norms(Creature{q.creature(k, g), q.node(k).klabel}, t, g);
      auto np = norms(Creature{p.creature(pk, g), p.node(pk).klabel}, t, g);
      expect(nq.norm2 + 1 >= np.norm2, "norm2 drops by more than 1 at " + q.node(k).fn.str());
      expect(lg_geq(nq.norm, np.norm, -1), "norm drops by more than 1 at " + q.node(k).fn.str());
      st["changed"]++;
    }
    st[x.empty() ? "x_empty" : "x_nonempty"]++;
  });
  if (o.status == Status::fail) {
    Fixture f;
    f.params = g;
    f.tree = t;
    f.conditions.push_back(p);
    if (res) f.conditions.push_back(res->q);
    Json j = to_json(f);
    Json xs = Json::array();
    for (const auto& s : x) xs.push_back(spec_to_json(s)["assignments"]);
    j["instance"] = {{"x", xs}, {"kstar", kstar}};
    o.counterexample = j;
  }
  return o;
}

LeafLabeling random_labeling(Rng& r, const Fragment& p) {
  LeafLabeling lab;
  const Nat mode = uniform(r, 0, 2);
  // mode 0: uniform noise; 1: constant per level-1 cone; 2: constant except one cone.
  std::map<std::size_t, Nat> cone_value;
  std::size_t odd = p.depth() >= 1 && !p.level(1).empty()
                        ? p.level(1)[uniform(r, 0, p.level(1).size() - 1)]
                        : 0;
  for (std::size_t leaf : p.leaves()) {
    std::size_t top = leaf;
    while (p.node(top).level > 1 && p.node(top).parent) top = *p.node(top).parent;
    Nat v;
    if (mode == 0) v = uniform(r, 0, 1);
    else if (mode == 1) {
      if (!cone_value.count(top)) cone_value[top] = uniform(r, 0, 2);
      v = cone_value[top];
    } else v = top == odd ? uniform(r, 0, 1) : 0;
    lab[p.node(leaf).fn] = v;
  }
  return lab;
}

Outcome suite_decide(Rng& r, const Ctx&) {
  const auto& t = lab_chains();
  auto g = lab_growth();
  Nat D = uniform(r, 1, 3);
  Fragment p = lab_fragment(r, D, 3);
  auto lab = random_labeling(r, p);
  Nat m = uniform(r, 0, D);
  std::optional<DecideResult> res;
  Outcome o = run_plain([&](auto& st) {
    res = decide(p, lab, m, t, g);
    auto best = decide_oracle(p, lab, m, t, g);
    if (res->found) {
      expect(validate_condition(res->q, t, g).ok(), "decided q invalid");
      expect(leq_n(p, res->q, m, t, g).ok, "p <=_m q fails");
      expect(decides_at(res->q, lab, res->level), "level cones of q are not label-constant");
      expect(res->level < std::max<Nat>(D, 1), "deciding level not below the depth");
      expect(best.has_value(), "oracle finds no witness but decide does");
      expect(*best == res->level, "decide level " + std::to_string(res->level) +
                                      " is not the minimal " + std::to_string(*best));
      st["found"]++;
      st["level=" + std::to_string(res->level)]++;
      st[res->path]++;
    } else {
      expect(!best.has_value(), "decide reports not-found but the oracle decides at level " +
                                    std::to_string(best.value_or(0)));
      st["not_found"]++;
    }
  });
  if (o.status == Status::fail) {
    std::vector<Fragment> fs{p};
    if (res && res->found) fs.push_back(res->q);
    o.counterexample = fragments_json(fs, g, t, {lab});
    (*o.counterexample)["instance"] = {{"m", m}};
  }
  return o;
}

// Above a weakly smooth p, new domains stay off T_<alpha ∪ u.
void check_fact26(const Fragment& p, const Fragment& q, const NodeSet& guard,
                  const AmbientTree& t, const GrowthSequences& g, std::map<std::string, Nat>& st) {
  auto pr = leq(p, q, t, g);
  expect(pr.ok, "q is not above p: " + pr.clause);
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!pr.map[j]) continue;
    NodeSet meet;
    for (auto& [x, v] : q.node(j).fn.entries())
      if (guard.count(x)) meet.insert(x);
    expect(meet == p.node(*pr.map[j]).fn.dom(),
           "dom(nu) meets T_<alpha ∪ u outside dom(pr(nu)) at " + q.node(j).fn.str());
    st["nodes_checked"]++;
  }
  LeqOptions strict;
  strict.strict_f = true;
  st[leq(p, q, t, g, strict).ok ? "strict_f_holds" : "strict_f_fails"]++;
}

Outcome suite_fact26(Rng& r, const Ctx&) {
  const auto& t = smooth_chains();
  auto g = lab_growth();
  const Nat W = t.width();
  FragmentPlan plan;
  plan.depth = 1;
  Nat alpha = uniform(r, 4, 6);
  Nat usize = uniform(r, 2, 3);
  plan.dom = {uniform(r, 4, 7), W * alpha + usize};
  plan.branching = {uniform(r, 4, 5)};
  NodeSet u;
  for (Nat j = 0; j < usize; ++j) u.insert(Node(W * alpha + j));
  plan.coverage = Coverage{0, alpha, u};
  Fragment p = build_fragment(t, plan);
  NodeSet guard = t.initial_segment(alpha);
  guard.insert(u.begin(), u.end());
  std::optional<Fragment> q;
  Outcome o = run_plain([&](auto& st) {
    auto rep = validate_condition(p, t, g);
    expect(rep.ok(), "weakly smooth p invalid: " + rep.first_failure());
    auto cls = classify(p, t, g);
    expect(cls.weakly_smooth && !cls.smooth, "p not weakly smooth");
    q = thin_above(r, p, 0, 0, t, g);
    check_fact26(p, *q, guard, t, g, st);
    try {
      q = smoothen(p, alpha + 1, 0, t, g);
    } catch (const DomainError&) {
      st["smoothen_blocked"]++;
      return;
    }
    check_fact26(p, *q, guard, t, g, st);
    st["smoothened"]++;
  });
  if (o.status == Status::fail) o.counterexample = fragments_json(q ? std::vector{p, *q} : std::vector{p}, g, t);
  return o;
}

const std::map<std::string, Suite>& suites() {
  static const std::map<std::string, Suite> s = {
      {"growth", suite_growth},       {"normshape", suite_normshape},
      {"norm-oracle", suite_norm_oracle}, {"glue", suite_glue},
      {"fill", suite_fill},           {"rebase", suite_rebase},
      {"shrink", suite_shrink},       {"bigness", suite_bigness},
      {"halving", suite_halving},     {"leq", suite_leq},
      {"fusion", suite_fusion},       {"smoothen", suite_smoothen},
      {"purify", suite_purify},       {"decide", suite_decide},
      {"fact2.6", suite_fact26},      {"claim2.8", suite_claim28},
  };
  return s;
}

// Failure message with numbers and functions masked, for grouping.
std::string failure_tag(const std::string& msg) {
  std::string out;
  int depth = 0;
  for (char ch : msg) {
    if (ch == '{') ++depth;
    if (depth == 0) {
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        if (out.empty() || out.back() != '#') out += '#';
      } else {
        out += ch;
      }
    }
    if (ch == '}' && depth > 0 && --depth == 0) out += "{..}";
  }
  return out.size() > 72 ? out.substr(0, 72) : out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "growth", "normshape", "norm-oracle", "glue",   "fill",   "rebase",  "shrink",  "bigness",
      "halving", "leq",      "fusion",      "smoothen", "purify", "decide", "fact2.6", "claim2.8"};
  return names;
}

int SuiteReport::exit_code() const {
  if (failed) return 1;
  if (budget) return 2;
  return 0;
}

std::string SuiteReport::text() const {
  std::ostringstream o;
  o << "suite: " << suite << "\n";
  o << "count: " << count << "  seed: " << seed << "\n";
  o << "passed: " << passed << "  failed: " << failed << "  skipped: " << skipped
    << "  budget: " << budget << "\n";
  const Nat ran = passed + failed;
  o << "premise hit rate: " << ran << "/" << count << "\n";
  for (auto& [k, v] : stats) o << "  " << k << ": " << v << "\n";
  o << "result: " << (exit_code() == 0 ? "PASS" : exit_code() == 1 ? "FAIL" : "BUDGET") << "\n";
  if (first_failure) {
    o << "first failure: instance " << *first_failure << ": " << failure << "\n";
    if (counterexample) o << "counterexample:\n" << counterexample->dump(2) << "\n";
  }
  return o.str();
}

SuiteReport propcheck(const std::string& suite, Nat count, Nat seed, PropcheckOptions opt) {
  auto it = suites().find(suite);
  if (it == suites().end()) throw DomainError("unknown suite '" + suite + "'");
  Ctx ctx{opt.inject_fill_fault};
  std::vector<Outcome> outs(count);
  auto work = [&](unsigned tid, unsigned jobs) {
    for (Nat i = tid; i < count; i += jobs) {
      Rng r = instance_rng(seed, i);
      outs[i] = it->second(r, ctx);
    }
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    for (auto& th : pool) th.join();
  }
  SuiteReport rep;
  rep.suite = suite;
  rep.count = count;
  rep.seed = seed;
  for (Nat i = 0; i < count; ++i) {
    auto& o = outs[i];
    switch (o.status) {
      case Status::pass: ++rep.passed; break;
      case Status::fail: ++rep.failed; break;
      case Status::skip: ++rep.skipped; break;
      case Status::budget: ++rep.budget; break;
    }
    for (auto& [k, v] : o.stats) rep.stats[k] += v;
    if (o.status == Status::fail) rep.stats["fail: " + failure_tag(o.message)]++;
    if (o.status == Status::fail && !rep.first_failure) {
      rep.first_failure = i;
      rep.failure = o.message;
      rep.counterexample = o.counterexample;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<SimpleCreature> sweep_creatures(const AmbientTree& t, const GrowthSequences& g,
                                            Nat values, Nat max_val) {
  std::vector<SimpleCreature> out;
  auto roots = t.roots();
  if (roots.empty()) return out;
  const Node r0 = roots.front();
  SpecFn base{{r0, 0}};
  auto i = kind_of(base, g);
  if (!i) return out;
  std::vector<SpecFn> pool{base};
  for (Node x : t.nodes()) {
    if (x == r0) continue;
    for (Nat v = 0; v < values && v < g.n3[*i]; ++v) {
      SpecFn e = base.with(x, v);
      if (is_spec(t, e, g.n3[*i])) pool.push_back(e);
    }
  }
  const std::size_t n = pool.size();
  std::vector<std::size_t> idx;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!idx.empty()) {
      std::vector<SpecFn> val;
      for (std::size_t j : idx) val.push_back(pool[j]);
      auto c = make_simple(*i, base, std::move(val));
      if (validate_creature(c, g, t).ok()) out.push_back(std::move(c));
    }
    if (idx.size() == max_val) return;
    for (std::size_t j = from; j < n; ++j) {
      idx.push_back(j);
      rec(j + 1);
      idx.pop_back();
    }
  };
  rec(0);
  return out;
}

Corpus fixture_corpus() {
  Corpus c;
  c.toy = toy_growth();
  c.lab = lab_growth();
  c.forests = sweep_forests();
  c.chains = chain_forest(4, 12);
  Rng r = instance_rng(2024, 0);
  for (std::size_t f = 0; f < c.forests.size(); ++f) {
    const auto& t = c.forests[f];
    Nat got = 0;
    for (int tries = 0; tries < 400 && got < 8; ++tries) {
      auto cr = fan_creature(r, t, c.toy, 4);
      if (!cr) continue;
      c.creatures.emplace_back(f, *cr);
      ++got;
    }
  }
  // The worked example: root 0 with children 2, 3 at width 2.
  c.forests.push_back(AmbientTree::build(2, {{0, 2}, {0, 3}}));
  c.creatures.emplace_back(c.forests.size() - 1,
                           make_simple(1, SpecFn{{0, 0}},
                                       {SpecFn{{0, 0}, {2, 1}}, SpecFn{{0, 0}, {2, 2}},
                                        SpecFn{{0, 0}, {3, 1}}, SpecFn{{0, 0}, {3, 2}}}));
  for (Nat d = 1; d <= 3; ++d)
    for (int j = 0; j < 3; ++j) {
      auto plan = random_plan(r, c.chains, d, 3);
      c.fragments.push_back(build_fragment(c.chains, plan));
    }
  return c;
}

}  // namespace cl
