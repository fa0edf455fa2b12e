#include "creature_lab/forcing.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

namespace cl {

Fragment::Fragment(Nat depth, std::vector<FNode> nodes, std::optional<Coverage> cov)
    : depth_(depth), cov_(std::move(cov)) {
  const std::size_t n = nodes.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (nodes[a].level != nodes[b].level) return nodes[a].level < nodes[b].level;
    return nodes[a].fn < nodes[b].fn;
  });
  std::vector<std::size_t> where(n);
  for (std::size_t k = 0; k < n; ++k) where[order[k]] = k;
  for (std::size_t k = 0; k < n; ++k) {
    FNode f = nodes[order[k]];
    if (f.parent) {
      if (*f.parent >= n) throw DomainError("fragment node has a dangling parent index");
      f.parent = where[*f.parent];
    }
    nodes_.push_back(std::move(f));
  }
  children_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k)
    if (nodes_[k].parent) children_[*nodes_[k].parent].push_back(k);
}

std::size_t Fragment::root() const {
  if (nodes_.empty()) throw DomainError("empty fragment has no root");
  return 0;
}

std::vector<std::size_t> Fragment::level(Nat l) const {
  std::vector<std::size_t> r;
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    if (nodes_[k].level == l) r.push_back(k);
  return r;
}

std::optional<std::size_t> Fragment::find(const SpecFn& f) const {
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    if (nodes_[k].fn == f) return k;
  return std::nullopt;
}

bool Fragment::tree_leq(std::size_t a, std::size_t b) const {
  std::optional<std::size_t> cur = b;
  while (cur) {
    if (*cur == a) return true;
    cur = nodes_[*cur].parent;
  }
  return false;
}

std::optional<Nat> Fragment::kind(const GrowthSequences& g) const {
  return kind_of(nodes_.at(root()).fn, g);
}

SimpleCreature Fragment::creature(std::size_t k, const GrowthSequences& g) const {
  auto i = kind(g);
  if (!i) throw DomainError("root forces no kind within imax");
  std::vector<SpecFn> val;
  for (std::size_t c : children_.at(k)) val.push_back(nodes_[c].fn);
  return make_simple(*i + nodes_[k].level, nodes_[k].fn, std::move(val));
}

std::vector<std::size_t> Fragment::leaves() const {
  std::vector<std::size_t> r;
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    if (children_[k].empty()) r.push_back(k);
  return r;
}

LgRatio node_norm(const Fragment& p, std::size_t k, const AmbientTree& t,
                  const GrowthSequences& g, const NormShape& shape) {
  return norms(Creature{p.creature(k, g), p.node(k).klabel}, t, g, shape).norm;
}

Report validate_condition(const Fragment& p, const AmbientTree& t, const GrowthSequences& g) {
  Report r;
  auto add = [&](std::string clause, bool ok, std::string why = {}) {
    r.checks.push_back({std::move(clause), ok, ok ? std::string{} : std::move(why)});
    return ok;
  };
  if (!add("(iii) root", !p.nodes().empty() && p.level(0).size() == 1, "need exactly one root"))
    return r;

  std::string tree_bad;
  for (std::size_t k = 0; k < p.size() && tree_bad.empty(); ++k) {
    const auto& n = p.node(k);
    if (n.level > p.depth()) tree_bad = n.fn.str() + " lies beyond the depth";
    else if (n.level > 0 && !n.parent) tree_bad = n.fn.str() + " has no parent";
    else if (n.parent) {
      const auto& par = p.node(*n.parent);
      if (par.level + 1 != n.level) tree_bad = n.fn.str() + " skips a level";
      else if (!par.fn.subset_of(n.fn) || par.fn == n.fn)
        tree_bad = n.fn.str() + " does not properly extend its parent";
    }
    if (tree_bad.empty() && n.level < p.depth() && !p.internal(k))
      tree_bad = n.fn.str() + " ends before the depth";
  }
  add("(ii) tree", tree_bad.empty(), tree_bad);

  std::string dup;
  for (std::size_t a = 0; a < p.size() && dup.empty(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p.node(a).fn == p.node(b).fn) {
        dup = p.node(a).fn.str() + " appears twice";
        break;
      }
  add("(v) unique", dup.empty(), dup);

  auto ip = p.kind(g);
  if (!add("(iv) kind", ip.has_value() && *ip + (p.depth() ? p.depth() - 1 : 0) <= g.imax,
           "root kind plus depth exceeds imax"))
    return r;

  std::string klab, crt;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.node(k).klabel == 0 && klab.empty()) klab = p.node(k).fn.str() + " has klabel 0";
    if (!p.internal(k) || !tree_bad.empty()) continue;
    auto c = p.creature(k, g);
    auto rep = validate_creature(c, g, t);
    if (!rep.ok()) {
      if (crt.empty()) crt = p.node(k).fn.str() + " creature clause " + rep.first_failure();
      continue;
    }
    auto nh = simple_norms(c, t, g).normhalf;
    if (p.node(k).klabel > nh && klab.empty())
      klab = p.node(k).fn.str() + " klabel " + std::to_string(p.node(k).klabel) +
             " > normhalf " + std::to_string(nh);
  }
  add("(iv) creature", crt.empty(), crt);
  add("(iv) klabel", klab.empty(), klab);

  std::string clo;
  for (std::size_t a = 0; a < p.size() && clo.empty(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b) {
      auto u = try_union(t, p.node(a).fn, p.node(b).fn);
      if (u && !p.find(*u)) {
        clo = p.node(a).fn.str() + " and " + p.node(b).fn.str() + " union missing";
        break;
      }
    }
  add("(v) closure", clo.empty(), clo);

  std::string lev, domb;
  for (Nat l = 0; l <= p.depth(); ++l) {
    Nat idx = *ip + l;
    auto nodes = p.level(l);
    if (idx <= g.imax && nodes.size() >= g.n1[idx] && lev.empty())
      lev = "level " + std::to_string(l) + " has " + std::to_string(nodes.size()) + " nodes";
    for (std::size_t k : nodes) {
      const auto& f = p.node(k).fn;
      bool ok = (l == 0 && *ip == 0 && f.empty()) || (idx >= 1 && f.size() < g.n2[idx - 1]);
      if (!ok && domb.empty()) domb = f.str() + " too large for level " + std::to_string(l);
    }
  }
  add("level bound", lev.empty(), lev);
  add("domain bound", domb.empty(), domb);

  if (p.coverage()) {
    const auto& cov = *p.coverage();
    std::string why;
    NodeSet seg = t.initial_segment(cov.alpha);
    for (Node x : cov.u)
      if (seg.count(x)) why = "u meets the initial segment";
    for (std::size_t k : p.leaves()) {
      if (!why.empty()) break;
      NodeSet d = p.node(k).fn.dom();
      for (Node x : cov.u) d.erase(x);
      if (d != seg) why = "leaf " + p.node(k).fn.str() + " does not cover T_<alpha";
    }
    add("(vi) coverage", why.empty(), why);
  }
  return r;
}

namespace {

NodeSet dom_intersect(const SpecFn& a, const SpecFn& b) {
  NodeSet r;
  for (auto& [x, v] : a.entries())
    if (b.defined(x)) r.insert(x);
  return r;
}

// ⊆-maximal elements among candidates; the first one when several tie.
std::optional<std::size_t> maximal_sub(const Fragment& p, const std::vector<std::size_t>& cands) {
  std::optional<std::size_t> best;
  for (std::size_t c : cands) {
    bool dominated = false;
    for (std::size_t o : cands)
      if (o != c && p.node(c).fn.subset_of(p.node(o).fn)) dominated = true;
    if (!dominated && !best) best = c;
  }
  return best;
}

Projection reject(std::string clause, std::string witness) {
  Projection pr;
  pr.clause = std::move(clause);
  pr.witness = std::move(witness);
  return pr;
}

}  // namespace

Projection leq(const Fragment& p, const Fragment& q, const AmbientTree&,
               const GrowthSequences& g, LeqOptions opt) {
  auto ip = p.kind(g), iq = q.kind(g);
  if (!ip || !iq) return reject("(iv)", "kind undefined");
  if (*ip > *iq) return reject("i(p) <= i(q)", "");
  const Nat s = *iq - *ip;

  Projection pr;
  pr.map.assign(q.size(), std::nullopt);
  const SpecFn& rq = q.node(q.root()).fn;
  std::vector<std::size_t> cands;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p.node(k).fn.subset_of(rq)) cands.push_back(k);
  auto r0 = maximal_sub(p, cands);
  if (!r0) return reject("(e)", "no node of p below rt(q)");
  if (p.node(*r0).level != s)
    return reject("(b)", "pr(rt q) = " + p.node(*r0).fn.str() + " at level " +
                             std::to_string(p.node(*r0).level));
  pr.map[q.root()] = *r0;

  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto& qn = q.node(j);
    if (!qn.parent || !pr.map[*qn.parent]) continue;
    std::size_t pi = *pr.map[*qn.parent];
    if (!p.internal(pi)) continue;  // past p's horizon
    std::vector<std::size_t> c;
    for (std::size_t ch : p.children(pi))
      if (p.node(ch).fn.subset_of(qn.fn)) c.push_back(ch);
    auto img = maximal_sub(p, c);
    if (!img) return reject("(c)", qn.fn.str() + " has no image among successors of " +
                                       p.node(pi).fn.str());
    pr.map[j] = *img;
  }

  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!pr.map[j]) continue;
    std::size_t pi = *pr.map[j];
    if (p.node(pi).level != q.node(j).level + s) return reject("(b)", q.node(j).fn.str());
    if (!p.node(pi).fn.subset_of(q.node(j).fn)) return reject("(e)", q.node(j).fn.str());
    if (q.internal(j) && p.internal(pi) && q.node(j).klabel < p.node(pi).klabel)
      return reject("(d)", q.node(j).fn.str());
    for (std::size_t ch : q.children(j)) {
      if (!pr.map[ch]) continue;
      const SpecFn& tau = p.node(*pr.map[ch]).fn;
      if (dom_intersect(tau, q.node(j).fn) != p.node(pi).fn.dom())
        return reject("(f)", q.node(j).fn.str() + " / " + q.node(ch).fn.str());
    }
    if (opt.strict_f && q.internal(j)) {
      for (std::size_t k = 0; k < p.size(); ++k)
        if (p.node(pi).fn.subset_of(p.node(k).fn) &&
            dom_intersect(p.node(k).fn, q.node(j).fn) != p.node(pi).fn.dom())
          return reject("strict (f)", q.node(j).fn.str() + " / " + p.node(k).fn.str());
    }
  }
  pr.ok = true;
  return pr;
}

LeqN leq_n(const Fragment& p, const Fragment& q, Nat n, const AmbientTree& t,
           const GrowthSequences& g, const NormShape& shape) {
  LeqN r;
  r.pr = leq(p, q, t, g);
  if (!r.pr.ok) {
    r.clause = "(i) " + r.pr.clause;
    return r;
  }
  if (p.kind(g) != q.kind(g)) {
    r.clause = "(ii)";
    return r;
  }
  const Nat top = std::min<Nat>(n, std::max(p.depth(), q.depth()));
  for (Nat l = 0; l <= top; ++l) {
    std::vector<std::pair<SpecFn, Nat>> a, b;
    for (std::size_t k : p.level(l)) a.emplace_back(p.node(k).fn, l < n ? p.node(k).klabel : 0);
    for (std::size_t k : q.level(l)) b.emplace_back(q.node(k).fn, l < n ? q.node(k).klabel : 0);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      r.clause = "(iii) level " + std::to_string(l);
      return r;
    }
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!q.internal(j)) continue;
    auto pi = r.pr.map[j];
    bool same = pi && p.internal(*pi) && p.node(*pi).fn == q.node(j).fn &&
                p.node(*pi).klabel == q.node(j).klabel &&
                p.creature(*pi, g) == q.creature(j, g);
    if (same) continue;
    if (!lg_geq_int(node_norm(q, j, t, g, shape), std::int64_t(n))) {
      r.clause = "(iv) at " + q.node(j).fn.str();
      return r;
    }
  }
  r.ok = true;
  return r;
}

Fragment restrict(const Fragment& p, std::size_t eta) {
  if (eta >= p.size()) throw DomainError("restrict: node not in fragment");
  const SpecFn& base = p.node(eta).fn;
  const Nat lvl = p.node(eta).level;
  std::vector<std::size_t> keep;
  std::map<std::size_t, std::size_t> where;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (base.subset_of(p.node(k).fn)) {
      where[k] = keep.size();
      keep.push_back(k);
    }
  std::vector<FNode> out;
  for (std::size_t k : keep) {
    FNode f = p.node(k);
    f.level -= lvl;
    if (k == eta) {
      f.parent.reset();
    } else {
      if (!f.parent || !where.count(*f.parent))
        throw DomainError("restriction above " + base.str() + " is not a tree");
      f.parent = where[*f.parent];
    }
    out.push_back(std::move(f));
  }
  return Fragment(p.depth() - lvl, std::move(out), p.coverage());
}

Fragment fuse(const std::vector<Fragment>& qs, const std::vector<Nat>& ns, const AmbientTree& t,
              const GrowthSequences& g, const NormShape& shape) {
  if (qs.empty() || qs.size() != ns.size()) throw PreconditionError("fuse: need one n per fragment");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw PreconditionError("fuse: ns not strictly increasing");
  for (std::size_t i = 0; i + 1 < qs.size(); ++i)
    if (!leq_n(qs[i], qs[i + 1], ns[i], t, g, shape).ok)
      throw PreconditionError("fuse: chain breaks at index " + std::to_string(i));

  const Fragment& tail = qs.back();
  auto band = [&](Nat l) {
    for (std::size_t i = 0; i < ns.size(); ++i)
      if (l < ns[i]) return i;
    return ns.size() - 1;
  };
  std::vector<FNode> out;
  std::map<SpecFn, std::size_t> prev, cur;
  for (Nat l = 0; l <= tail.depth(); ++l) {
    const Fragment& src = qs[band(l)];
    cur.clear();
    for (std::size_t k : src.level(l)) {
      FNode f = src.node(k);
      if (f.parent) {
        auto it = prev.find(src.node(*f.parent).fn);
        if (it == prev.end()) throw DomainError("fuse: band seam lost a parent");
        f.parent = it->second;
      }
      cur[f.fn] = out.size();
      out.push_back(std::move(f));
    }
    prev = cur;
  }
  Fragment q(tail.depth(), std::move(out), tail.coverage());
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (!leq_n(qs[i], q, ns[i], t, g, shape).ok)
      throw DomainError("fuse: result not >=_n above element " + std::to_string(i));
  return q;
}

Classification classify(const Fragment& p, const AmbientTree& t, const GrowthSequences& g,
                        const NormShape& shape) {
  Classification c;
  std::vector<std::optional<LgRatio>> nn(p.size());
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p.internal(k)) nn[k] = node_norm(p, k, t, g, shape);
  c.normal = true;
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto par = p.node(k).parent;
    if (par && nn[k] && nn[*par] && !lg_geq(*nn[k], *nn[*par])) c.normal = false;
  }
  if (p.coverage()) {
    const auto& cov = *p.coverage();
    c.weakly_smooth = cov.k == 0;
    if (cov.k == 0 && cov.u.empty()) {
      NodeSet seg = t.initial_segment(cov.alpha);
      for (std::size_t k : p.leaves())
        if (p.node(k).fn.dom() != seg)
          c.failure = "leaf " + p.node(k).fn.str() + " does not cover T_<alpha";
      c.smooth = c.failure.empty();
      if (c.smooth) c.alpha = cov.alpha;
    }
  }
  return c;
}

bool is_front(const Fragment& p, const std::vector<std::size_t>& front) {
  for (std::size_t a : front)
    if (a >= p.size()) return false;
  for (std::size_t a = 0; a < front.size(); ++a)
    for (std::size_t b = 0; b < front.size(); ++b)
      if (a != b && p.tree_leq(front[a], front[b])) return false;
  for (std::size_t leaf : p.leaves())
    if (std::none_of(front.begin(), front.end(), [&](std::size_t f) { return p.tree_leq(f, leaf); }))
      return false;
  return true;
}

Fragment amalgamate(const Fragment& p, const std::vector<std::size_t>& front,
                    const std::vector<Fragment>& qs, const AmbientTree& t,
                    const GrowthSequences& g) {
  if (!is_front(p, front)) throw PreconditionError("amalgamate: not a front");
  if (front.size() != qs.size()) throw PreconditionError("amalgamate: one fragment per front node");
  for (std::size_t l = 0; l < front.size(); ++l) {
    const auto& q = qs[l];
    if (q.node(q.root()).fn != p.node(front[l]).fn)
      throw PreconditionError("amalgamate: root of q_" + std::to_string(l) + " is not eta_" +
                              std::to_string(l));
    if (q.depth() + p.node(front[l]).level != p.depth())
      throw PreconditionError("amalgamate: depth mismatch at " + std::to_string(l));
    if (!leq(restrict(p, front[l]), q, t, g).ok)
      throw PreconditionError("amalgamate: q_" + std::to_string(l) + " not above the cone");
  }
  std::vector<FNode> out;
  std::map<std::size_t, std::size_t> where;
  for (std::size_t k = 0; k < p.size(); ++k) {
    bool inside = std::any_of(front.begin(), front.end(), [&](std::size_t f) {
      return f != k && p.tree_leq(f, k);
    });
    bool is_front_node = std::find(front.begin(), front.end(), k) != front.end();
    if (inside || is_front_node) continue;
    FNode f = p.node(k);
    if (f.parent) f.parent = where.at(*f.parent);
    where[k] = out.size();
    out.push_back(std::move(f));
  }
  for (std::size_t l = 0; l < front.size(); ++l) {
    const auto& q = qs[l];
    const Nat shift = p.node(front[l]).level;
    std::size_t offset = out.size();
    for (std::size_t k = 0; k < q.size(); ++k) {
      FNode f = q.node(k);
      f.level += shift;
      if (f.parent) f.parent = *f.parent + offset;
      else if (auto par = p.node(front[l]).parent) f.parent = where.at(*par);
      out.push_back(std::move(f));
    }
  }
  Fragment r(p.depth(), std::move(out), p.coverage());
  auto rep = validate_condition(r, t, g);
  if (!rep.ok()) throw DomainError("amalgamate: result invalid, " + rep.first_failure());
  if (!leq(p, r, t, g).ok) throw DomainError("amalgamate: result not above p");
  return r;
}

namespace {

struct SmoothBuild {
  const Fragment& p;
  const AmbientTree& t;
  const GrowthSequences& g;
  const NormShape& shape;
  NodeSet seg;
  Nat m;
  Nat ip;
  std::vector<FNode> out;
  SmoothenStats stats;
  // Nodes appearing in some domain of each p-subtree.
  std::vector<NodeSet> subtree_dom;

  [[noreturn]] void block(const SpecFn& at, const std::string& why) {
    throw DomainError("smoothen blocked at " + at.str() + ": " + why);
  }

  void run(const SpecFn& qfn, std::size_t pi, std::optional<std::size_t> parent) {
    const Nat lvl = p.node(pi).level;
    out.push_back(FNode{qfn, lvl, parent, p.node(pi).klabel});
    const std::size_t me = out.size() - 1;
    if (!p.internal(pi)) {
      if (qfn.dom() != seg) block(qfn, "leaf misses part of T_<alpha");
      return;
    }
    const SimpleCreature cp = p.creature(pi, g);
    SimpleCreature c = cp;
    if (qfn != p.node(pi).fn) {
      c = rebase(cp, qfn, t, g).d;
      ++stats.rebases;
    }

    std::vector<Node> fillable;
    if (lvl >= m) {
      for (Node x : seg) {
        if (qfn.defined(x)) continue;
        // (f) forbids adding x here once any successor subtree mentions it.
        bool ok = true;
        for (std::size_t ch : p.children(pi))
          if (subtree_dom[ch].count(x)) ok = false;
        if (ok) fillable.push_back(x);
      }
    }
    const bool last = lvl + 1 == p.depth();
    const std::size_t lo = last ? fillable.size() : 0;
    std::string last_err;
    for (std::size_t j = lo; j <= fillable.size(); ++j) {
      const std::size_t mark = out.size();
      const SmoothenStats saved = stats;
      try {
        SimpleCreature d = c;
        if (j > 0) {
          std::vector<Node> xs(fillable.begin(), fillable.begin() + j);
          d = fill(c, xs, t, g).d;
          ++stats.fills;
          stats.points_added += j;
        }
        auto nd = simple_norms(d, t, g);
        auto np = simple_norms(cp, t, g);
        if (nd.norm1 + 1 < np.norm1) block(qfn, "norm1 dropped by more than 1");
        if (p.node(pi).klabel > nd.normhalf) block(qfn, "klabel exceeds normhalf");
        if (!(d == cp) && !lg_geq_int(f_eval(shape, nd.normhalf, p.node(pi).klabel),
                                      static_cast<std::int64_t>(m)))
          block(qfn, "changed creature has norm below m");
        for (const auto& w : d.val) {
          std::optional<std::size_t> img;
          for (std::size_t ch : p.children(pi))
            if (p.node(ch).fn.subset_of(w)) img = ch;
          if (!img) block(w, "no projection target");
          run(w, *img, me);
        }
        return;
      } catch (const DomainError& e) {
        out.resize(mark);
        stats = saved;
        last_err = e.what();
      }
    }
    throw DomainError(last_err);
  }
};

}  // namespace

Fragment smoothen(const Fragment& p, Nat alpha, Nat m, const AmbientTree& t,
                  const GrowthSequences& g, SmoothenStats* stats, const NormShape& shape) {
  auto ip = p.kind(g);
  if (!ip) throw PreconditionError("smoothen: root forces no kind");
  NodeSet seg = t.initial_segment(alpha);
  for (const auto& n : p.nodes())
    for (auto& [x, v] : n.fn.entries())
      if (!seg.count(x)) throw PreconditionError("smoothen: domain point " + std::to_string(x) +
                                                 " outside T_<alpha");
  if (m > p.depth()) throw PreconditionError("smoothen: m beyond depth");

  SmoothBuild b{p, t, g, shape, seg, m, *ip, {}, {}, std::vector<NodeSet>(p.size())};
  for (std::size_t k = p.size(); k-- > 0;) {
    auto d = p.node(k).fn.dom();
    b.subtree_dom[k].insert(d.begin(), d.end());
    for (std::size_t ch : p.children(k))
      b.subtree_dom[k].insert(b.subtree_dom[ch].begin(), b.subtree_dom[ch].end());
  }
  b.run(p.node(p.root()).fn, p.root(), std::nullopt);
  Fragment q(p.depth(), std::move(b.out), Coverage{0, alpha, {}});
  auto rep = validate_condition(q, t, g);
  if (!rep.ok()) throw DomainError("smoothen: result invalid, " + rep.first_failure());
  if (auto r = leq_n(p, q, m, t, g, shape); !r.ok)
    throw DomainError("smoothen: result not >=_m above p, " + r.clause + " " + r.pr.clause + " " +
                      r.pr.witness);
  if (stats) *stats = b.stats;
  return q;
}

Fragment normalize_cone_min(const Fragment& p, const AmbientTree& t, const GrowthSequences& g) {
  std::vector<Nat> own(p.size(), 0), cone(p.size(), std::numeric_limits<Nat>::max());
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p.internal(k)) {
      own[k] = norm0(p.creature(k, g), t, g);
      cone[k] = own[k];
    }
    for (std::size_t ch : p.children(k)) cone[k] = std::min(cone[k], cone[ch]);
  }
  std::vector<FNode> out;
  std::function<void(std::size_t, std::optional<std::size_t>)> walk =
      [&](std::size_t k, std::optional<std::size_t> parent) {
        FNode f = p.node(k);
        f.parent = parent;
        out.push_back(f);
        const std::size_t me = out.size() - 1;
        if (!p.internal(k)) return;
        auto c = p.creature(k, g);
        if (cone[k] >= 1 && cone[k] < own[k]) c = shrink_to_norm(c, cone[k], t, g);
        for (std::size_t ch : p.children(k))
          if (std::binary_search(c.val.begin(), c.val.end(), p.node(ch).fn)) walk(ch, me);
      };
  walk(p.root(), std::nullopt);
  Fragment q(p.depth(), std::move(out), p.coverage());
  auto rep = validate_condition(q, t, g);
  if (!rep.ok()) throw DomainError("normalize: result invalid, " + rep.first_failure());
  return q;
}

}  // namespace cl
