#include "creature_lab/cli.hpp"

#include "creature_lab/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cl {

namespace {

const AmbientTree& need_tree(const Fixture& f, const std::string& what) {
  if (!f.tree) throw DomainError(what + ": fixture has no tree");
  return *f.tree;
}

const GrowthSequences& need_params(const Fixture& f, const std::string& what) {
  if (!f.params) throw DomainError(what + ": fixture has no params");
  return *f.params;
}

void write_or_print(const std::string& path, const Fixture& f, std::ostream& out) {
  if (path.empty()) out << emit(f);
  else save_fixture(path, f);
}

std::string norms_line(const Norms& n) {
  std::ostringstream o;
  o << "norm0 " << n.norm0 << "  normstar " << n.normstar << "  normhalf " << n.normhalf
    << "  norm1 " << n.norm1 << "  norm2 " << n.norm2 << "  norm " << lg_str(n.norm);
  return o.str();
}

std::string map_str(const std::vector<std::optional<std::size_t>>& m) {
  std::string s = "[";
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j) s += ",";
    s += m[j] ? std::to_string(*m[j]) : "-";
  }
  return s + "]";
}

GrowthSequences growth_profile(const std::string& name, std::size_t imax) {
  if (name == "default") return make_growth(imax);
  if (name == "lab") return lab_growth();
  if (name == "toy") return toy_growth();
  if (name.rfind("file:", 0) == 0) {
    auto f = load_fixture(name.substr(5));
    return need_params(f, "gen-params");
  }
  throw DomainError("unknown growth profile '" + name + "'");
}

struct Args {
  // shared
  std::string in, out, p, q, x, label;
  Nat seed = 0;
  // gen-tree
  Nat width = 2, height = 3;
  double density = 0.7;
  bool chains = false;
  // gen-params
  std::string growth = "default";
  std::size_t imax = 1;
  // enum-spec
  Nat bound = 2;
  std::vector<Nat> nodes;
  // apply-op
  std::string op, measure = "norm1";
  Nat k = 1, kstar = 2;
  std::vector<Nat> xs, part;
  std::size_t creature = 0;
  // check-leq / purify / decide
  std::optional<Nat> n;
  Nat m = 0;
  // propcheck / report
  std::string suite, inject;
  Nat count = 100;
  unsigned jobs = 1;
};

int cmd_gen_tree(const Args& a, std::ostream& out) {
  Fixture f;
  if (a.chains) {
    f.tree = chain_forest(a.width, a.height);
  } else {
    Rng r = instance_rng(a.seed, 0);
    f.tree = random_forest(r, a.width, a.height, a.density);
  }
  write_or_print(a.out, f, out);
  return 0;
}

int cmd_gen_params(const Args& a, std::ostream& out) {
  Fixture f;
  f.params = growth_profile(a.growth, a.imax);
  if (auto v = growth_violation(*f.params)) throw DomainError("gen-params: " + *v);
  write_or_print(a.out, f, out);
  return 0;
}

int cmd_enum_spec(const Args& a, std::ostream& out) {
  Fixture f = load_fixture(a.in);
  const auto& t = need_tree(f, "enum-spec");
  NodeSet u;
  if (a.nodes.empty()) u.insert(t.nodes().begin(), t.nodes().end());
  for (Nat x : a.nodes) {
    if (!t.contains(Node(x))) throw DomainError("enum-spec: node " + std::to_string(x) + " not in tree");
    u.insert(Node(x));
  }
  double space = std::pow(double(a.bound), double(u.size()));
  if (space > double(work_budget()))
    throw BudgetError("enum-spec: " + std::to_string(a.bound) + "^" + std::to_string(u.size()) +
                      " candidate maps exceed the budget");
  Fixture o;
  o.tree = t;
  o.specfns = enumerate_spec(t, u, a.bound);
  write_or_print(a.out, o, out);
  if (!a.out.empty()) out << "enumerated " << o.specfns.size() << " functions\n";
  return 0;
}

int cmd_norm(const Args& a, std::ostream& out) {
  Fixture f = load_fixture(a.in);
  const auto& t = need_tree(f, "norm");
  const auto& g = need_params(f, "norm");
  for (std::size_t j = 0; j < f.creatures.size(); ++j) {
    const auto& c = f.creatures[j];
    auto rep = validate_creature(c.c, g, t);
    out << "creature " << j << ": i " << c.c.i << "  |val| " << c.c.val.size() << "  k " << c.k;
    if (!rep.ok()) {
      out << "  invalid at clause " << rep.first_failure() << "\n";
      continue;
    }
    out << "\n  " << norms_line(norms(c, t, g)) << "\n";
  }
  return 0;
}

int cmd_apply_op(const Args& a, std::ostream& out) {
  Fixture f = load_fixture(a.in);
  const auto& t = need_tree(f, "apply-op");
  const auto& g = need_params(f, "apply-op");
  if (a.creature >= f.creatures.size()) throw DomainError("apply-op: no creature " + std::to_string(a.creature));
  const Creature& src = f.creatures[a.creature];
  const SimpleCreature& c = src.c;
  Fixture o;
  o.params = g;
  o.tree = t;
  if (a.op == "glue") {
    const std::size_t need = c.val.size() * a.kstar;
    if (f.specfns.size() != need)
      throw DomainError("apply-op glue: expected " + std::to_string(need) +
                        " extension functions in specfns (|val| * kstar)");
    std::vector<std::vector<SpecFn>> ext(c.val.size());
    for (std::size_t e = 0; e < c.val.size(); ++e)
      ext[e].assign(f.specfns.begin() + e * a.kstar, f.specfns.begin() + (e + 1) * a.kstar);
    auto r = glue(c, ext, a.kstar, t, g);
    out << "glue: m0 " << r.m0 << "  ell* " << r.ell_star << "  norm0 " << norm0(r.d, t, g) << "\n";
    o.creatures.push_back(Creature{r.d, src.k});
  } else if (a.op == "fill") {
    std::vector<Node> xs(a.xs.begin(), a.xs.end());
    auto r = fill(c, xs, t, g);
    out << "fill: k " << r.k << "  m " << r.m << "  tuples " << r.tuples.size() << "  norm0 "
        << norm0(r.d, t, g) << "\n";
    o.creatures.push_back(Creature{r.d, src.k});
  } else if (a.op == "rebase") {
    if (f.specfns.size() != 1) throw DomainError("apply-op rebase: specfns must hold exactly eta*");
    auto r = rebase(c, f.specfns[0], t, g);
    out << "rebase: ell1 " << r.ell1 << "  ell2 " << r.ell2 << "  bound " << r.bound << "  norm0 "
        << norm0(r.d, t, g) << "\n";
    o.creatures.push_back(Creature{r.d, src.k});
  } else if (a.op == "shrink") {
    auto d = shrink_to_norm(c, a.k, t, g);
    out << "shrink: |val| " << c.val.size() << " -> " << d.val.size() << "  norm0 " << norm0(d, t, g)
        << "\n";
    o.creatures.push_back(Creature{d, src.k});
  } else if (a.op == "split") {
    std::vector<SpecFn> v1, v2;
    std::set<Nat> chosen(a.part.begin(), a.part.end());
    for (Nat e : chosen)
      if (e >= c.val.size()) throw DomainError("apply-op split: no value element " + std::to_string(e));
    for (std::size_t e = 0; e < c.val.size(); ++e) (chosen.count(e) ? v1 : v2).push_back(c.val[e]);
    Measure m = a.measure == "norm1" ? Measure::norm1 : a.measure == "norm2" ? Measure::norm2 : Measure::norm;
    if (a.measure != "norm1" && a.measure != "norm2" && a.measure != "norm")
      throw DomainError("apply-op split: unknown measure '" + a.measure + "'");
    auto r = bigness_split(c, v1, v2, t, g, m, src.k);
    auto side = [&](const std::optional<Nat>& n, const std::optional<LgRatio>& x) {
      return n ? std::to_string(*n) : x ? lg_str(*x) : std::string("-");
    };
    out << "split: side " << r.side << "  " << a.measure << " " << side(r.value1, r.real1) << " | "
        << side(r.value2, r.real2) << "\n";
    o.creatures.push_back(Creature{r.survivor, src.k});
  } else if (a.op == "halve") {
    auto r = halve(src, t, g);
    out << "halve: k " << src.k << " -> " << r.kprime << "  rounded " << r.rounded
        << (r.repaired ? "  repaired" : "") << "  prop2 " << (r.prop2 ? "yes" : "no") << "  prop3 "
        << (r.prop3 ? "yes" : "no") << "\n";
    o.creatures.push_back(r.out);
  } else {
    throw DomainError("apply-op: unknown op '" + a.op + "'");
  }
  if (!a.out.empty()) save_fixture(a.out, o);
  return 0;
}

int cmd_check_condition(const Args& a, std::ostream& out) {
  Fixture f = load_fixture(a.in);
  const auto& t = need_tree(f, "check-condition");
  const auto& g = need_params(f, "check-condition");
  bool all = true;
  for (std::size_t j = 0; j < f.conditions.size(); ++j) {
    const auto& p = f.conditions[j];
    auto rep = validate_condition(p, t, g);
    out << "condition " << j << ": " << (rep.ok() ? "valid" : "invalid") << "  depth " << p.depth()
        << "  nodes " << p.size() << "\n";
    if (!rep.ok()) {
      all = false;
      out << rep.str();
      continue;
    }
    auto cls = classify(p, t, g);
    out << "  normal " << (cls.normal ? "yes" : "no") << "  smooth " << (cls.smooth ? "yes" : "no")
        << "  weakly smooth " << (cls.weakly_smooth ? "yes" : "no");
    if (cls.alpha) out << "  alpha " << *cls.alpha;
    out << "\n";
  }
  return all ? 0 : 1;
}

int cmd_check_leq(const Args& a, std::ostream& out) {
  Fixture fp = load_fixture(a.p), fq = load_fixture(a.q);
  const auto& t = need_tree(fp, "check-leq");
  const auto& g = need_params(fp, "check-leq");
  if (fp.conditions.empty() || fq.conditions.empty()) throw DomainError("check-leq: both fixtures need a condition");
  const Fragment& p = fp.conditions[0];
  const Fragment& q = fq.conditions[0];
  int code = 0;
  if (p == q) {
    out << "leq: yes (identity projection)\n";
  } else {
    auto pr = leq(p, q, t, g);
    if (pr.ok) out << "leq: yes  projection " << map_str(pr.map) << "\n";
    else {
      out << "leq: no (clause " << pr.clause << ": " << pr.witness << ")\n";
      code = 1;
    }
  }
  if (a.n) {
    auto r = leq_n(p, q, *a.n, t, g);
    out << "leq_" << *a.n << ": " << (r.ok ? "yes" : "no");
    if (!r.ok) out << " (clause " << r.clause << ")";
    out << "\n";
    if (!r.ok) code = 1;
  }
  return code;
}

int cmd_purify(const Args& a, std::ostream& out) {
  Fixture fp = load_fixture(a.p), fx = load_fixture(a.x);
  const auto& t = need_tree(fp, "purify");
  const auto& g = need_params(fp, "purify");
  if (fp.conditions.empty()) throw DomainError("purify: --p fixture has no condition");
  std::set<SpecFn> x(fx.specfns.begin(), fx.specfns.end());
  auto r = purify(fp.conditions[0], x, a.kstar, t, g);
  out << "purify: kept " << r.q.size() << " of " << fp.conditions[0].size() << " nodes  changed "
      << r.changed.size() << "  leq_" << a.kstar << " " << (r.leq_kstar ? "yes" : "no") << "\n";
  for (const auto& c : r.front) {
    out << "  front " << r.q.node(c.node).fn.str() << ": ";
    if (c.level_in_x) out << "inside X from level " << *c.level_in_x << "\n";
    else out << "disjoint from X\n";
  }
  Fixture o;
  o.params = g;
  o.tree = t;
  o.conditions.push_back(r.q);
  if (!a.out.empty()) save_fixture(a.out, o);
  return 0;
}

int cmd_decide(const Args& a, std::ostream& out) {
  Fixture fp = load_fixture(a.p);
  const auto& t = need_tree(fp, "decide");
  const auto& g = need_params(fp, "decide");
  if (fp.conditions.empty()) throw DomainError("decide: --p fixture has no condition");
  Fixture fl = a.label.empty() ? fp : load_fixture(a.label);
  if (fl.labelings.empty()) throw DomainError("decide: no labeling given");
  auto r = decide(fp.conditions[0], fl.labelings[0], a.m, t, g);
  if (!r.found) {
    out << "decide: not found (search exhausted)\n";
    return 0;
  }
  out << "decide: level " << r.level << "  path " << r.path << "  nodes " << r.q.size() << "\n";
  for (const auto& [fn, v] : r.values) out << "  " << fn.str() << " -> " << v << "\n";
  out << "  delta root " << r.delta_root << "  members " << r.delta_members << "  iso classes "
      << r.iso_classes << "\n";
  Fixture o;
  o.params = g;
  o.tree = t;
  o.conditions.push_back(r.q);
  if (!a.out.empty()) save_fixture(a.out, o);
  return 0;
}

int cmd_propcheck(const Args& a, std::ostream& out) {
  PropcheckOptions opt;
  opt.jobs = a.jobs;
  if (!a.inject.empty()) {
    if (a.inject != "skip-avoidance") throw DomainError("propcheck: unknown fault '" + a.inject + "'");
    opt.inject_fill_fault = true;
  }
  auto rep = propcheck(a.suite, a.count, a.seed, opt);
  out << rep.text();
  return rep.exit_code();
}

int cmd_report(const Args& a, std::ostream& out) {
  PropcheckOptions opt;
  opt.jobs = a.jobs;
  int code = 0;
  out << "suite          passed  failed skipped  budget\n";
  for (const auto& s : suite_names()) {
    auto rep = propcheck(s, a.count, a.seed, opt);
    char line[128];
    std::snprintf(line, sizeof line, "%-14s %6llu  %6llu  %6llu  %6llu\n", s.c_str(),
                  (unsigned long long)rep.passed, (unsigned long long)rep.failed,
                  (unsigned long long)rep.skipped, (unsigned long long)rep.budget);
    out << line;
    code = std::max(code, rep.exit_code() == 1 ? 1 : 0);
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Creature-forcing calculus lab", "creature-lab"};
  app.require_subcommand(1);
  Args a;

  auto* gen_tree = app.add_subcommand("gen-tree", "Generate an ambient forest fixture");
  gen_tree->add_option("--width", a.width, "Nodes per level")->check(CLI::Range(Nat{1}, Nat{64}));
  gen_tree->add_option("--height", a.height, "Number of levels")->check(CLI::Range(Nat{1}, Nat{1000}));
  gen_tree->add_option("--density", a.density, "Node probability above level 0")->check(CLI::Range(0.0, 1.0));
  gen_tree->add_option("--seed", a.seed);
  gen_tree->add_flag("--chains", a.chains, "Disjoint chains instead of a random forest");
  gen_tree->add_option("--out", a.out);

  auto* gen_params = app.add_subcommand("gen-params", "Emit and validate growth sequences");
  gen_params->add_option("--growth", a.growth, "default|lab|toy|file:PATH");
  gen_params->add_option("--imax", a.imax, "Top index for the default profile")->check(CLI::Range(0, 3));
  gen_params->add_option("--out", a.out);

  auto* enum_spec = app.add_subcommand("enum-spec", "Enumerate specialization functions");
  enum_spec->add_option("--in", a.in)->required();
  enum_spec->add_option("--bound", a.bound, "Values below this bound");
  enum_spec->add_option("--nodes", a.nodes, "Domain (default: every tree node)")->delimiter(',');
  enum_spec->add_option("--out", a.out);

  auto* norm = app.add_subcommand("norm", "Print all norms of each creature");
  norm->add_option("--in", a.in)->required();

  auto* apply = app.add_subcommand("apply-op", "Apply a creature operation");
  apply->add_option("--op", a.op)->required()->check(
      CLI::IsMember({"glue", "fill", "rebase", "shrink", "split", "halve"}));
  apply->add_option("--in", a.in)->required();
  apply->add_option("--out", a.out);
  apply->add_option("--creature", a.creature, "Index of the input creature");
  apply->add_option("--kstar", a.kstar, "glue: extensions per value element");
  apply->add_option("--x", a.xs, "fill: nodes to add")->delimiter(',');
  apply->add_option("--k", a.k, "shrink: target norm0");
  apply->add_option("--part", a.part, "split: value indices of side 1")->delimiter(',');
  apply->add_option("--measure", a.measure, "split: norm1|norm2|norm");

  auto* check_cond = app.add_subcommand("check-condition", "Validate condition fragments");
  check_cond->add_option("--in", a.in)->required();

  auto* check_leq = app.add_subcommand("check-leq", "Decide p <= q and optionally p <=_n q");
  check_leq->add_option("--p", a.p)->required();
  check_leq->add_option("--q", a.q)->required();
  check_leq->add_option("--n", a.n);

  auto* pur = app.add_subcommand("purify", "Homogenize a condition against an upward closed set");
  pur->add_option("--p", a.p)->required();
  pur->add_option("--x", a.x, "Fixture whose specfns list X")->required();
  pur->add_option("--kstar", a.kstar)->required();
  pur->add_option("--out", a.out);

  auto* dec = app.add_subcommand("decide", "Find a level deciding a leaf labeling");
  dec->add_option("--p", a.p)->required();
  dec->add_option("--label", a.label, "Fixture with the labeling (default: --p's)");
  dec->add_option("--m", a.m);
  dec->add_option("--out", a.out);

  auto* pc = app.add_subcommand("propcheck", "Run a randomized property suite");
  pc->add_option("--suite", a.suite)->required();
  pc->add_option("--count", a.count);
  pc->add_option("--seed", a.seed);
  pc->add_option("--jobs", a.jobs)->check(CLI::Range(1u, 256u));
  pc->add_option("--inject", a.inject, "Fault injection: skip-avoidance");

  auto* rep = app.add_subcommand("report", "Summary over every suite");
  rep->add_option("--count", a.count);
  rep->add_option("--seed", a.seed);
  rep->add_option("--jobs", a.jobs)->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 64;
  }

  try {
    if (*gen_tree) return cmd_gen_tree(a, out);
    if (*gen_params) return cmd_gen_params(a, out);
    if (*enum_spec) return cmd_enum_spec(a, out);
    if (*norm) return cmd_norm(a, out);
    if (*apply) return cmd_apply_op(a, out);
    if (*check_cond) return cmd_check_condition(a, out);
    if (*check_leq) return cmd_check_leq(a, out);
    if (*pur) return cmd_purify(a, out);
    if (*dec) return cmd_decide(a, out);
    if (*pc) return cmd_propcheck(a, out);
    if (*rep) return cmd_report(a, out);
  } catch (const BudgetError& e) {
    err << "budget exhausted: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}

}  // namespace cl
