// Runs the twelve acceptance criteria; one PASS/FAIL line each, exit 1 if any fails.
#include "creature_lab/verify.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace cl;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void line(int n, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  " << n << ". " << what << ": " << detail << std::endl;
}

std::string secs(double s) {
  std::ostringstream o;
  o.precision(1);
  o << std::fixed << s << "s";
  return o.str();
}

Nat stat(const SuiteReport& r, const std::string& key) {
  auto it = r.stats.find(key);
  return it == r.stats.end() ? 0 : it->second;
}

Nat evaluated(const SuiteReport& r) { return r.passed + r.failed; }

// Runs until `target` premise-satisfying instances were evaluated, doubling the count.
SuiteReport run_until(const std::string& suite, Nat count, Nat target, Nat seed) {
  SuiteReport r = propcheck(suite, count, seed);
  while (evaluated(r) < target && count < 64 * target) {
    count *= 2;
    r = propcheck(suite, count, seed);
  }
  return r;
}

std::string counts(const SuiteReport& r) {
  return std::to_string(evaluated(r)) + " evaluated, " + std::to_string(r.failed) + " failed, " +
         std::to_string(r.skipped) + " skipped";
}

std::string first_fail(const SuiteReport& r) {
  return r.failed ? " (first: " + r.failure + ")" : "";
}

void c1() {
  auto t0 = Clock::now();
  auto g = toy_growth();
  Nat swept = 0, bad = 0;
  for (const auto& t : sweep_forests())
    for (const auto& c : sweep_creatures(t, g, 4, 4)) {
      ++swept;
      if (norm0(c, t, g) != oracle_norm0(c, t, g)) ++bad;
    }
  auto r = propcheck("norm-oracle", 10000, 1);
  double s = since(t0);
  line(1, bad == 0 && r.failed == 0 && r.budget == 0 && evaluated(r) >= 10000 && s <= 120,
       "norm0 equals the oracle",
       std::to_string(swept) + " swept (" + std::to_string(bad) + " mismatches), random " + counts(r) +
           ", " + secs(s));
}

void c2() {
  auto t0 = Clock::now();
  auto r = run_until("glue", 1200, 1000, 2);
  double s = since(t0);
  line(2, r.failed == 0 && evaluated(r) >= 1000 && s <= 60, "glue bound",
       counts(r) + ", " + secs(s) + first_fail(r));
}

void c3() {
  auto r = run_until("fill", 1500, 1000, 3);
  Nat alpha = 0;
  for (const auto& [k, v] : r.stats)
    if (k.rfind("fail: (alpha)", 0) == 0) alpha += v;
  Nat bound = r.failed - alpha;
  line(3, bound == 0 && evaluated(r) >= 1000, "fill bound and coverage of x",
       std::to_string(evaluated(r)) + " evaluated, " + std::to_string(bound) +
           " bound/coverage failures, " + std::to_string(alpha) + " outputs not a creature");
}

void c4() {
  auto r = run_until("rebase", 1200, 1000, 4);
  Nat same = stat(r, "normstar_same"), up = stat(r, "normstar_up");
  line(4, r.failed == 0 && up == 0 && evaluated(r) >= 1000, "rebase bound, normstar unchanged",
       counts(r) + ", normstar equal " + std::to_string(same) + ", increased " + std::to_string(up) +
           first_fail(r));
}

using Bip = std::pair<std::vector<SpecFn>, std::vector<SpecFn>>;

std::vector<Bip> bipartitions(const std::vector<SpecFn>& val) {
  std::vector<Bip> out;
  const std::size_t n = val.size();
  // Fix the last element on side b so each unordered split appears once.
  for (Nat mask = 1; mask < (Nat{1} << (n - 1)); ++mask) {
    Bip b;
    for (std::size_t j = 0; j < n; ++j) (mask >> j & 1 ? b.first : b.second).push_back(val[j]);
    out.push_back(std::move(b));
  }
  return out;
}

void c5() {
  auto corpus = fixture_corpus();
  struct Item {
    SimpleCreature c;
    const AmbientTree* t;
    const GrowthSequences* g;
  };
  std::vector<Item> items;
  for (const auto& [fi, c] : corpus.creatures) items.push_back({c, &corpus.forests[fi], &corpus.toy});
  for (const auto& p : corpus.fragments)
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p.internal(k)) items.push_back({p.creature(k, corpus.lab), &corpus.chains, &corpus.lab});

  Nat checked = 0, splits = 0, bad1 = 0, bad2 = 0, badn = 0, too_big = 0;
  for (const auto& it : items) {
    if (it.c.val.size() < 2) continue;
    if (it.c.val.size() > 6) {
      ++too_big;
      continue;
    }
    auto whole = simple_norms(it.c, *it.t, *it.g);
    ++checked;
    auto parts = bipartitions(it.c.val);
    for (const auto& [a, b] : parts) {
      ++splits;
      auto sa = make_simple(it.c.i, it.c.base, a), sb = make_simple(it.c.i, it.c.base, b);
      auto na = simple_norms(sa, *it.t, *it.g), nb = simple_norms(sb, *it.t, *it.g);
      if (whole.norm1 >= 1 && std::max(na.norm1, nb.norm1) + 1 < whole.norm1) ++bad1;
      if (whole.norm2 >= 1 && std::max(na.norm2, nb.norm2) + 1 < whole.norm2) ++bad2;
      for (Nat k = 1; k <= std::max<Nat>(whole.normhalf, 1); ++k) {
        auto w = norms(Creature{it.c, k}, *it.t, *it.g);
        auto ra = norms(Creature{sa, k}, *it.t, *it.g), rb = norms(Creature{sb, k}, *it.t, *it.g);
        if (!lg_geq(ra.norm, w.norm, -1) && !lg_geq(rb.norm, w.norm, -1)) ++badn;
      }
    }
  }
  line(5, checked > 0 && bad1 + bad2 + badn == 0, "bigness on the corpus",
       std::to_string(checked) + " creatures, " + std::to_string(splits) + " bipartitions, failures norm1 " +
           std::to_string(bad1) + " norm2 " + std::to_string(bad2) + " norm " + std::to_string(badn) +
           ", " + std::to_string(too_big) + " above |val| 6 not split");
}

void c6() {
  auto r = run_until("halving", 3300, 1000, 6);
  line(6, r.failed == 0 && evaluated(r) >= 1000, "halving properties",
       counts(r) + ", repaired " + std::to_string(stat(r, "repaired")) + ", rounding kept " +
           std::to_string(stat(r, "rounded_ok")) + first_fail(r));
}

// Corpus fragments and fixed thinnings of them; every leq-accepted ordered pair.
void c7() {
  auto corpus = fixture_corpus();
  const auto& t = corpus.chains;
  const auto& g = corpus.lab;
  std::vector<Fragment> pool;
  for (std::size_t j = 0; j < corpus.fragments.size(); ++j) {
    const auto& p = corpus.fragments[j];
    pool.push_back(p);
    for (Nat s = 0; s < 2; ++s) {
      Rng r = instance_rng(707, 2 * j + s);
      pool.push_back(thin_above(r, p, uniform(r, 0, p.depth() - 1), 0, t, g));
    }
  }
  Nat pairs = 0, bad = 0, truncated = 0;
  std::string why;
  auto fail = [&](const std::string& w) {
    if (!bad++) why = w;
  };
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = 0; b < pool.size(); ++b) {
      const auto &p = pool[a], &q = pool[b];
      auto pq = leq(p, q, t, g);
      if (!pq.ok) continue;
      ++pairs;
      auto all = all_projections(p, q, g, 2);
      if (all.size() != 1 || all.front() != pq.map) fail("(1) projection not unique");
      auto ip = *q.kind(g);
      for (Nat l = 0; l <= q.depth(); ++l)
        if (q.level(l).size() >= g.n1[ip + l]) fail("(2) level bound");
      for (const auto& nd : q.nodes())
        if (!(nd.level == 0 && ip == 0 && nd.fn.empty()) &&
            !(ip + nd.level >= 1 && nd.fn.size() < g.n2[ip + nd.level - 1]))
          fail("(11) domain bound");
      for (std::size_t j = 0; j < q.size(); ++j) {
        auto pj = pq.map[j];
        if (!pj || !q.internal(j) || !p.internal(*pj)) continue;
        auto cq = q.creature(j, g), cp = p.creature(*pj, g);
        if (cq.i != cp.i) fail("(4) kind");
        if (norm0(cq, t, g) > norm0(cp, t, g)) fail("(5) norm0 grows");
      }
      for (Nat m = 0; m <= q.depth() + 1; ++m)
        if (leq_n(p, q, m + 1, t, g).ok && !leq_n(p, q, m, t, g).ok) fail("(7) <=_n+1 not in <=_n");
      for (std::size_t c = 0; c < pool.size(); ++c) {
        auto qs = leq(q, pool[c], t, g);
        if (!qs.ok) continue;
        auto ps = leq(p, pool[c], t, g);
        if (!ps.ok) fail("(3) transitivity");
        else
          for (std::size_t j = 0; j < pool[c].size(); ++j) {
            // Nodes beyond q's depth have no image through q; only p sees them directly.
            auto mid = qs.map[j];
            auto comp = mid ? pq.map[*mid] : std::nullopt;
            if (!comp && ps.map[j]) ++truncated;
            else if (comp != ps.map[j]) fail("(3) composed map");
          }
      }
    }
  auto r = run_until("claim2.8", 1000, 1000, 7);
  line(7, bad == 0 && r.failed == 0 && evaluated(r) >= 1000, "order battery",
       std::to_string(pairs) + " corpus pairs (" + std::to_string(bad) + " failures" +
           (bad ? ", " + why : "") + ", " + std::to_string(truncated) +
           " horizon-truncated compositions), random " + counts(r) + first_fail(r));
}

void c8() {
  auto r = run_until("fusion", 500, 500, 8);
  line(8, r.failed == 0 && evaluated(r) >= 500, "fusion", counts(r) + first_fail(r));
}

void c9() {
  auto r = run_until("smoothen", 120, 100, 9);
  line(9, r.failed == 0 && evaluated(r) >= 100, "smoothen",
       counts(r) + " (blocked " + std::to_string(stat(r, "blocked")) + ")" + first_fail(r));
}

void c10() {
  auto r = run_until("purify", 300, 100, 10);
  line(10, r.failed == 0 && evaluated(r) >= 100, "purify alternatives and norm drop",
       counts(r) + first_fail(r));
}

void c11() {
  auto t0 = Clock::now();
  auto r = run_until("decide", 150, 100, 11);
  double s = since(t0);
  line(11, r.failed == 0 && evaluated(r) >= 100 && s <= 300, "decide against the oracle",
       counts(r) + ", found " + std::to_string(stat(r, "found")) + ", not found " +
           std::to_string(stat(r, "not_found")) + ", " + secs(s) + first_fail(r));
}

std::string sh(const std::string& args) {
  std::string cmd = std::string(CREATURE_LAB_CLI) + " " + args + " 2>&1";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = pclose(p);
  return out + "\nexit " + std::to_string(WIFEXITED(st) ? WEXITSTATUS(st) : -1);
}

void c12() {
  auto corpus = fixture_corpus();
  Fixture fc;
  fc.params = corpus.lab;
  fc.tree = corpus.chains;
  fc.conditions = {corpus.fragments[3], corpus.fragments[4]};
  LeafLabeling lab;
  Nat v = 0;
  for (std::size_t leaf : fc.conditions[0].leaves()) lab[fc.conditions[0].node(leaf).fn] = v++ % 2;
  fc.labelings.push_back(lab);
  save_fixture("acceptance_conditions.json", fc);
  Fixture fx;
  for (std::size_t leaf : fc.conditions[0].leaves()) fx.specfns.push_back(fc.conditions[0].node(leaf).fn);
  save_fixture("acceptance_x.json", fx);
  Fixture ft;
  ft.params = corpus.toy;
  ft.tree = corpus.forests.back();
  ft.creatures.push_back(Creature{corpus.creatures.back().second, 1});
  save_fixture("acceptance_creature.json", ft);

  const std::vector<std::string> once = {
      "gen-tree --width 3 --height 5 --seed 4",
      "gen-params --growth lab",
      "norm --in acceptance_creature.json",
      "apply-op --op halve --in acceptance_creature.json",
      "check-condition --in acceptance_conditions.json",
      "check-leq --p acceptance_conditions.json --q acceptance_conditions.json --n 1",
      "purify --p acceptance_conditions.json --x acceptance_x.json --kstar 0",
      "decide --p acceptance_conditions.json --m 0",
  };
  const std::vector<std::string> jobs = {
      "propcheck --suite norm-oracle --count 300 --seed 12",
      "propcheck --suite glue --count 300 --seed 12",
      "propcheck --suite leq --count 100 --seed 12",
      "report --count 10 --seed 12",
  };
  Nat runs = 0;
  std::vector<std::string> diff;
  for (const auto& c : once) {
    runs += 2;
    if (sh(c) != sh(c)) diff.push_back(c);
  }
  for (const auto& c : jobs) {
    runs += 3;
    auto a = sh(c + " --jobs 1");
    if (a != sh(c + " --jobs 1") || a != sh(c + " --jobs 2")) diff.push_back(c);
  }
  std::remove("acceptance_conditions.json");
  std::remove("acceptance_creature.json");
  std::remove("acceptance_x.json");
  line(12, diff.empty(), "CLI determinism",
       std::to_string(runs) + " runs over " + std::to_string(once.size() + jobs.size()) + " commands" +
           (diff.empty() ? "" : ", differs: " + diff.front()));
}

}  // namespace

int main() {
  for (auto f : {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12}) {
    try {
      f();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  criterion threw: " << e.what() << std::endl;
    }
  }
  return failures ? 1 : 0;
}
