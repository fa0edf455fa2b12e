#pragma once

#include "creature_lab/fixture.hpp"
#include "creature_lab/generate.hpp"

namespace cl {

/// Literal reading of the norm0 definition: every a ⊆ [0, n3[i]) with |a| <= k and every
/// ordered k-tuple of full branches, no trace reduction. Same cap as norm0.
/// Throws BudgetError once the step count passes `budget` (0: work_budget()).
Nat oracle_norm0(const SimpleCreature& c, const AmbientTree& t, const GrowthSequences& g,
                 Nat budget = 0);

/// Every projection of q into p satisfying order clauses (b)-(f), by backtracking.
/// Stops after `limit` maps.
std::vector<std::vector<std::optional<std::size_t>>> all_projections(const Fragment& p,
                                                                     const Fragment& q,
                                                                     const GrowthSequences& g,
                                                                     std::size_t limit = 2);

const std::vector<std::string>& suite_names();

struct PropcheckOptions {
  unsigned jobs = 1;
  bool inject_fill_fault = false;
};

struct SuiteReport {
  std::string suite;
  Nat count = 0, seed = 0;
  Nat passed = 0, failed = 0, skipped = 0, budget = 0;
  std::map<std::string, Nat> stats;  // summed over instances
  std::optional<Nat> first_failure;  // instance index
  std::string failure;
  std::optional<Json> counterexample;  // minimized fixture

  /// 1 on any failure, else 2 if some instance ran out of budget, else 0.
  int exit_code() const;
  std::string text() const;
};

/// Throws DomainError for an unknown suite. Output does not depend on opt.jobs.
SuiteReport propcheck(const std::string& suite, Nat count, Nat seed, PropcheckOptions opt = {});

/// Small deterministic corpus: toy creatures over the sweep forests and lab fragments.
struct Corpus {
  GrowthSequences toy, lab;
  std::vector<AmbientTree> forests;
  std::vector<std::pair<std::size_t, SimpleCreature>> creatures;  // forest index, creature
  AmbientTree chains;
  std::vector<Fragment> fragments;  // over `chains`, lab profile
};
Corpus fixture_corpus();

/// Valid creatures over t: base {r -> 0} for the first root r plus subsets (size <= max_val)
/// of the base and its one-point extensions with values below `values`.
std::vector<SimpleCreature> sweep_creatures(const AmbientTree& t, const GrowthSequences& g,
                                            Nat values = 4, Nat max_val = 4);

}  // namespace cl
