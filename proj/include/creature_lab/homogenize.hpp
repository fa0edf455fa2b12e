#pragma once

#include "creature_lab/forcing.hpp"

namespace cl {

/// Front node of a purified condition: either every cone node from `level_in_x` on lies
/// in X, or the cone misses X (level_in_x empty).
struct PurifiedCone {
  std::size_t node = 0;  // index in q
  std::optional<Nat> level_in_x;
};

struct PurifyResult {
  Fragment q;
  std::vector<PurifiedCone> front;
  std::vector<std::size_t> changed;  // indices in q whose successor set shrank
  bool leq_kstar = false;            // p <=_kstar q
};

/// X must be upward closed in p's tree order (given as fns of p).
PurifyResult purify(const Fragment& p, const std::set<SpecFn>& x, Nat kstar, const AmbientTree& t,
                    const GrowthSequences& g, const NormShape& shape = default_shape());

/// Replaces the counter at every internal node of level < nstar by its halving.
Fragment halve_below(const Fragment& p, Nat nstar, const AmbientTree& t, const GrowthSequences& g,
                     const NormShape& shape = default_shape());

/// Finite stand-in for a name: one value per leaf fn.
using LeafLabeling = std::map<SpecFn, Nat>;

struct DecideResult {
  bool found = false;
  Fragment q;
  Nat level = 0;
  std::map<SpecFn, Nat> values;  // level-`level` node -> forced label
  std::string path;              // "greedy" or "exhaustive"
  // Diagnostics over the new domains of the deciding level.
  std::size_t delta_root = 0, delta_members = 0, iso_classes = 0;
};

/// Searches the subconditions of p obtained by dropping successors (never at levels < m)
/// for q with p <=_m q and a level l < depth at which every cone is label-constant.
/// Minimal l first. not-found means the search space was exhausted.
DecideResult decide(const Fragment& p, const LeafLabeling& label, Nat m, const AmbientTree& t,
                    const GrowthSequences& g, const NormShape& shape = default_shape());

/// Brute force over every such subcondition, checked node by node; throws BudgetError past
/// the configured budget. Returns the minimal deciding level, if any.
std::optional<Nat> decide_oracle(const Fragment& p, const LeafLabeling& label, Nat m,
                                 const AmbientTree& t, const GrowthSequences& g,
                                 const NormShape& shape = default_shape());

/// Label constancy of every level-l cone of q.
bool decides_at(const Fragment& q, const LeafLabeling& label, Nat l);

/// Step budget from CREATURE_LAB_BUDGET, default 10^8.
Nat work_budget();

}  // namespace cl
