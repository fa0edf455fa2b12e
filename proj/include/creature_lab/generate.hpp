#pragma once

#include "creature_lab/forcing.hpp"

#include <random>

namespace cl {

using Rng = std::mt19937_64;

Nat splitmix64(Nat& state);
/// Independent stream for instance `index` of a run seeded with `seed`.
Rng instance_rng(Nat seed, Nat index);
Nat uniform(Rng& r, Nat lo, Nat hi);  // inclusive

/// Small profile for exhaustive sweeps: values below 8, |val| <= 4.
GrowthSequences toy_growth();
/// Profile for fragments: kinds 1..4 with room for norm0 up to 7 at kind 3.
GrowthSequences lab_growth();

/// Each node of level l+1 is present with probability `density` and hangs under a
/// random node of level l. Level 0 always has at least one root.
AmbientTree random_forest(Rng& r, Nat width, Nat height, double density = 0.7);
/// `width` disjoint chains of the given height; at most `width` branches.
AmbientTree chain_forest(Nat width, Nat height);
/// Three fixed forests with at most 10 nodes and width at most 3.
std::vector<AmbientTree> sweep_forests();

struct CreatureGen {
  Nat max_val = 4;   // |val| upper bound (also capped by n1[i] - 1)
  Nat max_new = 2;   // new points per value element
  Nat value_bound = 0;  // 0: use n3[i]
};
/// Rejection-samples a creature passing validate_creature; nullopt after `tries`.
std::optional<SimpleCreature> random_creature(Rng& r, const AmbientTree& t,
                                              const GrowthSequences& g, Nat i,
                                              const CreatureGen& opt = {}, int tries = 200);

/// Level-major plan: all nodes of a level share one domain, siblings differ on every
/// new point. dom[l] is the cumulative domain size at level l (points taken in id order),
/// branching[l] the number of children of each level-l node.
struct FragmentPlan {
  Nat depth = 1;
  std::vector<Nat> dom;
  std::vector<Nat> branching;
  std::vector<Nat> klabel;  // per level, default 1
  std::optional<Coverage> coverage;
};
Fragment build_fragment(const AmbientTree& t, const FragmentPlan& plan);

/// Random plan valid under lab_growth with root kind i0, for a chain forest with enough
/// nodes; i0 + depth <= 4.
FragmentPlan random_plan(Rng& r, const AmbientTree& t, Nat depth, Nat max_branch = 3,
                         Nat i0 = 1);

/// p misses a few top points of T_<alpha at its leaves; root kind 2 leaves room to fill.
struct SmoothCase {
  Fragment p;
  Nat alpha = 0, m = 0;
};
/// Needs a 4-wide chain forest of height >= 80; depth 1 or 2.
SmoothCase smoothen_case(Rng& r, const AmbientTree& t, Nat depth);

/// Drops children of level-`level` nodes while the creature's norm stays >= n,
/// giving q with p <=_n q when `level` >= n. Returns p unchanged if nothing can go.
Fragment thin_above(Rng& r, const Fragment& p, Nat level, Nat n, const AmbientTree& t,
                    const GrowthSequences& g);

}  // namespace cl
