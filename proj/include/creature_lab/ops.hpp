#pragma once

#include "creature_lab/creature.hpp"

namespace cl {

struct GlueResult {
  SimpleCreature d;
  Nat m0 = 0;
  Nat ell_star = 0;
};

/// ext[e][k] extends c.val[e] for k < kstar.
GlueResult glue(const SimpleCreature& c, const std::vector<std::vector<SpecFn>>& ext, Nat kstar,
                const AmbientTree& t, const GrowthSequences& g);

struct FillResult {
  SimpleCreature d;
  Nat k = 0, m = 0;
  std::vector<Nat> pool;                 // admissible values, smallest first
  std::vector<std::vector<Nat>> tuples;  // value tuples assigned to x_0..x_{m-1}
};

/// Hook for fault injection: when set, fill ignores the forbidden-value set.
struct FillOptions {
  bool skip_avoidance = false;
};

FillResult fill(const SimpleCreature& c, const std::vector<Node>& xs, const AmbientTree& t,
                const GrowthSequences& g, FillOptions opt = {});

struct RebaseResult {
  SimpleCreature d;
  Nat ell1 = 0, ell2 = 0;
  Nat bound = 0;
};

RebaseResult rebase(const SimpleCreature& c, const SpecFn& eta_star, const AmbientTree& t,
                    const GrowthSequences& g);

/// Greedy single-element deletion while norm0 stays >= k.
SimpleCreature shrink_to_norm(const SimpleCreature& c, Nat k, const AmbientTree& t,
                              const GrowthSequences& g);

enum class Measure { norm1, norm2, norm };

struct SplitResult {
  int side = 1;
  SimpleCreature survivor;
  std::optional<Nat> value1, value2;   // norm1 or norm2 per side; empty when omitted
  std::optional<LgRatio> real1, real2;  // norm per side for Measure::norm
};

/// val1 ∪ val2 must equal c.val. For Measure::norm both sides share counter k.
SplitResult bigness_split(const SimpleCreature& c, const std::vector<SpecFn>& val1,
                          const std::vector<SpecFn>& val2, const AmbientTree& t,
                          const GrowthSequences& g, Measure m = Measure::norm1, Nat k = 1,
                          const NormShape& shape = default_shape());

struct HalveResult {
  Creature out;
  Nat kprime = 0;
  Nat rounded = 0;  // the shape's own witness
  bool repaired = false;
  bool prop2 = false, prop3 = false;
};

/// Halving of the counter; the simple part is untouched.
/// Takes normhalf of the simple part as input so callers can reuse computed norms.
HalveResult halve(const Creature& c, Nat normhalf, const NormShape& shape = default_shape());
HalveResult halve(const Creature& c, const AmbientTree& t, const GrowthSequences& g,
                  const NormShape& shape = default_shape());

/// Property (2): f(nh, k') >= f(nh, k) - 1.
bool halving_prop2(Nat nh, Nat k, Nat kprime, const NormShape& shape = default_shape());
/// Property (3), worst case: every c' with f(nh', kk) > 0 for some kk >= k' has
/// f(nh', k) >= f(nh, k). Monotonicity reduces this to nh' = k' + 1.
bool halving_prop3(Nat nh, Nat k, Nat kprime, const NormShape& shape = default_shape());

}  // namespace cl
