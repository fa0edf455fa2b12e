#pragma once

#include "creature_lab/spec.hpp"

namespace cl {

struct SimpleCreature {
  Nat i = 0;
  SpecFn base;
  std::vector<SpecFn> val;  // sorted, no duplicates

  /// Sorts and dedupes val.
  void normalize();
  bool operator==(const SimpleCreature&) const = default;
};

SimpleCreature make_simple(Nat i, SpecFn base, std::vector<SpecFn> val);

struct Creature {
  SimpleCreature c;
  Nat k = 1;
  bool operator==(const Creature&) const = default;
};

/// Kind forced by a base: 0 for the empty base, otherwise the smallest i >= 1
/// with |dom| <= n2[i-1]. Empty optional if no index up to imax qualifies.
std::optional<Nat> kind_of(const SpecFn& base, const GrowthSequences& g);

struct ClauseCheck {
  std::string clause;
  bool ok = true;
  std::string witness;
};

struct Report {
  std::vector<ClauseCheck> checks;
  bool ok() const;
  /// First failing clause name, empty if all pass.
  std::string first_failure() const;
  std::string str() const;
};

/// Clauses (a), (b), (c) and (d); total.
Report validate_creature(const SimpleCreature& c, const GrowthSequences& g, const AmbientTree& t);
/// (a)-(c) only; norm computations require these.
Report validate_shape(const SimpleCreature& c, const GrowthSequences& g, const AmbientTree& t);

/// Witness (eta1, x) for a failure of clause (d).
std::optional<std::pair<SpecFn, Node>> clause_d_violation(const SimpleCreature& c);

/// Largest k <= n1[i] such that every |a| <= k and k branches leave a survivor.
/// Throws DomainError when (a)-(c) fail.
Nat norm0(const SimpleCreature& c, const AmbientTree& t, const GrowthSequences& g);

/// log_2(n1[i] / |val|) with the ceiling convention.
Nat normstar(const SimpleCreature& c, const GrowthSequences& g);

struct Norms {
  Nat norm0 = 0, normstar = 0, normhalf = 0, norm1 = 0, norm2 = 0;
  LgRatio norm;
  bool operator==(const Norms& o) const {
    return norm0 == o.norm0 && normstar == o.normstar && normhalf == o.normhalf &&
           norm1 == o.norm1 && norm2 == o.norm2 && norm.num == o.norm.num &&
           norm.den == o.norm.den;
  }
};

Norms norms(const Creature& c, const AmbientTree& t, const GrowthSequences& g,
            const NormShape& shape = default_shape());
/// norm0/normstar/normhalf/norm1/norm2 of a simple creature; norm left at zero.
Norms simple_norms(const SimpleCreature& c, const AmbientTree& t, const GrowthSequences& g);

/// Base recovered as the intersection of val, kind recovered from that base.
struct Reconstruction {
  SpecFn base;
  std::optional<Nat> i;
  bool matches = false;
};
Reconstruction reconstruct(const SimpleCreature& c, const GrowthSequences& g);

}  // namespace cl
