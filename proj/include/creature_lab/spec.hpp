#pragma once

#include "creature_lab/tree.hpp"

#include <compare>
#include <optional>
#include <string>
#include <variant>

namespace cl {

/// Finite partial function node -> value, kept sorted by node.
class SpecFn {
 public:
  using Entry = std::pair<Node, Nat>;

  SpecFn() = default;
  /// Throws DomainError if a node repeats with two values.
  explicit SpecFn(std::vector<Entry> entries);
  SpecFn(std::initializer_list<Entry> entries) : SpecFn(std::vector<Entry>(entries)) {}

  const std::vector<Entry>& entries() const { return a_; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }
  std::optional<Nat> at(Node x) const;
  bool defined(Node x) const { return at(x).has_value(); }
  NodeSet dom() const;
  /// Largest value plus one; 0 for the empty function.
  Nat value_bound() const;
  /// this ⊆ o as sets of pairs.
  bool subset_of(const SpecFn& o) const;
  /// Points of this outside dom(o).
  std::vector<Node> new_points(const SpecFn& o) const;
  SpecFn with(Node x, Nat v) const;
  SpecFn without(Node x) const;
  std::string str() const;

  auto operator<=>(const SpecFn&) const = default;
  bool operator==(const SpecFn&) const = default;

 private:
  std::vector<Entry> a_;
};

/// First pair of comparable nodes sharing a value, or a value >= bound (y empty).
struct SpecViolation {
  Node x;
  std::optional<Node> y;
};
std::optional<SpecViolation> spec_violation(const AmbientTree& t, const SpecFn& f, Nat bound);
bool is_spec(const AmbientTree& t, const SpecFn& f, Nat bound);
/// Comparable nodes carry distinct values; no bound.
bool is_spec(const AmbientTree& t, const SpecFn& f);

/// All total maps u -> [0,n) in spec_n(u), lexicographic in the values along sorted u.
std::vector<SpecFn> enumerate_spec(const AmbientTree& t, const NodeSet& u, Nat n);

struct Incompatible {
  Node x;
  std::optional<Node> y;  // empty: not a function at x
  bool operator==(const Incompatible&) const = default;
};
using UnionResult = std::variant<SpecFn, Incompatible>;
UnionResult union_spec(const AmbientTree& t, const SpecFn& a, const SpecFn& b);
/// Convenience: the union when compatible.
std::optional<SpecFn> try_union(const AmbientTree& t, const SpecFn& a, const SpecFn& b);

using NodeMap = std::map<Node, Node>;

/// Injection on base ∪ dom(a), identity on base, order preserving both ways,
/// mapping dom(a) onto dom(b) with matching values.
std::optional<NodeMap> isomorphic_over(const AmbientTree& t, const SpecFn& a, const SpecFn& b,
                                       const NodeSet& base);

struct DeltaSystem {
  NodeSet root;
  std::vector<std::size_t> members;
};
/// Greedy: tries the empty root, every member, and every pairwise intersection.
DeltaSystem delta_system(const std::vector<NodeSet>& family, const AmbientTree& t);
bool is_delta_system(const std::vector<NodeSet>& family, const AmbientTree& t,
                     const DeltaSystem& d);

}  // namespace cl
