#pragma once

#include "creature_lab/ops.hpp"

namespace cl {

struct Coverage {
  Nat k = 0;
  Nat alpha = 0;
  NodeSet u;
  bool operator==(const Coverage&) const = default;
};

struct FNode {
  SpecFn fn;
  Nat level = 0;
  std::optional<std::size_t> parent;
  Nat klabel = 1;
  bool operator==(const FNode&) const = default;
};

/// A condition truncated at depth D: every leaf sits at level D.
class Fragment {
 public:
  Fragment() = default;
  /// Sorts nodes by (level, fn) and rewires parent indices; throws on dangling parents.
  Fragment(Nat depth, std::vector<FNode> nodes, std::optional<Coverage> cov = std::nullopt);

  Nat depth() const { return depth_; }
  const std::vector<FNode>& nodes() const { return nodes_; }
  const FNode& node(std::size_t k) const { return nodes_.at(k); }
  std::size_t size() const { return nodes_.size(); }
  const std::optional<Coverage>& coverage() const { return cov_; }
  void set_coverage(std::optional<Coverage> c) { cov_ = std::move(c); }
  void set_klabel(std::size_t k, Nat v) { nodes_.at(k).klabel = v; }

  std::size_t root() const;
  const std::vector<std::size_t>& children(std::size_t k) const { return children_.at(k); }
  bool internal(std::size_t k) const { return !children_.at(k).empty(); }
  std::vector<std::size_t> level(Nat l) const;
  std::optional<std::size_t> find(const SpecFn& f) const;
  /// a is a tree ancestor of b, or equal.
  bool tree_leq(std::size_t a, std::size_t b) const;
  /// i(p): kind forced by the root.
  std::optional<Nat> kind(const GrowthSequences& g) const;
  /// c_{p,eta} at an internal node.
  SimpleCreature creature(std::size_t k, const GrowthSequences& g) const;
  std::vector<std::size_t> leaves() const;

  bool operator==(const Fragment& o) const {
    return depth_ == o.depth_ && nodes_ == o.nodes_ && cov_ == o.cov_;
  }

 private:
  Nat depth_ = 0;
  std::vector<FNode> nodes_;
  std::vector<std::vector<std::size_t>> children_;
  std::optional<Coverage> cov_;
};

Report validate_condition(const Fragment& p, const AmbientTree& t, const GrowthSequences& g);

struct Projection {
  bool ok = false;
  std::string clause;   // first violated clause when !ok
  std::string witness;
  std::vector<std::optional<std::size_t>> map;  // q index -> p index; empty past p's horizon
};

struct LeqOptions {
  bool strict_f = false;  // (f) against every p-node above pr(nu), not just successors
};

/// p <= q (q stronger). The projection is computed, then checked clause by clause.
Projection leq(const Fragment& p, const Fragment& q, const AmbientTree& t,
               const GrowthSequences& g, LeqOptions opt = {});

struct LeqN {
  bool ok = false;
  std::string clause;
  Projection pr;
};
LeqN leq_n(const Fragment& p, const Fragment& q, Nat n, const AmbientTree& t,
           const GrowthSequences& g, const NormShape& shape = default_shape());

/// The cone {rho : eta ⊆ rho} with eta as root.
Fragment restrict(const Fragment& p, std::size_t eta);

/// Level bands [n_{i-1}, n_i) from q_i; the last fragment supplies the tail.
Fragment fuse(const std::vector<Fragment>& qs, const std::vector<Nat>& ns, const AmbientTree& t,
              const GrowthSequences& g, const NormShape& shape = default_shape());

struct Classification {
  bool normal = false, smooth = false, weakly_smooth = false;
  std::optional<Nat> alpha;
  std::string failure;  // set when coverage is claimed but does not hold
};
Classification classify(const Fragment& p, const AmbientTree& t, const GrowthSequences& g,
                        const NormShape& shape = default_shape());

/// Pairwise tree-incomparable and met by every root-to-leaf path.
bool is_front(const Fragment& p, const std::vector<std::size_t>& front);

Fragment amalgamate(const Fragment& p, const std::vector<std::size_t>& front,
                    const std::vector<Fragment>& qs, const AmbientTree& t,
                    const GrowthSequences& g);

struct SmoothenStats {
  Nat fills = 0, rebases = 0, points_added = 0;
};

/// Smooth q with alpha(q) = alpha and p <=_m q, built by fill/rebase top-down.
Fragment smoothen(const Fragment& p, Nat alpha, Nat m, const AmbientTree& t,
                  const GrowthSequences& g, SmoothenStats* stats = nullptr,
                  const NormShape& shape = default_shape());

/// Shrinks each internal creature to the minimum norm0 over its cone in p.
Fragment normalize_cone_min(const Fragment& p, const AmbientTree& t, const GrowthSequences& g);

/// norm(c+) at an internal node, with the node's klabel as counter.
LgRatio node_norm(const Fragment& p, std::size_t k, const AmbientTree& t,
                  const GrowthSequences& g, const NormShape& shape = default_shape());

}  // namespace cl
