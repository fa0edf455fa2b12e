#pragma once

#include "creature_lab/params.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace cl {

using Node = std::uint32_t;
using NodeSet = std::set<Node>;

/// Finite forest; node x sits at level x / width.
class AmbientTree {
 public:
  AmbientTree() = default;

  /// Nodes are the edge endpoints plus `extra`. Throws DomainError on a level skip,
  /// a second parent, or a cycle.
  static AmbientTree build(Nat width, const std::vector<std::pair<Node, Node>>& edges,
                           const std::vector<Node>& extra = {});

  Nat width() const { return width_; }
  Nat height() const { return height_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::pair<Node, Node>>& edges() const { return edges_; }
  bool contains(Node x) const { return index_.count(x) != 0; }
  Nat level(Node x) const { return x / width_; }
  std::optional<Node> parent(Node x) const;
  const std::vector<Node>& children(Node x) const;
  std::vector<Node> roots() const;
  std::vector<Node> leaves() const;

  /// x <_T y: x is a proper ancestor of y.
  bool below(Node x, Node y) const;
  bool comparable(Node x, Node y) const { return x == y || below(x, y) || below(y, x); }

  /// Maximal chains, each sorted, in lexicographic order.
  const std::vector<std::vector<Node>>& branches() const { return branches_; }
  NodeSet initial_segment(Nat alpha) const;

  bool operator==(const AmbientTree& o) const {
    return width_ == o.width_ && nodes_ == o.nodes_ && edges_ == o.edges_;
  }

 private:
  std::size_t idx(Node x) const;

  Nat width_ = 1, height_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::pair<Node, Node>> edges_;
  std::map<Node, std::size_t> index_;
  std::vector<std::optional<Node>> parent_;
  std::vector<std::vector<Node>> children_;
  std::vector<std::vector<bool>> below_;
  std::vector<std::vector<Node>> branches_;
};

std::vector<NodeSet> branches_of(const AmbientTree& t);
NodeSet initial_segment(const AmbientTree& t, Nat alpha);

}  // namespace cl
