#include "creature_lab/tree.hpp"

#include <algorithm>
#include <string>

namespace cl {

AmbientTree AmbientTree::build(Nat width, const std::vector<std::pair<Node, Node>>& edges,
                               const std::vector<Node>& extra) {
  if (width == 0) throw DomainError("tree width must be positive");
  AmbientTree t;
  t.width_ = width;
  std::set<Node> all(extra.begin(), extra.end());
  for (auto [p, c] : edges) {
    all.insert(p);
    all.insert(c);
  }
  t.nodes_.assign(all.begin(), all.end());
  for (std::size_t k = 0; k < t.nodes_.size(); ++k) t.index_[t.nodes_[k]] = k;
  const std::size_t n = t.nodes_.size();
  t.parent_.assign(n, std::nullopt);
  t.children_.assign(n, {});

  for (auto [p, c] : edges) {
    if (t.level(c) != t.level(p) + 1)
      throw DomainError("edge (" + std::to_string(p) + "," + std::to_string(c) +
                        ") violates the level interval rule");
    auto& slot = t.parent_[t.idx(c)];
    if (slot && *slot != p) throw DomainError("node " + std::to_string(c) + " has two parents");
    if (!slot) {
      slot = p;
      t.children_[t.idx(p)].push_back(c);
    }
  }
  // Levels strictly increase along edges, so cycles cannot occur. Roots live at level 0.
  for (Node x : t.nodes_)
    if (!t.parent_[t.idx(x)] && t.level(x) != 0)
      throw DomainError("node " + std::to_string(x) + " above level 0 has no parent");

  for (auto& ch : t.children_) std::sort(ch.begin(), ch.end());
  for (std::size_t k = 0; k < n; ++k)
    if (auto p = t.parent_[k]) t.edges_.emplace_back(*p, t.nodes_[k]);
  std::sort(t.edges_.begin(), t.edges_.end());

  t.below_.assign(n, std::vector<bool>(n, false));
  for (std::size_t k = 0; k < n; ++k) {
    auto p = t.parent_[k];
    while (p) {
      t.below_[t.idx(*p)][k] = true;
      p = t.parent_[t.idx(*p)];
    }
  }
  t.height_ = 0;
  for (Node x : t.nodes_) t.height_ = std::max<Nat>(t.height_, t.level(x) + 1);

  std::vector<Node> path;
  auto walk = [&](auto&& self, Node x) -> void {
    path.push_back(x);
    const auto& ch = t.children_[t.idx(x)];
    if (ch.empty()) t.branches_.push_back(path);
    for (Node c : ch) self(self, c);
    path.pop_back();
  };
  for (Node r : t.roots()) walk(walk, r);
  std::sort(t.branches_.begin(), t.branches_.end());
  return t;
}

std::size_t AmbientTree::idx(Node x) const {
  auto it = index_.find(x);
  if (it == index_.end()) throw DomainError("node " + std::to_string(x) + " not in tree");
  return it->second;
}

std::optional<Node> AmbientTree::parent(Node x) const { return parent_[idx(x)]; }

const std::vector<Node>& AmbientTree::children(Node x) const { return children_[idx(x)]; }

std::vector<Node> AmbientTree::roots() const {
  std::vector<Node> r;
  for (Node x : nodes_)
    if (!parent_[idx(x)]) r.push_back(x);
  return r;
}

std::vector<Node> AmbientTree::leaves() const {
  std::vector<Node> r;
  for (Node x : nodes_)
    if (children_[idx(x)].empty()) r.push_back(x);
  return r;
}

bool AmbientTree::below(Node x, Node y) const {
  auto a = index_.find(x), b = index_.find(y);
  if (a == index_.end() || b == index_.end()) return false;
  return below_[a->second][b->second];
}

NodeSet AmbientTree::initial_segment(Nat alpha) const {
  NodeSet s;
  for (Node x : nodes_)
    if (level(x) < alpha) s.insert(x);
  return s;
}

std::vector<NodeSet> branches_of(const AmbientTree& t) {
  std::vector<NodeSet> out;
  for (const auto& b : t.branches()) out.emplace_back(b.begin(), b.end());
  return out;
}

NodeSet initial_segment(const AmbientTree& t, Nat alpha) { return t.initial_segment(alpha); }

}  // namespace cl
