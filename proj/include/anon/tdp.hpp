#pragma once

// Trickle-down decomposition of a mixed strategy into a binary tree whose
// leaves are two-outcome distributions, with sampling, leaf typing and the
// cell-equivalence key used to cluster players before rounding.
//
// Node ordering rule: the strategy with the largest probability is placed
// second; the rest follow in non-decreasing probability. When several
// strategies tie for the maximum, the smallest index goes second; remaining
// ties are broken by strategy index.

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anon/error.hpp"
#include "anon/rational.hpp"

namespace anon {

enum class LeafType { A, B };

struct TdpNode {
  std::vector<int> strategies;  // in node order
  RationalVector probs;         // aligned with strategies
  int depth = 0;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return left < 0; }
};

/// Nodes are stored in preorder; nodes[0] is the root.
struct TdpTree {
  int k = 0;
  std::vector<TdpNode> nodes;

  const TdpNode& root() const { return nodes.front(); }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
      if (nodes[i].is_leaf()) out.push_back(i);
    return out;
  }

  int max_depth() const {
    int d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
  }
};

namespace detail {

struct Weighted {
  int strategy;
  Rational prob;
};

inline std::vector<Weighted> order_for_tdp(std::vector<Weighted> items) {
  if (items.size() <= 1) return items;
  auto top = std::max_element(items.begin(), items.end(), [](const Weighted& a, const Weighted& b) {
    if (a.prob != b.prob) return a.prob < b.prob;
    return a.strategy > b.strategy;  // smallest index wins a tie for the maximum
  });
  Weighted largest = *top;
  items.erase(top);
  std::sort(items.begin(), items.end(), [](const Weighted& a, const Weighted& b) {
    if (a.prob != b.prob) return a.prob < b.prob;
    return a.strategy < b.strategy;
  });
  items.insert(items.begin() + 1, largest);
  return items;
}

/// Index l (0-based) with prefix mass before l at most 1/2 and suffix mass
/// after l below 1/2. Strictly positive masses make it unique; a second hit
/// is reported as an error rather than silently resolved.
inline std::size_t split_index(const std::vector<Weighted>& items) {
  const Rational half(1, 2);
  Rational total = 0;
  for (const auto& w : items) total += w.prob;
  std::optional<std::size_t> found;
  Rational prefix = 0;
  for (std::size_t l = 0; l < items.size(); ++l) {
    Rational suffix = total - prefix - items[l].prob;
    if (prefix <= half && suffix < half) {
      if (found) throw Error("TDP split index is not unique");
      found = l;
    }
    prefix += items[l].prob;
  }
  if (!found) throw Error("TDP split index not found");
  return *found;
}

inline void build_node(TdpTree& tree, std::vector<Weighted> items, int depth) {
  items = order_for_tdp(std::move(items));
  const int self = static_cast<int>(tree.nodes.size());
  TdpNode node;
  node.depth = depth;
  for (const auto& w : items) {
    node.strategies.push_back(w.strategy);
    node.probs.push_back(w.prob);
  }
  tree.nodes.push_back(std::move(node));
  if (items.size() <= 2) return;

  const std::size_t split = split_index(items);

  std::vector<Weighted> left;
  Rational used = 0;
  for (std::size_t l = 0; l < split; ++l) {
    Rational doubled = 2 * items[l].prob;
    used += doubled;
    left.push_back({items[l].strategy, doubled});
  }
  Rational t = 1 - used;
  if (t != 0) left.push_back({items[split].strategy, t});

  std::vector<Weighted> right;
  used = 0;
  for (std::size_t l = split + 1; l < items.size(); ++l) {
    Rational doubled = 2 * items[l].prob;
    used += doubled;
    right.push_back({items[l].strategy, doubled});
  }
  right.insert(right.begin(), Weighted{items[split].strategy, Rational(1 - used)});

  tree.nodes[self].left = static_cast<int>(tree.nodes.size());
  build_node(tree, std::move(left), depth + 1);
  tree.nodes[self].right = static_cast<int>(tree.nodes.size());
  build_node(tree, std::move(right), depth + 1);
}

}  // namespace detail

/// Builds the tree for the distribution probs over the listed strategies
/// (indices in [0, k)). Every probability must be strictly positive and the
/// total exactly 1.
inline TdpTree build_tdp_tree(const std::vector<int>& strategies, const RationalVector& probs, int k) {
  if (strategies.empty() || strategies.size() != probs.size())
    throw Error("build_tdp_tree: strategy and probability lists must be non-empty and aligned");
  std::vector<detail::Weighted> items;
  Rational total = 0;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    if (strategies[i] < 0 || strategies[i] >= k) throw Error("build_tdp_tree: strategy index out of range");
    if (probs[i] <= 0) throw Error("build_tdp_tree: zero probability in input");
    total += probs[i];
    items.push_back({strategies[i], probs[i]});
  }
  if (total != 1) throw Error("build_tdp_tree: probabilities do not sum to 1");
  TdpTree tree;
  tree.k = k;
  detail::build_node(tree, std::move(items), 0);
  return tree;
}

/// Tree of a full distribution over [k], restricted to its support.
inline TdpTree tdp_tree_of(const RationalVector& dist) {
  std::vector<int> support;
  RationalVector probs;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] < 0) throw Error("negative probability");
    if (dist[i] > 0) {
      support.push_back(static_cast<int>(i));
      probs.push_back(dist[i]);
    }
  }
  return build_tdp_tree(support, probs, static_cast<int>(dist.size()));
}

/// p(l) = sum over leaves v containing l of 2^-depth(v) * p_v(l).
inline RationalVector reconstruct_distribution(const TdpTree& tree) {
  RationalVector out(static_cast<std::size_t>(tree.k), Rational(0));
  for (const auto& node : tree.nodes) {
    if (!node.is_leaf()) continue;
    Rational weight(1);
    weight /= Rational(Integer(1) << node.depth);
    for (std::size_t j = 0; j < node.strategies.size(); ++j) out[node.strategies[j]] += weight * node.probs[j];
  }
  return out;
}

/// Fair coin at every internal node, then the leaf's two-way choice.
template <typename Rng>
int sample_strategy(const TdpTree& tree, Rng& rng) {
  const TdpNode* node = &tree.root();
  while (!node->is_leaf()) {
    const bool go_right = (rng() >> 63) != 0;
    node = &tree.nodes[go_right ? node->right : node->left];
  }
  if (node->strategies.size() == 1) return node->strategies[0];
  const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
  return u < node->probs[0].get_d() ? node->strategies[0] : node->strategies[1];
}

/// floor(z^alpha) / z, the Type A/B cutoff.
inline Rational leaf_threshold(unsigned long z, const Rational& alpha) {
  Rational t(floor_root_power(z, alpha), Integer(z));
  t.canonicalize();
  return t;
}

/// Type A iff the smaller leaf probability (first in node order) is at most
/// floor(z^alpha)/z.
inline LeafType classify_leaf(const TdpNode& leaf, unsigned long z, const Rational& alpha) {
  if (!leaf.is_leaf()) throw Error("classify_leaf: node is not a leaf");
  if (leaf.strategies.size() != 2) throw Error("classify_leaf: leaf must have support size 2");
  if (z < 2) throw Error("classify_leaf: z must be at least 2");
  return leaf.probs[0] <= leaf_threshold(z, alpha) ? LeafType::A : LeafType::B;
}

/// Canonical cell key: preorder encoding of shape, ordered strategy lists
/// and leaf types. Children are ordered (left holds the node's first
/// strategy), so string equality is exactly order-preserving isomorphism.
struct CellSignature {
  std::string key;

  friend bool operator==(const CellSignature&, const CellSignature&) = default;
  friend auto operator<=>(const CellSignature&, const CellSignature&) = default;
};

inline CellSignature cell_signature(const TdpTree& tree, unsigned long z, const Rational& alpha) {
  std::string key;
  auto visit = [&](auto&& self, int index) -> void {
    const TdpNode& node = tree.nodes[index];
    key.push_back('(');
    for (std::size_t j = 0; j < node.strategies.size(); ++j) {
      if (j) key.push_back(',');
      key += std::to_string(node.strategies[j]);
    }
    if (node.is_leaf()) {
      if (node.strategies.size() == 2) key += classify_leaf(node, z, alpha) == LeafType::A ? ":A" : ":B";
    } else {
      self(self, node.left);
      self(self, node.right);
    }
    key.push_back(')');
  };
  visit(visit, 0);
  return {key};
}

/// True when every node satisfies the ordering rule and sums to one.
inline bool check_node_ordering(const TdpTree& tree) {
  for (const auto& node : tree.nodes) {
    if (sum(node.probs) != 1) return false;
    std::vector<detail::Weighted> items;
    for (std::size_t j = 0; j < node.strategies.size(); ++j) items.push_back({node.strategies[j], node.probs[j]});
    auto expected = detail::order_for_tdp(items);
    for (std::size_t j = 0; j < items.size(); ++j)
      if (expected[j].strategy != items[j].strategy) return false;
  }
  return true;
}

/// Indented text dump, strategies printed 1-based.
inline std::string dump_tree(const TdpTree& tree, std::optional<unsigned long> z = std::nullopt,
                             const Rational& alpha = Rational(3, 5)) {
  std::ostringstream out;
  for (const auto& node : tree.nodes) {
    out << std::string(static_cast<std::size_t>(2 * node.depth), ' ') << "depth " << node.depth << " S=(";
    for (std::size_t j = 0; j < node.strategies.size(); ++j) out << (j ? "," : "") << node.strategies[j] + 1;
    out << ") p=(";
    for (std::size_t j = 0; j < node.probs.size(); ++j) out << (j ? "," : "") << to_string(node.probs[j]);
    out << ")";
    if (node.is_leaf()) {
      out << " leaf";
      if (z && node.strategies.size() == 2) out << (classify_leaf(node, *z, alpha) == LeafType::A ? " type=A" : " type=B");
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace anon
