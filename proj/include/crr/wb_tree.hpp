#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crr/core.hpp"

namespace crr {

struct WbOptions {
  /// Leaf parameter. 0 picks ceil(log2 n0)^2 at every (re)build.
  std::size_t leaf_weight = 0;
};

/// Weight-balanced B-tree with branching parameter 8 over a set of values.
///
/// A level-l node nominally holds 8^l * leaf_weight elements and splits
/// once it exceeds twice that. Deletions leave separators stale. The tree
/// is rebuilt from scratch after n0/2 deletions, when the size passes 2*n0,
/// or when a non-root node drops below a quarter of its nominal weight.
///
/// Each leaf keeps the two highest-range-ancestor sequences: for every
/// ancestor u reached through child i, K1 holds m_i(u) (the largest middle
/// value left of the path, when i > 0) and K2 holds m_{i+1}(u) (the smallest
/// one right of it). Both are ordered bottom-up.
class WbTree {
 public:
  using NodeId = std::int32_t;
  static constexpr NodeId kNone = -1;
  static constexpr std::size_t kBranching = 8;

  struct HraEntry {
    Value m;
    NodeId node;
  };

  struct Node {
    NodeId parent = kNone;
    unsigned level = 0;
    Value lo = 0;                   // key range [lo, hi]
    Value hi = 0;
    std::size_t weight = 0;
    std::vector<NodeId> children;   // internal nodes
    std::vector<Value> m;           // m[j] = lowest key routed to child j; m[0] = lo
    std::vector<Value> values;      // leaves, ascending
    std::vector<HraEntry> k1, k2;   // leaves
    bool is_leaf() const noexcept { return children.empty(); }
  };

  /// What an update did to the shape, for owners that mirror per-node data.
  struct UpdateEvent {
    bool rebuilt = false;
    bool root_split = false;
    std::vector<std::pair<NodeId, NodeId>> splits;  // (u', u''), bottom-up
  };

  struct Subrange {
    std::size_t child;  // 0-based child index
    Value a;
    Value b;
  };

  explicit WbTree(std::span<const Value> sorted = {}, WbOptions opts = {});

  UpdateEvent insert(Value v);  // throws DuplicateCoordinate
  UpdateEvent erase(Value v);   // throws NotFound
  bool contains(Value v) const;

  NodeId root() const noexcept { return root_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  unsigned height() const { return node(root_).level; }
  std::size_t size() const noexcept { return size_; }
  std::size_t n0() const noexcept { return n0_; }
  std::size_t leaf_weight() const noexcept { return leaf_weight_; }
  std::size_t nominal(unsigned level) const;

  NodeId leaf_of(Value v) const;
  /// Index of the child of internal node u whose key range holds v (clamped).
  std::size_t route(NodeId u, Value v) const;
  /// Leaves in key order.
  std::vector<NodeId> leaves() const;
  /// All values stored below u, ascending.
  std::vector<Value> values_below(NodeId u) const;
  /// Child index of `child` in its parent.
  std::size_t child_index(NodeId child) const;

  /// Highest ancestor u of `leaf` with a < m_i(u) <= b for some i >= 1, or
  /// kNone. Requires S(leaf) to intersect q.
  NodeId hra_query(NodeId leaf, Range q, CostMeter* meter = nullptr) const;
  /// Splits [a,b] across the children of u: the first and last pieces are
  /// clipped to a and b, inner pieces span whole children.
  std::vector<Subrange> child_subranges(NodeId u, Range q) const;
  /// The same split for a bare separator array (m[0] = the node's low key).
  static std::vector<Subrange> split_range(std::span<const Value> m, Range q);

  std::size_t splits_at_level(unsigned level) const;
  std::size_t inserts_since_build() const noexcept { return inserts_; }
  std::size_t rebuild_count() const noexcept { return rebuilds_; }

  /// Empty string when all structural invariants hold, else a description.
  std::string check_invariants() const;

 private:
  NodeId alloc();
  void build(std::vector<Value> sorted);
  void rebuild();
  void split(NodeId x, UpdateEvent& ev);
  void refresh_hra(NodeId top);
  void refresh_leaf(NodeId leaf);
  std::vector<NodeId> path_to(Value v) const;

  WbOptions opts_;
  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  NodeId root_ = kNone;
  std::size_t size_ = 0;
  std::size_t n0_ = 0;
  std::size_t leaf_weight_ = 1;
  std::size_t deletions_ = 0;
  std::size_t inserts_ = 0;
  std::size_t rebuilds_ = 0;
  std::vector<std::size_t> splits_;
};

}  // namespace crr
