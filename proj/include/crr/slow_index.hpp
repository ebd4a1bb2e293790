#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crr/core.hpp"
#include "crr/static_index.hpp"

namespace crr {

/// Dynamic color reporting with cheap updates and O(sqrt(n_ab) + loglog n + k)
/// queries, over a range tree whose fanout shrinks doubly exponentially with
/// depth.
///
/// Every element e is stored at exactly one node: the child of the lowest
/// common ancestor of e and prev(e) on e's side (the root when e has no
/// prev, nowhere when both sit in the same leaf). That node is top(e), and
/// C(u) is the set of elements with top(e) = u. The query reads C(u) by
/// value (V) on the path to a, by prev (P) on subtrees hanging right of that
/// path, and by value inside [a,b] above the split node.
class SlowIndex {
 public:
  using NodeId = std::int32_t;
  static constexpr NodeId kNone = -1;

  struct Node {
    NodeId parent = kNone;
    unsigned depth = 0;
    Value lo = 0;                     // key range [lo, hi]
    Value hi = 0;
    std::size_t size = 0;             // live elements below
    std::vector<NodeId> children;
    std::vector<Value> m;             // m[j] = lowest key of child j
    std::vector<Value> bucket;        // leaves, ascending
    std::set<Value> v;                // C(u) by value
    std::set<std::pair<Value, Value>> p;  // C(u) as (prev, value)
    bool is_leaf() const noexcept { return children.empty(); }
  };

  SlowIndex() : SlowIndex(std::span<const ColoredPoint>{}) {}
  explicit SlowIndex(std::span<const ColoredPoint> sorted);

  void insert(ColoredPoint p);  // throws DuplicateCoordinate / InvalidArgument
  void erase(Value v);          // throws NotFound
  bool contains(Value v) const { return elems_.count(v) != 0; }
  std::size_t size() const noexcept { return elems_.size(); }
  std::size_t color_count() const noexcept { return by_color_.size(); }

  std::vector<ColorId> query(Range q, QueryScratch& scratch) const;
  std::vector<ColorId> query(Range q) const;
  /// Leftmost element of every color in q, unordered. Stops once more than
  /// `limit` elements were produced and returns false.
  bool report(Range q, std::vector<ColoredPoint>& out, CostMeter* meter = nullptr,
              std::size_t limit = SIZE_MAX) const;

  /// The k colors whose first occurrence in q is leftmost, in that order.
  std::vector<ColorId> k_leftmost(Range q, std::size_t k, CostMeter* meter = nullptr) const;
  /// The k colors whose last occurrence in q is rightmost, in that order.
  std::vector<ColorId> k_rightmost(Range q, std::size_t k, CostMeter* meter = nullptr) const;

  ColorId color_of(Value v) const { return elems_.at(v).color; }
  Value prev_of(Value v) const { return elems_.at(v).prev; }
  /// Same-color neighbours, kNoPrev when absent.
  Value next_of(Value v) const;

  NodeId root() const noexcept { return root_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  NodeId top_of(Value v) const;
  unsigned height() const;
  std::size_t n0() const noexcept { return n0_; }
  /// Nominal size of a depth-d node: n0^(1/2^d).
  double capacity(unsigned depth) const;
  std::size_t rebuild_count() const noexcept { return rebuilds_; }
  std::size_t split_count() const noexcept { return splits_; }
  std::vector<NodeId> live_nodes() const;
  std::vector<Value> values_below(NodeId u) const;

  /// Empty when sizes, routing, buckets and every C(u) agree with a
  /// recomputation from scratch.
  std::string check_invariants() const;

 private:
  struct Elem {
    ColorId color;
    Value prev;
  };

  void rebuild_all();
  NodeId alloc();
  void release(NodeId u);
  /// Builds a subtree over sorted values with the given key range; C sets
  /// are filled afterwards by place().
  NodeId build(NodeId parent, unsigned depth, Value lo, Value hi, std::span<const Value> vals);
  std::size_t route(const Node& n, Value v) const;
  NodeId leaf_of(Value v, std::vector<NodeId>* path = nullptr, CostMeter* meter = nullptr) const;
  NodeId compute_top(Value v, Value prev) const;
  void place(Value v);
  void unplace(Value v);
  void replace_subtree(NodeId u, std::vector<NodeId> parts);
  void maybe_split(const std::vector<NodeId>& path);
  void collect(NodeId u, std::vector<Value>& out) const;

  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  NodeId root_ = kNone;
  std::unordered_map<Value, Elem> elems_;
  std::unordered_map<Value, NodeId> top_;
  std::map<ColorId, std::set<Value>> by_color_;
  std::size_t n0_ = 0;
  std::size_t deletions_ = 0;
  std::size_t rebuilds_ = 0;
  std::size_t splits_ = 0;
};

}  // namespace crr
