#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "crr/core.hpp"

namespace crr {

/// A point of a three-sided structure. `tag` is an opaque payload carried
/// along (the color in the color-reporting reduction).
struct PstPoint {
  Value x = 0;
  Value y = 0;
  std::uint32_t tag = 0;

  friend bool operator==(const PstPoint&, const PstPoint&) = default;
};

/// Priority search tree: min-heap on y, binary search tree on x via split
/// keys (left subtree x <= split < right subtree x). Answers [a,b] x [0,c).
///
/// Kept balanced by weight: when a child holds more than 70% of a subtree
/// of at least kMinRebuild points, that subtree is rebuilt.
class Pst {
 public:
  struct FlatNode {
    PstPoint point;
    Value split;
    std::int64_t left;   // index into the flattened array, -1 if absent
    std::int64_t right;
  };

  Pst();
  explicit Pst(std::vector<PstPoint> points);
  Pst(Pst&&) noexcept;
  Pst& operator=(Pst&&) noexcept;
  ~Pst();

  void insert(const PstPoint& p);
  void erase(Value x);
  bool contains(Value x) const;
  std::optional<PstPoint> find(Value x) const;

  /// Appends every point with a <= x <= b and y < c to `out`.
  void query(Value a, Value b, Value c, std::vector<PstPoint>& out,
             CostMeter* meter = nullptr) const;

  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  std::optional<PstPoint> top() const;
  std::vector<PstPoint> points() const;

  /// Heap order, split order and subtree sizes.
  bool check_invariants() const;

  /// Breadth-first copy of the node structure (root at index 0).
  std::vector<FlatNode> flatten() const;

  static constexpr std::size_t kMinRebuild = 8;

 private:
  struct Node;
  using NodePtr = std::unique_ptr<Node>;

  static NodePtr build(std::span<PstPoint> sorted_by_x);
  static void remove_top(NodePtr& slot);
  static void collect(const Node* n, std::vector<PstPoint>& out);
  void rebalance_path(Value x);

  NodePtr root_;
};

/// Slow one-dimensional color reporting: a PST over (e, prev(e)) answering
/// [a,b] x [0,a). Every reported point is the leftmost element of its color
/// in [a,b], so no duplicate removal is needed.
class SlowColorIndex {
 public:
  SlowColorIndex() = default;
  explicit SlowColorIndex(std::span<const ColoredPoint> sorted);

  std::vector<ColorId> query(Range q, CostMeter* meter = nullptr) const;
  const Pst& tree() const noexcept { return tree_; }

 private:
  Pst tree_;
};

/// Builds the (e, prev(e)) reduction points for a sorted point list.
std::vector<PstPoint> reduction_points(std::span<const ColoredPoint> sorted);

}  // namespace crr
