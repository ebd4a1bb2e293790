#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "crr/core.hpp"
#include "crr/locate.hpp"
#include "crr/pst.hpp"

namespace crr {

/// Scratch owned by one querying thread.
struct QueryScratch {
  ColArray col;
  CostMeter meter;
  std::vector<ColorId> raw;  // pre-dedup colors of the last query
  bool fallback = false;     // the last query used the slow structure
};

/// Static color reporting in O(t_locate + k): a balanced binary tree over
/// leaves of ceil(log2 N) points, with per-node lists of color extremes and a
/// per-leaf highest-range-ancestor table.
class StaticIndex {
 public:
  static constexpr std::int32_t kNone = -1;

  struct Node {
    std::int32_t parent = kNone;
    std::int32_t left = kNone;
    std::int32_t right = kNone;
    std::int32_t leaf = kNone;   // leaf number, kNone for internal nodes
    std::uint32_t depth = 0;
    Value m = 0;                 // min of the right subtree (internal only)
    std::uint32_t first = 0;     // point index range [first, last)
    std::uint32_t last = 0;
    std::uint32_t list_off = 0;  // L(u) for right children, R(u) for left
    std::uint32_t list_len = 0;
  };

  struct HraEntry {
    Value m;
    std::int32_t node;
  };

  /// `capacity` sets both the leaf size and the list length; 0 picks
  /// ceil(log2 N).
  explicit StaticIndex(std::span<const ColoredPoint> sorted,
                       LocateBackend backend = LocateBackend::SortedArray,
                       std::size_t capacity = 0);

  std::vector<ColorId> query(Range q, QueryScratch& scratch) const;
  std::vector<ColorId> query(Range q) const;

  /// Index (into points()) of some point in q.
  std::optional<std::size_t> one_report(Range q, CostMeter* meter = nullptr) const;
  /// Highest ancestor u of `leaf` with a < m(u) <= b, or kNone. Requires
  /// S(leaf) to intersect q.
  std::int32_t hra_query(std::size_t leaf, Range q, CostMeter* meter = nullptr) const;

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t leaf_capacity() const noexcept { return leaf_cap_; }
  std::size_t list_cap() const noexcept { return list_cap_; }
  std::size_t leaf_count() const noexcept { return leaf_nodes_.size(); }
  std::int32_t root() const noexcept { return root_; }
  std::size_t leaf_begin(std::size_t leaf) const { return node(leaf_node(leaf)).first; }
  const Node& node(std::int32_t id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::int32_t leaf_node(std::size_t leaf) const { return leaf_nodes_.at(leaf); }
  std::size_t leaf_of_point(std::size_t index) const { return index / leaf_cap_; }
  std::span<const ColoredPoint> points() const noexcept { return points_; }
  std::span<const Value> prev() const noexcept { return prev_; }
  std::span<const ColoredPoint> list(std::int32_t id) const;
  bool is_right_child(std::int32_t id) const;
  std::span<const HraEntry> k1(std::size_t leaf) const;  // left parents, bottom-up
  std::span<const HraEntry> k2(std::size_t leaf) const;  // right parents, bottom-up
  std::size_t total_list_entries() const noexcept { return lists_.size(); }

 private:
  std::int32_t build_node(std::int32_t parent, std::uint32_t depth, std::size_t leaf_lo,
                          std::size_t leaf_hi);
  void fill_lists();
  void fill_hra();
  bool leaf_query(std::size_t leaf, Range q, QueryScratch& s) const;

  std::vector<ColoredPoint> points_;
  std::vector<Value> keys_;
  std::vector<Value> prev_;
  std::size_t leaf_cap_ = 1;
  std::size_t list_cap_ = 1;
  std::vector<Node> nodes_;
  std::int32_t root_ = kNone;
  std::vector<std::int32_t> leaf_nodes_;
  std::vector<ColoredPoint> lists_;
  std::vector<HraEntry> hra_pool_;
  std::vector<std::uint32_t> k1_off_, k1_len_, k2_off_, k2_len_;
  std::vector<Pst> leaf_trees_;
  std::unique_ptr<OneReporter> locator_;
  SlowColorIndex slow_;
};

}  // namespace crr
