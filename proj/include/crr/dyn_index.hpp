#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "crr/core.hpp"
#include "crr/pst.hpp"
#include "crr/slow_index.hpp"
#include "crr/static_index.hpp"
#include "crr/stripe.hpp"
#include "crr/wb_tree.hpp"

namespace crr {

/// Fully dynamic color reporting.
///
/// Elements live in a weight-balanced base tree. For every element e,
/// h_min(e) is the height of the highest ancestor u of e's leaf such that e
/// is the leftmost element of its color below u, and h_max(e) is the mirror
/// notion for the rightmost. A query finds the highest range ancestor u of
/// [a,b] and asks, for each child u_j that [a,b] meets, for the elements of
/// its piece whose height reaches height(u_j): h_max for the leftmost child,
/// h_min for the others. Both questions are three-sided and go to two
/// stripe structures. When [a,b] stays inside one leaf, a per-leaf search
/// tree over (e, prev(e)) answers it.
class DynIndex {
 public:
  /// Heights of an element. -1 means e is the extreme of its color in no
  /// node, which happens when its same-color neighbour shares its leaf.
  struct HeightTag {
    int h_min = -1;
    int h_max = -1;
  };

  DynIndex() : DynIndex(std::span<const ColoredPoint>{}) {}
  explicit DynIndex(std::span<const ColoredPoint> sorted, WbOptions opts = {});

  void insert(ColoredPoint p);  // throws DuplicateCoordinate / InvalidArgument
  void erase(Value v);          // throws NotFound
  bool contains(Value v) const { return elems_.count(v) != 0; }
  std::size_t size() const noexcept { return elems_.size(); }
  std::size_t color_count() const noexcept { return by_color_.size(); }

  std::vector<ColorId> query(Range q, QueryScratch& scratch) const;
  std::vector<ColorId> query(Range q) const;

  const WbTree& tree() const noexcept { return tree_; }
  const SlowIndex& slow() const noexcept { return slow_; }
  const Stripe& stripe_min() const noexcept { return *smin_; }
  const Stripe& stripe_max() const noexcept { return *smax_; }
  /// Maintained heights of v.
  HeightTag tag(Value v) const { return elems_.at(v).tag; }
  /// Heights of v recomputed from the tree.
  HeightTag compute_tag(Value v) const;
  ColorId color_of(Value v) const { return elems_.at(v).color; }
  std::vector<Value> values() const { return {values_.begin(), values_.end()}; }

  /// Empty when every tag, stripe entry and leaf tree matches the current
  /// set.
  std::string check_invariants() const;

 private:
  struct Elem {
    ColorId color;
    HeightTag tag;
  };

  Value prev_of(Value v) const;
  Value next_of(Value v) const;
  void reset_all();
  void rebuild_leaf(WbTree::NodeId leaf);
  void retag(Value v);
  void after_update(const WbTree::UpdateEvent& ev, std::vector<Value> touched);
  std::vector<PstPoint> leaf_points(WbTree::NodeId leaf) const;

  WbTree tree_;
  SlowIndex slow_;
  std::unique_ptr<Stripe> smin_, smax_;  // y = height + 1
  std::unordered_map<WbTree::NodeId, Pst> leaf_trees_;
  std::unordered_map<Value, Elem> elems_;
  std::set<Value> values_;
  std::map<ColorId, std::set<Value>> by_color_;
};

}  // namespace crr
