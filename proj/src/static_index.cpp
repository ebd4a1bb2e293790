#include "crr/static_index.hpp"

#include <algorithm>

namespace crr {

StaticIndex::StaticIndex(std::span<const ColoredPoint> sorted, LocateBackend backend,
                         std::size_t capacity)
    : points_(sorted.begin(), sorted.end()) {
  keys_.reserve(points_.size());
  for (const auto& p : points_) keys_.push_back(p.value);
  prev_ = compute_prev(points_);
  leaf_cap_ = capacity ? capacity : ceil_log2(points_.size());
  list_cap_ = leaf_cap_;
  locator_ = make_reporter(backend, keys_);
  slow_ = SlowColorIndex(points_);
  if (points_.empty()) return;

  std::size_t leaves = (points_.size() + leaf_cap_ - 1) / leaf_cap_;
  leaf_nodes_.assign(leaves, kNone);
  nodes_.reserve(2 * leaves);
  root_ = build_node(kNone, 0, 0, leaves);
  fill_lists();
  fill_hra();

  leaf_trees_.reserve(leaves);
  for (std::size_t l = 0; l < leaves; ++l) {
    const Node& n = nodes_[static_cast<std::size_t>(leaf_nodes_[l])];
    std::vector<PstPoint> pts;
    pts.reserve(n.last - n.first);
    for (std::uint32_t i = n.first; i < n.last; ++i)
      pts.push_back({points_[i].value, prev_[i], points_[i].color});
    leaf_trees_.emplace_back(std::move(pts));
  }
}

// Leaves [leaf_lo, leaf_hi) are halved recursively, so every internal node
// has exactly two children and the tree height is ceil(log2 leaves).
std::int32_t StaticIndex::build_node(std::int32_t parent, std::uint32_t depth,
                                     std::size_t leaf_lo, std::size_t leaf_hi) {
  auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Node n;
  n.parent = parent;
  n.depth = depth;
  n.first = static_cast<std::uint32_t>(leaf_lo * leaf_cap_);
  n.last = static_cast<std::uint32_t>(std::min(points_.size(), leaf_hi * leaf_cap_));
  if (leaf_hi - leaf_lo == 1) {
    n.leaf = static_cast<std::int32_t>(leaf_lo);
    leaf_nodes_[leaf_lo] = id;
    nodes_[static_cast<std::size_t>(id)] = n;
    return id;
  }
  std::size_t mid = (leaf_lo + leaf_hi) / 2;
  n.m = points_[mid * leaf_cap_].value;
  nodes_[static_cast<std::size_t>(id)] = n;
  std::int32_t l = build_node(id, depth + 1, leaf_lo, mid);
  std::int32_t r = build_node(id, depth + 1, mid, leaf_hi);
  nodes_[static_cast<std::size_t>(id)].left = l;
  nodes_[static_cast<std::size_t>(id)].right = r;
  return id;
}

bool StaticIndex::is_right_child(std::int32_t id) const {
  const Node& n = node(id);
  return n.parent != kNone && node(n.parent).right == id;
}

void StaticIndex::fill_lists() {
  ColArray col;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    Node& n = nodes_[id];
    if (n.parent == kNone) continue;
    n.list_off = static_cast<std::uint32_t>(lists_.size());
    if (is_right_child(static_cast<std::int32_t>(id))) {
      // L(u): leftmost element of each color, ascending.
      for (std::uint32_t i = n.first; i < n.last && lists_.size() - n.list_off < list_cap_; ++i)
        if (col.mark(points_[i].color)) lists_.push_back(points_[i]);
    } else {
      // R(u): rightmost element of each color, descending.
      for (std::uint32_t i = n.last; i > n.first && lists_.size() - n.list_off < list_cap_; --i)
        if (col.mark(points_[i - 1].color)) lists_.push_back(points_[i - 1]);
    }
    col.clear();
    n.list_len = static_cast<std::uint32_t>(lists_.size() - n.list_off);
  }
}

void StaticIndex::fill_hra() {
  std::size_t leaves = leaf_nodes_.size();
  k1_off_.resize(leaves);
  k1_len_.resize(leaves);
  k2_off_.resize(leaves);
  k2_len_.resize(leaves);
  std::vector<HraEntry> right_parents;
  for (std::size_t l = 0; l < leaves; ++l) {
    right_parents.clear();
    k1_off_[l] = static_cast<std::uint32_t>(hra_pool_.size());
    std::int32_t child = leaf_nodes_[l];
    for (std::int32_t u = node(child).parent; u != kNone; child = u, u = node(u).parent) {
      if (node(u).left == child)
        hra_pool_.push_back({node(u).m, u});
      else
        right_parents.push_back({node(u).m, u});
    }
    k1_len_[l] = static_cast<std::uint32_t>(hra_pool_.size() - k1_off_[l]);
    k2_off_[l] = static_cast<std::uint32_t>(hra_pool_.size());
    hra_pool_.insert(hra_pool_.end(), right_parents.begin(), right_parents.end());
    k2_len_[l] = static_cast<std::uint32_t>(right_parents.size());
  }
}

std::span<const ColoredPoint> StaticIndex::list(std::int32_t id) const {
  const Node& n = node(id);
  return std::span<const ColoredPoint>(lists_).subspan(n.list_off, n.list_len);
}

std::span<const StaticIndex::HraEntry> StaticIndex::k1(std::size_t leaf) const {
  return std::span<const HraEntry>(hra_pool_).subspan(k1_off_.at(leaf), k1_len_.at(leaf));
}

std::span<const StaticIndex::HraEntry> StaticIndex::k2(std::size_t leaf) const {
  return std::span<const HraEntry>(hra_pool_).subspan(k2_off_.at(leaf), k2_len_.at(leaf));
}

std::optional<std::size_t> StaticIndex::one_report(Range q, CostMeter* meter) const {
  return locator_->any_in(q.a(), q.b(), meter);
}

std::int32_t StaticIndex::hra_query(std::size_t leaf, Range q, CostMeter* meter) const {
  // K1 ascends with height: the highest left parent with m <= b ends the
  // prefix of entries satisfying m <= b. K2 descends: m > a holds on a prefix.
  auto left = k1(leaf);
  auto right = k2(leaf);
  auto l_end = std::partition_point(left.begin(), left.end(), [&](const HraEntry& e) {
    if (meter) ++meter->locate_ops;
    return e.m <= q.b();
  });
  auto r_end = std::partition_point(right.begin(), right.end(), [&](const HraEntry& e) {
    if (meter) ++meter->locate_ops;
    return e.m > q.a();
  });
  std::int32_t best = kNone;
  if (l_end != left.begin()) best = std::prev(l_end)->node;
  if (r_end != right.begin()) {
    std::int32_t cand = std::prev(r_end)->node;
    if (best == kNone || node(cand).depth < node(best).depth) best = cand;
  }
  return best;
}

bool StaticIndex::leaf_query(std::size_t leaf, Range q, QueryScratch& s) const {
  // Only nodes that produce output count as reporting work. The rest of the
  // walk is bounded by the leaf tree height and is charged to locating.
  std::vector<PstPoint> hits;
  CostMeter walk;
  leaf_trees_[leaf].query(q.a(), q.b(), q.a(), hits, &walk);
  s.meter.touches += hits.size();
  s.meter.locate_ops += walk.touches - std::min<std::uint64_t>(walk.touches, hits.size()) + walk.locate_ops;
  for (const auto& p : hits) s.raw.push_back(p.tag);
  return true;
}

std::vector<ColorId> StaticIndex::query(Range q, QueryScratch& s) const {
  s.raw.clear();
  s.fallback = false;
  if (!clamp_to_values(q)) return {};
  auto hit = one_report(q, &s.meter);
  if (!hit) return {};
  std::size_t leaf = leaf_of_point(*hit);
  std::int32_t u = hra_query(leaf, q, &s.meter);
  if (u == kNone) {
    leaf_query(leaf, q, s);
    return dedup(s.raw, s.col);
  }

  auto exhausted = [&](std::span<const ColoredPoint> lst, std::size_t used) {
    return used == lst.size() && lst.size() == list_cap_;
  };
  auto r_list = list(node(u).left);
  std::size_t used = 0;
  for (; used < r_list.size() && r_list[used].value >= q.a(); ++used) {
    ++s.meter.touches;
    s.raw.push_back(r_list[used].color);
  }
  bool fallback = exhausted(r_list, used);
  if (!fallback) {
    auto l_list = list(node(u).right);
    used = 0;
    for (; used < l_list.size() && l_list[used].value <= q.b(); ++used) {
      ++s.meter.touches;
      s.raw.push_back(l_list[used].color);
    }
    fallback = exhausted(l_list, used);
  }
  if (fallback) {
    s.fallback = true;
    s.raw = slow_.query(q, &s.meter);
  }
  return dedup(s.raw, s.col);
}

std::vector<ColorId> StaticIndex::query(Range q) const {
  QueryScratch s;
  return query(q, s);
}

}  // namespace crr
