#include "crr/dyn_index.hpp"

#include <algorithm>
#include <cmath>

namespace crr {

namespace {

std::vector<Value> sorted_values(std::span<const ColoredPoint> pts) {
  std::vector<Value> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.value);
  return out;
}

}  // namespace

DynIndex::DynIndex(std::span<const ColoredPoint> sorted, WbOptions opts)
    : tree_(sorted_values(sorted), opts), slow_(sorted) {
  for (const auto& p : sorted) {
    elems_.emplace(p.value, Elem{p.color, {}});
    values_.insert(values_.end(), p.value);
    by_color_[p.color].insert(p.value);
  }
  reset_all();
}

Value DynIndex::prev_of(Value v) const {
  const auto& s = by_color_.at(elems_.at(v).color);
  auto it = s.find(v);
  return it == s.begin() ? kNoPrev : *std::prev(it);
}

Value DynIndex::next_of(Value v) const {
  const auto& s = by_color_.at(elems_.at(v).color);
  auto it = s.upper_bound(v);
  return it == s.end() ? kNoPrev : *it;
}

// Ancestors whose key range misses the neighbour form a prefix of the leaf's
// root path; the answer is the top of that prefix.
DynIndex::HeightTag DynIndex::compute_tag(Value v) const {
  WbTree::NodeId leaf = tree_.leaf_of(v);
  auto height_against = [&](Value other) {
    if (other == kNoPrev) return static_cast<int>(tree_.height());
    auto in = [&](WbTree::NodeId u) {
      const auto& n = tree_.node(u);
      return n.lo <= other && other <= n.hi;
    };
    if (in(leaf)) return -1;
    WbTree::NodeId u = leaf;
    while (tree_.node(u).parent != WbTree::kNone && !in(tree_.node(u).parent))
      u = tree_.node(u).parent;
    return static_cast<int>(tree_.node(u).level);
  };
  return {height_against(prev_of(v)), height_against(next_of(v))};
}

std::vector<PstPoint> DynIndex::leaf_points(WbTree::NodeId leaf) const {
  std::vector<PstPoint> pts;
  for (Value v : tree_.node(leaf).values) pts.push_back({v, prev_of(v), elems_.at(v).color});
  return pts;
}

void DynIndex::rebuild_leaf(WbTree::NodeId leaf) { leaf_trees_[leaf] = Pst(leaf_points(leaf)); }

void DynIndex::reset_all() {
  auto params = Stripe::params_for(elems_.size(), tree_.height() + 1);
  leaf_trees_.clear();
  for (WbTree::NodeId leaf : tree_.leaves()) rebuild_leaf(leaf);
  std::vector<StripePoint> lo, hi;
  for (Value v : values_) {
    Elem& e = elems_.at(v);
    e.tag = compute_tag(v);
    if (e.tag.h_min >= 0) lo.push_back({v, static_cast<Value>(e.tag.h_min) + 1});
    if (e.tag.h_max >= 0) hi.push_back({v, static_cast<Value>(e.tag.h_max) + 1});
  }
  smin_ = std::make_unique<Stripe>(params, lo);
  smax_ = std::make_unique<Stripe>(params, hi);
}

void DynIndex::retag(Value v) {
  Elem& e = elems_.at(v);
  HeightTag now = compute_tag(v);
  if (now.h_min != e.tag.h_min) {
    if (e.tag.h_min >= 0) smin_->erase(v);
    if (now.h_min >= 0) smin_->insert(v, static_cast<Value>(now.h_min) + 1);
  }
  if (now.h_max != e.tag.h_max) {
    if (e.tag.h_max >= 0) smax_->erase(v);
    if (now.h_max >= 0) smax_->insert(v, static_cast<Value>(now.h_max) + 1);
  }
  e.tag = now;
}

// A split of u into u', u'' changes the ancestor chains of S(u') and S(u'')
// only, so those are the elements whose heights can move. A root split also
// raises the height of every element tagged at the root.
void DynIndex::after_update(const WbTree::UpdateEvent& ev, std::vector<Value> touched) {
  if (ev.rebuilt || (ev.root_split && tree_.height() + 1 > smin_->params().top)) {
    reset_all();
    return;
  }
  if (ev.root_split) touched.assign(values_.begin(), values_.end());
  for (const auto& [x, y] : ev.splits) {
    if (tree_.node(x).is_leaf()) {
      rebuild_leaf(x);
      rebuild_leaf(y);
    }
    if (ev.root_split) continue;
    for (WbTree::NodeId u : {x, y}) {
      auto below = tree_.values_below(u);
      touched.insert(touched.end(), below.begin(), below.end());
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (Value v : touched)
    if (v != kNoPrev && elems_.count(v)) retag(v);
}

void DynIndex::insert(ColoredPoint pt) {
  Value v = pt.value;
  if (v == kNoPrev) throw Error(ErrorCode::InvalidArgument, "coordinate 0 is reserved");
  if (elems_.count(v))
    throw Error(ErrorCode::DuplicateCoordinate, "duplicate coordinate " + std::to_string(v));
  auto& colset = by_color_[pt.color];
  colset.insert(v);
  elems_.emplace(v, Elem{pt.color, {}});
  values_.insert(v);
  Value p = prev_of(v), n = next_of(v);

  auto ev = tree_.insert(v);
  slow_.insert(pt);
  if (!ev.rebuilt) {
    std::set<WbTree::NodeId> fresh;
    for (const auto& [x, y] : ev.splits)
      if (tree_.node(x).is_leaf()) fresh.insert({x, y});
    WbTree::NodeId lv = tree_.leaf_of(v);
    if (!fresh.count(lv)) leaf_trees_[lv].insert({v, p, pt.color});
    if (n != kNoPrev) {
      WbTree::NodeId ln = tree_.leaf_of(n);
      if (!fresh.count(ln)) {
        leaf_trees_[ln].erase(n);
        leaf_trees_[ln].insert({n, v, pt.color});
      }
    }
  }
  after_update(ev, {v, p, n});
}

void DynIndex::erase(Value v) {
  auto it = elems_.find(v);
  if (it == elems_.end()) throw Error(ErrorCode::NotFound, "value " + std::to_string(v) + " not present");
  Elem e = it->second;
  Value p = prev_of(v), n = next_of(v);
  if (e.tag.h_min >= 0) smin_->erase(v);
  if (e.tag.h_max >= 0) smax_->erase(v);
  leaf_trees_.at(tree_.leaf_of(v)).erase(v);
  if (n != kNoPrev) {
    auto& t = leaf_trees_.at(tree_.leaf_of(n));
    t.erase(n);
    t.insert({n, p, e.color});
  }
  elems_.erase(it);
  values_.erase(v);
  auto cit = by_color_.find(e.color);
  cit->second.erase(v);
  if (cit->second.empty()) by_color_.erase(cit);

  auto ev = tree_.erase(v);
  slow_.erase(v);
  after_update(ev, {p, n});
}

std::vector<ColorId> DynIndex::query(Range q, QueryScratch& s) const {
  s.raw.clear();
  s.fallback = false;
  if (!clamp_to_values(q)) return {};
  ++s.meter.locate_ops;
  auto it = values_.lower_bound(q.a());
  if (it == values_.end() || *it > q.b()) return {};
  WbTree::NodeId leaf = tree_.leaf_of(*it);
  s.meter.locate_ops += tree_.height();
  WbTree::NodeId u = tree_.hra_query(leaf, q, &s.meter);
  if (u == WbTree::kNone) {
    std::vector<PstPoint> hits;
    leaf_trees_.at(leaf).query(q.a(), q.b(), q.a(), hits, &s.meter);
    for (const auto& h : hits) s.raw.push_back(h.tag);
    return dedup(s.raw, s.col);
  }

  const auto& un = tree_.node(u);
  std::vector<StripePoint> pts;
  auto subs = tree_.child_subranges(u, q);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& child = tree_.node(un.children[subs[i].child]);
    auto cap = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(child.weight))));
    const Stripe& st = i == 0 ? *smax_ : *smin_;
    pts.clear();
    if (!st.query(subs[i].a, subs[i].b, child.level + 1, pts, &s.meter, std::max<std::size_t>(cap, 1))) {
      // More than sqrt(n(u_j)) distinct colors in one piece: the answer is
      // large enough to pay for the slow structure.
      s.fallback = true;
      s.raw.clear();
      std::vector<ColoredPoint> all;
      slow_.report(q, all, &s.meter);
      for (const auto& p : all) s.raw.push_back(p.color);
      break;
    }
    for (const auto& p : pts) s.raw.push_back(elems_.at(p.x).color);
  }
  return dedup(s.raw, s.col);
}

std::vector<ColorId> DynIndex::query(Range q) const {
  QueryScratch s;
  return query(q, s);
}

std::string DynIndex::check_invariants() const {
  if (auto t = tree_.check_invariants(); !t.empty()) return "tree: " + t;
  if (tree_.size() != elems_.size() || slow_.size() != elems_.size()) return "size mismatch";
  if (!smin_->check_invariants() || !smax_->check_invariants()) return "stripe invariants";
  std::size_t nmin = 0, nmax = 0;
  for (const auto& [v, e] : elems_) {
    HeightTag want = compute_tag(v);
    if (want.h_min != e.tag.h_min || want.h_max != e.tag.h_max)
      return "stale tag of " + std::to_string(v);
    if ((e.tag.h_min >= 0) != smin_->contains(v) || (e.tag.h_max >= 0) != smax_->contains(v))
      return "stripe membership of " + std::to_string(v);
    nmin += e.tag.h_min >= 0;
    nmax += e.tag.h_max >= 0;
  }
  if (nmin != smin_->size() || nmax != smax_->size()) return "stale stripe entries";
  for (const auto& p : smin_->points())
    if (static_cast<int>(p.y) != elems_.at(p.x).tag.h_min + 1) return "stripe_min height";
  for (const auto& p : smax_->points())
    if (static_cast<int>(p.y) != elems_.at(p.x).tag.h_max + 1) return "stripe_max height";
  auto leaves = tree_.leaves();
  if (leaves.size() != leaf_trees_.size()) return "leaf tree count";
  for (WbTree::NodeId leaf : leaves) {
    auto it = leaf_trees_.find(leaf);
    if (it == leaf_trees_.end()) return "missing leaf tree";
    auto got = it->second.points();
    auto want = leaf_points(leaf);
    auto by_x = [](const PstPoint& a, const PstPoint& b) { return a.x < b.x; };
    std::sort(got.begin(), got.end(), by_x);
    if (got != want) return "leaf tree of node " + std::to_string(leaf);
    if (!it->second.check_invariants()) return "leaf tree shape";
  }
  return "";
}

}  // namespace crr
