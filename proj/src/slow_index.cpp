#include "crr/slow_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crr {

namespace {
constexpr Value kMaxKey = std::numeric_limits<Value>::max();
constexpr std::size_t kLeafSize = 4;
}  // namespace

SlowIndex::SlowIndex(std::span<const ColoredPoint> sorted) {
  auto prev = compute_prev(sorted);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& p = sorted[i];
    if (p.value == kNoPrev) throw Error(ErrorCode::InvalidArgument, "coordinate 0 is reserved");
    if (i > 0 && sorted[i - 1].value >= p.value)
      throw Error(ErrorCode::DuplicateCoordinate, "input must be sorted and distinct");
    elems_.emplace(p.value, Elem{p.color, prev[i]});
    by_color_[p.color].insert(p.value);
  }
  rebuild_all();
  rebuilds_ = 0;
}

double SlowIndex::capacity(unsigned depth) const {
  return std::pow(static_cast<double>(std::max<std::size_t>(n0_, 1)), std::ldexp(1.0, -static_cast<int>(depth)));
}

SlowIndex::NodeId SlowIndex::alloc() {
  if (!free_.empty()) {
    NodeId id = free_.back();
    free_.pop_back();
    nodes_[static_cast<std::size_t>(id)] = Node{};
    return id;
  }
  nodes_.emplace_back();
  return static_cast<NodeId>(nodes_.size() - 1);
}

void SlowIndex::release(NodeId u) {
  std::vector<NodeId> stack{u};
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    auto& n = nodes_[static_cast<std::size_t>(x)];
    stack.insert(stack.end(), n.children.begin(), n.children.end());
    n = Node{};
    free_.push_back(x);
  }
}

SlowIndex::NodeId SlowIndex::build(NodeId parent, unsigned depth, Value lo, Value hi,
                                   std::span<const Value> vals) {
  NodeId id = alloc();
  {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    n.parent = parent;
    n.depth = depth;
    n.lo = lo;
    n.hi = hi;
    n.size = vals.size();
  }
  if (vals.size() <= kLeafSize || capacity(depth) <= static_cast<double>(kLeafSize)) {
    nodes_[static_cast<std::size_t>(id)].bucket.assign(vals.begin(), vals.end());
    return id;
  }
  auto want = static_cast<std::size_t>(std::llround(static_cast<double>(vals.size()) / capacity(depth + 1)));
  std::size_t count = std::clamp<std::size_t>(want, 2, vals.size());
  std::vector<std::size_t> starts(count + 1);
  for (std::size_t j = 0; j <= count; ++j) starts[j] = vals.size() * j / count;
  std::vector<Value> m(count);
  m[0] = lo;
  for (std::size_t j = 1; j < count; ++j) m[j] = vals[starts[j]];
  std::vector<NodeId> kids(count);
  for (std::size_t j = 0; j < count; ++j) {
    Value khi = j + 1 < count ? m[j + 1] - 1 : hi;
    kids[j] = build(id, depth + 1, m[j], khi, vals.subspan(starts[j], starts[j + 1] - starts[j]));
  }
  Node& n = nodes_[static_cast<std::size_t>(id)];
  n.m = std::move(m);
  n.children = std::move(kids);
  return id;
}

void SlowIndex::rebuild_all() {
  std::vector<Value> vals;
  vals.reserve(elems_.size());
  for (const auto& [v, e] : elems_) vals.push_back(v);
  std::sort(vals.begin(), vals.end());
  nodes_.clear();
  free_.clear();
  top_.clear();
  n0_ = vals.size();
  deletions_ = 0;
  ++rebuilds_;
  root_ = build(kNone, 0, 0, kMaxKey, vals);
  for (Value v : vals) place(v);
}

std::size_t SlowIndex::route(const Node& n, Value v) const {
  return static_cast<std::size_t>(std::upper_bound(n.m.begin(), n.m.end(), v) - n.m.begin()) - 1;
}

SlowIndex::NodeId SlowIndex::leaf_of(Value v, std::vector<NodeId>* path, CostMeter* meter) const {
  NodeId u = root_;
  if (path) path->assign(1, u);
  while (!node(u).is_leaf()) {
    if (meter) ++meter->locate_ops;
    u = node(u).children[route(node(u), v)];
    if (path) path->push_back(u);
  }
  return u;
}

SlowIndex::NodeId SlowIndex::compute_top(Value v, Value prev) const {
  if (prev == kNoPrev) return root_;
  NodeId u = root_;
  while (!node(u).is_leaf()) {
    const Node& n = node(u);
    std::size_t j = route(n, v);
    if (route(n, prev) != j) return n.children[j];
    u = n.children[j];
  }
  return kNone;
}

void SlowIndex::place(Value v) {
  Value prev = elems_.at(v).prev;
  NodeId t = compute_top(v, prev);
  top_[v] = t;
  if (t == kNone) return;
  Node& n = nodes_[static_cast<std::size_t>(t)];
  n.v.insert(v);
  n.p.insert({prev, v});
}

void SlowIndex::unplace(Value v) {
  auto it = top_.find(v);
  if (it == top_.end()) return;
  if (it->second != kNone) {
    Node& n = nodes_[static_cast<std::size_t>(it->second)];
    n.v.erase(v);
    n.p.erase({elems_.at(v).prev, v});
  }
  top_.erase(it);
}

SlowIndex::NodeId SlowIndex::top_of(Value v) const {
  auto it = top_.find(v);
  if (it == top_.end()) throw Error(ErrorCode::NotFound, "value " + std::to_string(v) + " not present");
  return it->second;
}

Value SlowIndex::next_of(Value v) const {
  const auto& s = by_color_.at(elems_.at(v).color);
  auto it = s.upper_bound(v);
  return it == s.end() ? kNoPrev : *it;
}

void SlowIndex::collect(NodeId u, std::vector<Value>& out) const {
  const Node& n = node(u);
  if (n.is_leaf()) {
    out.insert(out.end(), n.bucket.begin(), n.bucket.end());
    return;
  }
  for (NodeId c : n.children) collect(c, out);
}

std::vector<Value> SlowIndex::values_below(NodeId u) const {
  std::vector<Value> out;
  collect(u, out);
  return out;
}

// Replaces the subtree of u by `parts` (node count 1 or 2, each a freshly
// built subtree under u's parent) and re-places every element below u.
void SlowIndex::replace_subtree(NodeId u, std::vector<NodeId> parts) {
  std::vector<Value> vals = values_below(u);
  for (Value v : vals) unplace(v);
  NodeId parent = node(u).parent;
  Node& p = nodes_[static_cast<std::size_t>(parent)];
  auto pos = static_cast<std::size_t>(std::find(p.children.begin(), p.children.end(), u) -
                                      p.children.begin());
  p.children[pos] = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    p.children.insert(p.children.begin() + static_cast<std::ptrdiff_t>(pos + i), parts[i]);
    p.m.insert(p.m.begin() + static_cast<std::ptrdiff_t>(pos + i), node(parts[i]).lo);
  }
  release(u);
  for (Value v : vals) place(v);
}

void SlowIndex::maybe_split(const std::vector<NodeId>& path) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    NodeId u = path[i];
    const Node& n = node(u);
    double cap = std::max(capacity(n.depth), static_cast<double>(kLeafSize));
    if (static_cast<double>(n.size) >= 2 * cap) {
      auto vals = values_below(u);
      std::size_t mid = vals.size() / 2;
      std::span<const Value> all(vals);
      NodeId parent = n.parent;
      unsigned depth = n.depth;
      Value lo = n.lo, hi = n.hi;
      NodeId x = build(parent, depth, lo, vals[mid] - 1, all.first(mid));
      NodeId y = build(parent, depth, vals[mid], hi, all.subspan(mid));
      replace_subtree(u, {x, y});
      ++splits_;
      return;
    }
    if (n.is_leaf() && capacity(n.depth) > static_cast<double>(kLeafSize) &&
        n.size > 2 * kLeafSize) {
      auto vals = values_below(u);
      NodeId x = build(n.parent, n.depth, n.lo, n.hi, vals);
      replace_subtree(u, {x});
      return;
    }
  }
}

void SlowIndex::insert(ColoredPoint pt) {
  Value v = pt.value;
  if (v == kNoPrev) throw Error(ErrorCode::InvalidArgument, "coordinate 0 is reserved");
  if (elems_.count(v))
    throw Error(ErrorCode::DuplicateCoordinate, "duplicate coordinate " + std::to_string(v));
  auto& colset = by_color_[pt.color];
  auto it = colset.lower_bound(v);
  Value next = it == colset.end() ? kNoPrev : *it;
  Value prev = it == colset.begin() ? kNoPrev : *std::prev(it);
  colset.insert(it, v);
  elems_.emplace(v, Elem{pt.color, prev});
  if (next != kNoPrev) {
    unplace(next);
    elems_.at(next).prev = v;
  }

  std::vector<NodeId> path;
  NodeId leaf = leaf_of(v, &path);
  for (NodeId u : path) ++nodes_[static_cast<std::size_t>(u)].size;
  auto& bucket = nodes_[static_cast<std::size_t>(leaf)].bucket;
  bucket.insert(std::upper_bound(bucket.begin(), bucket.end(), v), v);
  place(v);
  if (next != kNoPrev) place(next);

  if (elems_.size() > 2 * std::max<std::size_t>(n0_, 1))
    rebuild_all();
  else
    maybe_split(path);
}

void SlowIndex::erase(Value v) {
  auto eit = elems_.find(v);
  if (eit == elems_.end()) throw Error(ErrorCode::NotFound, "value " + std::to_string(v) + " not present");
  Elem e = eit->second;
  Value next = next_of(v);
  unplace(v);
  if (next != kNoPrev) unplace(next);

  std::vector<NodeId> path;
  NodeId leaf = leaf_of(v, &path);
  for (NodeId u : path) --nodes_[static_cast<std::size_t>(u)].size;
  auto& bucket = nodes_[static_cast<std::size_t>(leaf)].bucket;
  bucket.erase(std::lower_bound(bucket.begin(), bucket.end(), v));

  elems_.erase(eit);
  auto cit = by_color_.find(e.color);
  cit->second.erase(v);
  if (cit->second.empty()) by_color_.erase(cit);
  if (next != kNoPrev) {
    elems_.at(next).prev = e.prev;
    place(next);
  }
  if (2 * ++deletions_ >= n0_) rebuild_all();
}

bool SlowIndex::report(Range q, std::vector<ColoredPoint>& out, CostMeter* meter,
                       std::size_t limit) const {
  if (!clamp_to_values(q)) return true;
  const Value a = q.a(), b = q.b();
  std::size_t produced = 0;
  CostMeter local;
  CostMeter& mt = meter ? *meter : local;
  auto emit = [&](Value v) {
    ++mt.touches;
    out.push_back({v, elems_.at(v).color});
    return ++produced <= limit;
  };
  // Every element of P(s) with prev < a, in prev order.
  auto scan_p = [&](const Node& s) {
    ++mt.touches;
    for (const auto& [pv, v] : s.p) {
      if (pv >= a) break;
      if (!emit(v)) return false;
    }
    return true;
  };

  std::vector<NodeId> pa, pb;
  NodeId va = leaf_of(a, &pa, &mt);
  NodeId vb = leaf_of(b, &pb, &mt);
  if (va == vb) {
    for (Value v : node(va).bucket) {
      ++mt.touches;
      if (v >= a && v <= b && elems_.at(v).prev < a && !emit(v)) return false;
    }
    return true;
  }
  std::size_t i = 0;
  while (pa[i + 1] == pb[i + 1]) ++i;
  const Node& vq = node(pa[i]);

  // Elements whose prev shares their leaf are stored in no C set; only v_a
  // can hold such an element with prev < a.
  for (Value v : node(va).bucket) {
    ++mt.touches;
    if (v < a || top_.at(v) != kNone) continue;
    if (elems_.at(v).prev < a && !emit(v)) return false;
  }
  // (i) C(u) >= a on the path from v_l down to v_a.
  for (std::size_t j = i + 1; j < pa.size(); ++j) {
    const Node& u = node(pa[j]);
    ++mt.touches;
    for (auto it = u.v.lower_bound(a); it != u.v.end(); ++it)
      if (!emit(*it)) return false;
  }
  // (ii) Subtrees hanging right of the path below v_l, then the children of
  // v_q strictly between v_l and v_r.
  for (std::size_t j = i + 1; j + 1 < pa.size(); ++j) {
    const Node& u = node(pa[j]);
    for (std::size_t c = route(u, a) + 1; c < u.children.size(); ++c)
      if (!scan_p(node(u.children[c]))) return false;
  }
  std::size_t cl = route(vq, a), cr = route(vq, b);
  for (std::size_t c = cl + 1; c < cr; ++c)
    if (!scan_p(node(vq.children[c]))) return false;
  // (iii) C(v_r) <= b, dropping colors already seen left of v_r.
  {
    const Node& vr = node(pb[i + 1]);
    ++mt.touches;
    for (auto it = vr.v.begin(); it != vr.v.end() && *it <= b; ++it) {
      ++mt.touches;
      if (elems_.at(*it).prev < a && !emit(*it)) return false;
    }
  }
  // (iv) C(w) within [a,b] for v_q and its ancestors.
  for (std::size_t j = 0; j <= i; ++j) {
    const Node& w = node(pa[j]);
    ++mt.touches;
    for (auto it = w.v.lower_bound(a); it != w.v.end() && *it <= b; ++it)
      if (!emit(*it)) return false;
  }
  return true;
}

std::vector<ColorId> SlowIndex::query(Range q, QueryScratch& s) const {
  s.raw.clear();
  s.fallback = false;
  std::vector<ColoredPoint> pts;
  report(q, pts, &s.meter);
  for (const auto& p : pts) s.raw.push_back(p.color);
  return dedup(s.raw, s.col);
}

std::vector<ColorId> SlowIndex::query(Range q) const {
  QueryScratch s;
  return query(q, s);
}

// Both selections binary-search one endpoint for a window holding between k
// and 2k colors, using the early-abort count. One more point changes the
// count by at most one, so such a window exists whenever [a,b] holds more
// than 2k colors.
std::vector<ColorId> SlowIndex::k_leftmost(Range q, std::size_t k, CostMeter* meter) const {
  if (k == 0) return {};
  std::vector<ColoredPoint> buf;
  auto attempt = [&](Value hi) {
    buf.clear();
    return report({q.a(), hi}, buf, meter, 2 * k);
  };
  if (!attempt(q.b())) {
    // count(a, lo-1) < k and count(a, hi) > 2k.
    Value lo = q.a(), hi = q.b();
    while (lo < hi) {
      Value mid = lo + (hi - lo) / 2;
      if (!attempt(mid))
        hi = mid;
      else if (buf.size() < k)
        lo = mid + 1;
      else
        break;
    }
  }
  std::sort(buf.begin(), buf.end(),
            [](const ColoredPoint& x, const ColoredPoint& y) { return x.value < y.value; });
  std::vector<ColorId> out;
  for (std::size_t i = 0; i < buf.size() && out.size() < k; ++i) out.push_back(buf[i].color);
  return out;
}

std::vector<ColorId> SlowIndex::k_rightmost(Range q, std::size_t k, CostMeter* meter) const {
  if (k == 0) return {};
  std::vector<ColoredPoint> buf;
  auto attempt = [&](Value lo) {
    buf.clear();
    return report({lo, q.b()}, buf, meter, 2 * k);
  };
  if (!attempt(q.a())) {
    // count(lo, b) > 2k and count(hi+1, b) < k.
    Value lo = q.a(), hi = q.b();
    while (lo < hi) {
      Value mid = hi - (hi - lo) / 2;
      if (!attempt(mid))
        lo = mid;
      else if (buf.size() < k)
        hi = mid - 1;
      else
        break;
    }
  }
  // Reported elements are first occurrences; order by last occurrence <= b.
  std::vector<std::pair<Value, ColorId>> last;
  for (const auto& p : buf) {
    const auto& s = by_color_.at(p.color);
    if (meter) ++meter->touches;
    last.push_back({*std::prev(s.upper_bound(q.b())), p.color});
  }
  std::sort(last.begin(), last.end(), std::greater<>());
  std::vector<ColorId> out;
  for (std::size_t i = 0; i < last.size() && out.size() < k; ++i) out.push_back(last[i].second);
  return out;
}

std::vector<SlowIndex::NodeId> SlowIndex::live_nodes() const {
  std::vector<NodeId> out, stack{root_};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    out.push_back(u);
    const auto& c = node(u).children;
    stack.insert(stack.end(), c.rbegin(), c.rend());
  }
  return out;
}

unsigned SlowIndex::height() const {
  unsigned h = 0;
  for (NodeId u : live_nodes()) h = std::max(h, node(u).depth);
  return h;
}

std::string SlowIndex::check_invariants() const {
  const Node& r = node(root_);
  if (r.parent != kNone || r.lo != 0 || r.hi != kMaxKey) return "root range";
  std::size_t stored = 0;
  for (NodeId u : live_nodes()) {
    const Node& n = node(u);
    std::string at = " at node " + std::to_string(u);
    if (n.is_leaf()) {
      if (!std::is_sorted(n.bucket.begin(), n.bucket.end())) return "bucket order" + at;
      if (n.bucket.size() != n.size) return "leaf size" + at;
      for (Value v : n.bucket)
        if (v < n.lo || v > n.hi || !elems_.count(v)) return "bucket content" + at;
      continue;
    }
    if (n.m.size() != n.children.size() || n.m[0] != n.lo) return "separators" + at;
    std::size_t total = 0;
    for (std::size_t j = 0; j < n.children.size(); ++j) {
      const Node& c = node(n.children[j]);
      Value hi = j + 1 < n.m.size() ? n.m[j + 1] - 1 : n.hi;
      if (c.parent != u || c.depth != n.depth + 1 || c.lo != n.m[j] || c.hi != hi)
        return "child range" + at;
      total += c.size;
    }
    if (total != n.size) return "internal size" + at;
  }
  if (r.size != elems_.size()) return "root size";

  for (const auto& [v, e] : elems_) {
    const auto& s = by_color_.at(e.color);
    auto it = s.find(v);
    if (it == s.end()) return "color set";
    Value prev = it == s.begin() ? kNoPrev : *std::prev(it);
    if (prev != e.prev) return "prev of " + std::to_string(v);
    auto t = top_.find(v);
    if (t == top_.end() || t->second != compute_top(v, prev)) return "top of " + std::to_string(v);
    if (t->second != kNone) {
      const Node& n = node(t->second);
      if (!n.v.count(v) || !n.p.count({prev, v})) return "C set misses " + std::to_string(v);
      ++stored;
    }
  }
  std::size_t in_sets = 0;
  for (NodeId u : live_nodes()) {
    const Node& n = node(u);
    if (n.v.size() != n.p.size()) return "V/P size";
    in_sets += n.v.size();
  }
  if (in_sets != stored) return "stale C entries";
  return "";
}

}  // namespace crr
