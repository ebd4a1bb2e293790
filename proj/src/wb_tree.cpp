#include "crr/wb_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crr {

namespace {

constexpr Value kMaxKey = std::numeric_limits<Value>::max();

// Nodes of one level are grouped so that parents weigh about 1.25x their
// nominal weight, which keeps fresh nodes well inside [1/2, 2] x nominal.
std::size_t parent_count(std::size_t total, std::size_t nominal) {
  double target = 1.25 * static_cast<double>(nominal);
  auto p = static_cast<std::size_t>(std::llround(static_cast<double>(total) / target));
  return std::max<std::size_t>(1, p);
}

}  // namespace

WbTree::WbTree(std::span<const Value> sorted, WbOptions opts) : opts_(opts) {
  if (!std::is_sorted(sorted.begin(), sorted.end()) ||
      std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::InvalidArgument, "base tree input must be sorted and distinct");
  build({sorted.begin(), sorted.end()});
}

std::size_t WbTree::nominal(unsigned level) const {
  std::size_t w = leaf_weight_;
  for (unsigned i = 0; i < level; ++i) w *= kBranching;
  return w;
}

WbTree::NodeId WbTree::alloc() {
  if (!free_.empty()) {
    NodeId id = free_.back();
    free_.pop_back();
    nodes_[static_cast<std::size_t>(id)] = Node{};
    return id;
  }
  nodes_.emplace_back();
  return static_cast<NodeId>(nodes_.size() - 1);
}

void WbTree::build(std::vector<Value> sorted) {
  nodes_.clear();
  free_.clear();
  size_ = n0_ = sorted.size();
  deletions_ = inserts_ = 0;
  std::size_t lg = ceil_log2(n0_);
  leaf_weight_ = opts_.leaf_weight ? opts_.leaf_weight : lg * lg;

  std::size_t n = sorted.size();
  std::size_t p = parent_count(n, leaf_weight_);
  std::vector<NodeId> level;
  for (std::size_t i = 0; i < p; ++i) {
    NodeId id = alloc();
    Node& leaf = nodes_[static_cast<std::size_t>(id)];
    std::size_t from = i * n / p, to = (i + 1) * n / p;
    leaf.values.assign(sorted.begin() + static_cast<std::ptrdiff_t>(from),
                       sorted.begin() + static_cast<std::ptrdiff_t>(to));
    leaf.weight = leaf.values.size();
    leaf.lo = i == 0 ? 0 : leaf.values.front();
    leaf.hi = kMaxKey;
    if (i > 0) nodes_[static_cast<std::size_t>(level.back())].hi = leaf.lo - 1;
    level.push_back(id);
  }

  for (unsigned lvl = 1; level.size() > 1; ++lvl) {
    std::size_t total = 0;
    for (NodeId c : level) total += node(c).weight;
    std::size_t parents = parent_count(total, nominal(lvl));
    if (2 * parents > level.size()) parents = std::max<std::size_t>(1, level.size() / 2);
    std::vector<NodeId> next;
    std::size_t cum = 0, k = 0;
    NodeId cur = kNone;
    for (std::size_t j = 0; j < level.size(); ++j) {
      NodeId c = level[j];
      std::size_t w = node(c).weight;
      double target = static_cast<double>(k + 1) * static_cast<double>(total) /
                      static_cast<double>(parents);
      bool close = cur != kNone && k + 1 < parents &&
                   static_cast<double>(cum) + static_cast<double>(w) / 2.0 > target &&
                   level.size() - j >= parents - k - 1;
      if (close) {
        ++k;
        cur = kNone;
      }
      if (cur == kNone) {
        cur = alloc();
        next.push_back(cur);
        Node& u = nodes_[static_cast<std::size_t>(cur)];
        u.level = lvl;
        u.lo = node(c).lo;
      }
      Node& u = nodes_[static_cast<std::size_t>(cur)];
      u.children.push_back(c);
      u.m.push_back(node(c).lo);
      u.weight += w;
      u.hi = node(c).hi;
      nodes_[static_cast<std::size_t>(c)].parent = cur;
      cum += w;
    }
    level = std::move(next);
  }
  root_ = level.front();
  splits_.assign(height() + 1, 0);
  refresh_hra(root_);
}

void WbTree::rebuild() {
  auto all = values_below(root_);
  build(std::move(all));
  ++rebuilds_;
}

std::size_t WbTree::route(NodeId u, Value v) const {
  const auto& m = node(u).m;
  auto it = std::upper_bound(m.begin(), m.end(), v);
  if (it == m.begin()) return 0;
  return static_cast<std::size_t>(it - m.begin()) - 1;
}

std::vector<WbTree::NodeId> WbTree::path_to(Value v) const {
  std::vector<NodeId> path{root_};
  while (!node(path.back()).is_leaf()) {
    const Node& u = node(path.back());
    path.push_back(u.children[route(path.back(), v)]);
  }
  return path;
}

WbTree::NodeId WbTree::leaf_of(Value v) const {
  NodeId u = root_;
  while (!node(u).is_leaf()) u = node(u).children[route(u, v)];
  return u;
}

bool WbTree::contains(Value v) const {
  const auto& vals = node(leaf_of(v)).values;
  return std::binary_search(vals.begin(), vals.end(), v);
}

std::size_t WbTree::child_index(NodeId child) const {
  const auto& ch = node(node(child).parent).children;
  return static_cast<std::size_t>(std::find(ch.begin(), ch.end(), child) - ch.begin());
}

std::vector<WbTree::NodeId> WbTree::leaves() const {
  std::vector<NodeId> out, stack{root_};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    const Node& n = node(u);
    if (n.is_leaf()) {
      out.push_back(u);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<Value> WbTree::values_below(NodeId u) const {
  std::vector<Value> out;
  std::vector<NodeId> stack{u};
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    const Node& n = node(x);
    if (n.is_leaf()) {
      out.insert(out.end(), n.values.begin(), n.values.end());
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

WbTree::UpdateEvent WbTree::insert(Value v) {
  if (contains(v))
    throw Error(ErrorCode::DuplicateCoordinate, "duplicate coordinate " + std::to_string(v));
  UpdateEvent ev;
  auto path = path_to(v);
  auto& vals = nodes_[static_cast<std::size_t>(path.back())].values;
  vals.insert(std::upper_bound(vals.begin(), vals.end(), v), v);
  for (NodeId x : path) ++nodes_[static_cast<std::size_t>(x)].weight;
  ++size_;
  ++inserts_;
  if (size_ > 2 * std::max<std::size_t>(n0_, 1)) {
    rebuild();
    ev.rebuilt = true;
    return ev;
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const Node& x = node(*it);
    if (x.weight > 2 * nominal(x.level)) split(*it, ev);
  }
  return ev;
}

WbTree::UpdateEvent WbTree::erase(Value v) {
  if (!contains(v)) throw Error(ErrorCode::NotFound, "value " + std::to_string(v) + " not present");
  UpdateEvent ev;
  auto path = path_to(v);
  auto& vals = nodes_[static_cast<std::size_t>(path.back())].values;
  vals.erase(std::lower_bound(vals.begin(), vals.end(), v));
  for (NodeId x : path) --nodes_[static_cast<std::size_t>(x)].weight;
  --size_;
  ++deletions_;
  bool underflow = false;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Node& x = node(path[i]);
    if (4 * x.weight < nominal(x.level)) underflow = true;
  }
  if (2 * deletions_ >= n0_ || underflow) {
    rebuild();
    ev.rebuilt = true;
  }
  return ev;
}

void WbTree::split(NodeId x, UpdateEvent& ev) {
  NodeId y = alloc();
  Node& X = nodes_[static_cast<std::size_t>(x)];
  Node& Y = nodes_[static_cast<std::size_t>(y)];
  Y.level = X.level;
  Y.parent = X.parent;
  Value sep;
  if (X.is_leaf()) {
    auto mid = X.values.begin() + static_cast<std::ptrdiff_t>(X.values.size() / 2);
    Y.values.assign(mid, X.values.end());
    X.values.erase(mid, X.values.end());
    X.weight = X.values.size();
    Y.weight = Y.values.size();
    sep = Y.values.front();
  } else {
    // Cut at the child boundary closest to half the weight.
    std::size_t best = 1, prefix = 0, best_gap = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 1; k < X.children.size(); ++k) {
      prefix += node(X.children[k - 1]).weight;
      std::size_t gap = 2 * prefix > X.weight ? 2 * prefix - X.weight : X.weight - 2 * prefix;
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    auto k = static_cast<std::ptrdiff_t>(best);
    Y.children.assign(X.children.begin() + k, X.children.end());
    Y.m.assign(X.m.begin() + k, X.m.end());
    X.children.resize(best);
    X.m.resize(best);
    X.weight = Y.weight = 0;
    for (NodeId c : X.children) X.weight += node(c).weight;
    for (NodeId c : Y.children) {
      Y.weight += node(c).weight;
      nodes_[static_cast<std::size_t>(c)].parent = y;
    }
    sep = Y.m.front();
  }
  Y.lo = sep;
  Y.hi = X.hi;
  X.hi = sep - 1;
  if (splits_.size() <= X.level) splits_.resize(X.level + 1, 0);
  ++splits_[X.level];
  ev.splits.emplace_back(x, y);

  if (X.parent == kNone) {
    NodeId r = alloc();
    Node& R = nodes_[static_cast<std::size_t>(r)];
    const Node& X2 = node(x);
    const Node& Y2 = node(y);
    R.level = X2.level + 1;
    R.children = {x, y};
    R.m = {X2.lo, sep};
    R.lo = X2.lo;
    R.hi = Y2.hi;
    R.weight = X2.weight + Y2.weight;
    nodes_[static_cast<std::size_t>(x)].parent = r;
    nodes_[static_cast<std::size_t>(y)].parent = r;
    root_ = r;
    ev.root_split = true;
    if (splits_.size() <= R.level) splits_.resize(R.level + 1, 0);
    refresh_hra(r);
    return;
  }
  NodeId p = X.parent;
  std::size_t idx = child_index(x);
  Node& P = nodes_[static_cast<std::size_t>(p)];
  P.children.insert(P.children.begin() + static_cast<std::ptrdiff_t>(idx) + 1, y);
  P.m.insert(P.m.begin() + static_cast<std::ptrdiff_t>(idx) + 1, sep);
  refresh_hra(p);
}

void WbTree::refresh_hra(NodeId top) {
  std::vector<NodeId> stack{top};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    const Node& n = node(u);
    if (n.is_leaf())
      refresh_leaf(u);
    else
      stack.insert(stack.end(), n.children.begin(), n.children.end());
  }
}

void WbTree::refresh_leaf(NodeId leaf) {
  Node& l = nodes_[static_cast<std::size_t>(leaf)];
  l.k1.clear();
  l.k2.clear();
  NodeId child = leaf;
  for (NodeId u = l.parent; u != kNone; child = u, u = node(u).parent) {
    const Node& n = node(u);
    std::size_t i = child_index(child);
    if (i >= 1) l.k1.push_back({n.m[i], u});
    if (i + 1 < n.children.size()) l.k2.push_back({n.m[i + 1], u});
  }
}

WbTree::NodeId WbTree::hra_query(NodeId leaf, Range q, CostMeter* meter) const {
  // Bottom-up, K1 falls and K2 rises, so each condition holds on a prefix.
  const Node& l = node(leaf);
  auto k1_end = std::partition_point(l.k1.begin(), l.k1.end(), [&](const HraEntry& e) {
    if (meter) ++meter->locate_ops;
    return e.m > q.a();
  });
  auto k2_end = std::partition_point(l.k2.begin(), l.k2.end(), [&](const HraEntry& e) {
    if (meter) ++meter->locate_ops;
    return e.m <= q.b();
  });
  NodeId best = kNone;
  if (k1_end != l.k1.begin()) best = std::prev(k1_end)->node;
  if (k2_end != l.k2.begin()) {
    NodeId cand = std::prev(k2_end)->node;
    if (best == kNone || node(cand).level > node(best).level) best = cand;
  }
  return best;
}

std::vector<WbTree::Subrange> WbTree::split_range(std::span<const Value> m, Range q) {
  auto route_in = [&](Value v) -> std::size_t {
    auto it = std::upper_bound(m.begin(), m.end(), v);
    return it == m.begin() ? 0 : static_cast<std::size_t>(it - m.begin()) - 1;
  };
  std::vector<Subrange> out;
  if (m.empty()) return out;
  std::size_t f = route_in(q.a());
  std::size_t g = route_in(q.b());
  for (std::size_t j = f; j <= g; ++j)
    out.push_back({j, j == f ? q.a() : m[j], j == g ? q.b() : m[j + 1] - 1});
  return out;
}

std::vector<WbTree::Subrange> WbTree::child_subranges(NodeId u, Range q) const {
  const Node& n = node(u);
  if (n.is_leaf()) return {{0, q.a(), q.b()}};
  return split_range(n.m, q);
}

std::size_t WbTree::splits_at_level(unsigned level) const {
  return level < splits_.size() ? splits_[level] : 0;
}

std::string WbTree::check_invariants() const {
  std::ostringstream err;
  const Node& r = node(root_);
  if (r.parent != kNone) err << "root has a parent; ";
  if (r.lo != 0 || r.hi != kMaxKey) err << "root range is not the full key space; ";
  std::size_t total = 0;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const Node& n = node(id);
    if (n.weight > 2 * nominal(n.level)) err << "node " << id << " overweight; ";
    if (id != root_ && 4 * n.weight < nominal(n.level)) err << "node " << id << " underweight; ";
    if (n.is_leaf()) {
      if (n.level != 0) err << "leaf " << id << " not at level 0; ";
      if (n.weight != n.values.size()) err << "leaf " << id << " weight mismatch; ";
      if (!std::is_sorted(n.values.begin(), n.values.end())) err << "leaf " << id << " unsorted; ";
      for (Value v : n.values)
        if (v < n.lo || v > n.hi) err << "value " << v << " outside leaf " << id << "; ";
      total += n.values.size();
      // Recompute the highest-range-ancestor sequences.
      std::vector<HraEntry> k1, k2;
      NodeId child = id;
      for (NodeId u = n.parent; u != kNone; child = u, u = node(u).parent) {
        const Node& p = node(u);
        std::size_t i = static_cast<std::size_t>(
            std::find(p.children.begin(), p.children.end(), child) - p.children.begin());
        if (i >= 1) k1.push_back({p.m[i], u});
        if (i + 1 < p.children.size()) k2.push_back({p.m[i + 1], u});
      }
      auto same = [](const std::vector<HraEntry>& x, const std::vector<HraEntry>& y) {
        return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), [](auto& p, auto& q) {
                 return p.m == q.m && p.node == q.node;
               });
      };
      if (!same(k1, n.k1) || !same(k2, n.k2)) err << "leaf " << id << " stale hra; ";
      for (std::size_t i = 1; i < k1.size(); ++i)
        if (k1[i].m > k1[i - 1].m) err << "leaf " << id << " K1 not monotone; ";
      for (std::size_t i = 1; i < k2.size(); ++i)
        if (k2[i].m <= k2[i - 1].m) err << "leaf " << id << " K2 not monotone; ";
      continue;
    }
    if (n.m.size() != n.children.size()) err << "node " << id << " m/children size; ";
    if (n.m.empty() || n.m.front() != n.lo) err << "node " << id << " m[0] != lo; ";
    std::size_t w = 0;
    for (std::size_t j = 0; j < n.children.size(); ++j) {
      const Node& c = node(n.children[j]);
      if (c.parent != id) err << "child parent link broken at " << id << "; ";
      if (c.level + 1 != n.level) err << "level mismatch at " << id << "; ";
      if (j > 0 && n.m[j] <= n.m[j - 1]) err << "m not increasing at " << id << "; ";
      if (c.lo != n.m[j]) err << "child lo mismatch at " << id << "; ";
      Value want_hi = j + 1 < n.children.size() ? n.m[j + 1] - 1 : n.hi;
      if (c.hi != want_hi) err << "child hi mismatch at " << id << "; ";
      w += c.weight;
      stack.push_back(n.children[j]);
    }
    if (w != n.weight) err << "node " << id << " weight mismatch; ";
  }
  if (total != size_) err << "size mismatch; ";
  return err.str();
}

}  // namespace crr
