#include "crr/pst.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

namespace crr {

struct Pst::Node {
  PstPoint point;
  Value split = 0;
  std::size_t size = 1;
  NodePtr left;
  NodePtr right;
};

namespace {

bool heap_less(const PstPoint& p, const PstPoint& q) {
  return p.y < q.y || (p.y == q.y && p.x < q.x);
}

}  // namespace

Pst::Pst() = default;
Pst::~Pst() = default;
Pst::Pst(Pst&&) noexcept = default;
Pst& Pst::operator=(Pst&&) noexcept = default;

Pst::Pst(std::vector<PstPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const PstPoint& p, const PstPoint& q) { return p.x < q.x; });
  auto dup = std::adjacent_find(points.begin(), points.end(),
                                [](const PstPoint& p, const PstPoint& q) { return p.x == q.x; });
  if (dup != points.end())
    throw Error(ErrorCode::DuplicateX, "duplicate x " + std::to_string(dup->x));
  root_ = build(points);
}

Pst::NodePtr Pst::build(std::span<PstPoint> pts) {
  if (pts.empty()) return nullptr;
  auto top = std::min_element(pts.begin(), pts.end(), heap_less);
  std::rotate(pts.begin(), top, top + 1);
  auto node = std::make_unique<Node>();
  node->point = pts.front();
  node->size = pts.size();
  auto rest = pts.subspan(1);
  if (rest.empty()) {
    node->split = node->point.x;
    return node;
  }
  std::size_t mid = (rest.size() - 1) / 2;
  node->split = rest[mid].x;
  node->left = build(rest.first(mid + 1));
  node->right = build(rest.subspan(mid + 1));
  return node;
}

std::size_t Pst::size() const noexcept { return root_ ? root_->size : 0; }

std::optional<PstPoint> Pst::top() const {
  if (!root_) return std::nullopt;
  return root_->point;
}

std::optional<PstPoint> Pst::find(Value x) const {
  const Node* n = root_.get();
  while (n) {
    if (n->point.x == x) return n->point;
    n = x <= n->split ? n->left.get() : n->right.get();
  }
  return std::nullopt;
}

bool Pst::contains(Value x) const { return find(x).has_value(); }

void Pst::insert(const PstPoint& p) {
  if (contains(p.x)) throw Error(ErrorCode::DuplicateX, "duplicate x " + std::to_string(p.x));
  PstPoint carry = p;
  NodePtr* slot = &root_;
  while (*slot) {
    Node* n = slot->get();
    ++n->size;
    if (heap_less(carry, n->point)) std::swap(carry, n->point);
    slot = carry.x <= n->split ? &n->left : &n->right;
  }
  *slot = std::make_unique<Node>();
  (*slot)->point = carry;
  (*slot)->split = carry.x;
  rebalance_path(p.x);
}

void Pst::remove_top(NodePtr& slot) {
  Node* n = slot.get();
  if (!n->left && !n->right) {
    slot.reset();
    return;
  }
  NodePtr* pick;
  if (!n->left)
    pick = &n->right;
  else if (!n->right)
    pick = &n->left;
  else
    pick = heap_less(n->left->point, n->right->point) ? &n->left : &n->right;
  n->point = (*pick)->point;
  --n->size;
  remove_top(*pick);
}

void Pst::erase(Value x) {
  if (!contains(x)) throw Error(ErrorCode::NotFound, "x " + std::to_string(x) + " not present");
  NodePtr* slot = &root_;
  while ((*slot)->point.x != x) {
    Node* n = slot->get();
    --n->size;
    slot = x <= n->split ? &n->left : &n->right;
  }
  remove_top(*slot);
  rebalance_path(x);
}

void Pst::collect(const Node* n, std::vector<PstPoint>& out) {
  if (!n) return;
  out.push_back(n->point);
  collect(n->left.get(), out);
  collect(n->right.get(), out);
}

void Pst::rebalance_path(Value x) {
  NodePtr* slot = &root_;
  while (*slot) {
    Node* n = slot->get();
    std::size_t l = n->left ? n->left->size : 0;
    std::size_t r = n->right ? n->right->size : 0;
    if (n->size >= kMinRebuild && 10 * std::max(l, r) > 7 * n->size) {
      std::vector<PstPoint> pts;
      pts.reserve(n->size);
      collect(n, pts);
      std::sort(pts.begin(), pts.end(),
                [](const PstPoint& p, const PstPoint& q) { return p.x < q.x; });
      *slot = build(pts);
      return;
    }
    slot = x <= n->split ? &n->left : &n->right;
  }
}

void Pst::query(Value a, Value b, Value c, std::vector<PstPoint>& out, CostMeter* meter) const {
  if (a > b || c == 0 || !root_) return;
  std::vector<const Node*> stack;
  stack.reserve(64);
  stack.push_back(root_.get());
  std::uint64_t touched = 0;
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    ++touched;
    if (n->point.y >= c) continue;
    if (a <= n->point.x && n->point.x <= b) out.push_back(n->point);
    if (n->right && b > n->split) stack.push_back(n->right.get());
    if (n->left && a <= n->split) stack.push_back(n->left.get());
  }
  if (meter) meter->touches += touched;
}

std::vector<PstPoint> Pst::points() const {
  std::vector<PstPoint> out;
  out.reserve(size());
  collect(root_.get(), out);
  return out;
}

bool Pst::check_invariants() const {
  struct Frame {
    const Node* n;
    Value lo;  // exclusive, only meaningful when has_lo
    Value hi;
    bool has_lo;
  };
  std::vector<Frame> todo;
  if (root_) todo.push_back({root_.get(), 0, std::numeric_limits<Value>::max(), false});
  while (!todo.empty()) {
    auto [n, lo, hi, has_lo] = todo.back();
    todo.pop_back();
    if (has_lo ? n->point.x <= lo : false) return false;
    if (n->point.x > hi) return false;
    std::size_t l = n->left ? n->left->size : 0;
    std::size_t r = n->right ? n->right->size : 0;
    if (n->size != 1 + l + r) return false;
    if (n->left) {
      if (heap_less(n->left->point, n->point)) return false;
      todo.push_back({n->left.get(), lo, std::min(hi, n->split), has_lo});
    }
    if (n->right) {
      if (heap_less(n->right->point, n->point)) return false;
      bool tighter = !has_lo || n->split > lo;
      todo.push_back({n->right.get(), tighter ? n->split : lo, hi, true});
    }
  }
  return true;
}

std::vector<Pst::FlatNode> Pst::flatten() const {
  std::vector<FlatNode> out;
  if (!root_) return out;
  std::deque<const Node*> queue{root_.get()};
  std::vector<const Node*> order;
  while (!queue.empty()) {
    const Node* n = queue.front();
    queue.pop_front();
    order.push_back(n);
    if (n->left) queue.push_back(n->left.get());
    if (n->right) queue.push_back(n->right.get());
  }
  std::unordered_map<const Node*, std::int64_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = static_cast<std::int64_t>(i);
  out.reserve(order.size());
  for (const Node* n : order)
    out.push_back({n->point, n->split, n->left ? index[n->left.get()] : -1,
                   n->right ? index[n->right.get()] : -1});
  return out;
}

std::vector<PstPoint> reduction_points(std::span<const ColoredPoint> sorted) {
  auto prev = compute_prev(sorted);
  std::vector<PstPoint> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    out[i] = {sorted[i].value, prev[i], sorted[i].color};
  return out;
}

SlowColorIndex::SlowColorIndex(std::span<const ColoredPoint> sorted)
    : tree_(reduction_points(sorted)) {}

std::vector<ColorId> SlowColorIndex::query(Range q, CostMeter* meter) const {
  if (!clamp_to_values(q)) return {};
  std::vector<PstPoint> hits;
  tree_.query(q.a(), q.b(), q.a(), hits, meter);
  std::vector<ColorId> out;
  out.reserve(hits.size());
  for (const auto& p : hits) out.push_back(p.tag);
  return out;
}

}  // namespace crr
