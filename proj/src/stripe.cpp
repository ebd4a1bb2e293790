#include "crr/stripe.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace crr {

namespace {

std::vector<Value> digits_of(Value h, unsigned tau) {
  std::vector<Value> d;
  for (; h > 0; h /= tau) d.push_back(h % tau);
  return d;
}

}  // namespace

std::vector<Value> update_thresholds(Value h, unsigned tau) {
  auto d = digits_of(h, tau);
  std::vector<Value> out;
  Value prefix = 0;
  Value power = 1;
  for (std::size_t i = 1; i < d.size(); ++i) power *= tau;
  for (std::size_t r = d.size(); r-- > 0; power /= tau) {
    for (Value s = 1; s <= d[r]; ++s) out.push_back(prefix + s * power);
    prefix += d[r] * power;
  }
  return out;
}

std::vector<Value> query_thresholds(Value c, unsigned tau, Value top) {
  std::size_t g = 0;
  for (Value p = 1; p < top; p *= tau) ++g;
  auto d = digits_of(c, tau);
  d.resize(std::max(d.size(), g + 1), 0);
  std::vector<Value> out{c};
  Value power = 1;
  for (std::size_t v = 1; v <= g; ++v) {
    power *= tau;
    Value f = (d[v] + 1) * power;
    Value above = power * tau;
    for (std::size_t s = v + 1; s < d.size(); ++s, above *= tau) f += d[s] * above;
    if (f <= top) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Stripe::Params Stripe::params_for(std::size_t n, Value max_y) {
  Params p;
  unsigned logn = ceil_log2(n);
  p.tau = std::max(2u, static_cast<unsigned>(std::ceil(std::sqrt(static_cast<double>(logn)))));
  Value need = std::max<Value>({logn, max_y, 1});
  p.top = p.tau;
  while (p.top < need) p.top *= p.tau;
  p.group_cap = std::max<std::size_t>(2, logn);
  return p;
}

Stripe::Stripe(Params p) : params_(p), r_(p.top + 1), thresholds_(p.top + 1) {
  if (p.tau < 2 || p.top < 1 || p.group_cap < 2)
    throw Error(ErrorCode::InvalidArgument, "bad stripe parameters");
  for (Value h = 1; h <= p.top; ++h) thresholds_[h] = update_thresholds(h, p.tau);
  Gid g = new_group();
  seps_[0] = g;
}

Stripe::Stripe(Params p, std::span<const StripePoint> sorted) : Stripe(p) {
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& q = sorted[i];
    if (q.y < 1 || q.y > params_.top || q.x == 0)
      throw Error(ErrorCode::InvalidArgument, "stripe point out of range");
    if (i > 0 && sorted[i - 1].x >= q.x)
      throw Error(ErrorCode::DuplicateX, "bulk input must be sorted by distinct x");
  }
  // Equal shares of about group_cap points, all within [cap/2, 2cap).
  std::size_t groups = std::max<std::size_t>(1, sorted.size() / params_.group_cap);
  Gid g = seps_.begin()->second;
  std::size_t share = 1;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == sorted.size() * share / groups) {
      if (i > 0) {
        relist(g);
        g = new_group();
        seps_[sorted[i].x] = g;
      }
      ++share;
    }
    groups_[g].pts.emplace_hint(groups_[g].pts.end(), sorted[i].x, sorted[i].y);
    all_.insert(all_.end(), sorted[i].x);
  }
  relist(g);
}

Stripe::Gid Stripe::new_group() {
  Gid g;
  if (!free_.empty()) {
    g = free_.back();
    free_.pop_back();
  } else {
    g = static_cast<Gid>(groups_.size());
    groups_.emplace_back();
  }
  Group& grp = groups_[g];
  grp.pts.clear();
  grp.tree = Pst();
  grp.gmin.assign(params_.top + 1, 0);
  grp.gmax.assign(params_.top + 1, 0);
  grp.cnt.assign(params_.top + 1, 0);
  return g;
}

Stripe::Gid Stripe::group_of(Value x) const { return std::prev(seps_.upper_bound(x))->second; }

void Stripe::set_extremes(Gid g, Value h, bool have, Value lo, Value hi) {
  Group& grp = groups_[g];
  bool had = grp.gmin[h] != 0 || grp.gmax[h] != 0;
  if (had) {
    r_[h].erase(r_[h].find({grp.gmin[h], g}));
    r_[h].erase(r_[h].find({grp.gmax[h], g}));
  }
  grp.gmin[h] = have ? lo : 0;
  grp.gmax[h] = have ? hi : 0;
  if (have) {
    r_[h].insert({lo, g});
    r_[h].insert({hi, g});
  }
}

void Stripe::rescan(Gid g, Value h) {
  bool have = false;
  Value lo = 0, hi = 0;
  for (const auto& [x, y] : groups_[g].pts) {
    const auto& t = thresholds_[y];
    if (!std::binary_search(t.begin(), t.end(), h)) continue;
    if (!have) lo = x;
    hi = x;
    have = true;
  }
  set_extremes(g, h, have, lo, hi);
}

void Stripe::unlist(Gid g) {
  for (Value h = 1; h <= params_.top; ++h)
    if (groups_[g].cnt[h]) set_extremes(g, h, false, 0, 0);
}

void Stripe::relist(Gid g) {
  Group& grp = groups_[g];
  std::fill(grp.cnt.begin(), grp.cnt.end(), 0);
  std::vector<Value> lo(params_.top + 1), hi(params_.top + 1);
  std::vector<PstPoint> pts;
  pts.reserve(grp.pts.size());
  for (const auto& [x, y] : grp.pts) {
    pts.push_back({x, params_.top - y, 0});
    for (Value h : thresholds_[y]) {
      if (grp.cnt[h]++ == 0) lo[h] = x;
      hi[h] = x;
    }
  }
  grp.tree = Pst(std::move(pts));
  std::fill(grp.gmin.begin(), grp.gmin.end(), 0);
  std::fill(grp.gmax.begin(), grp.gmax.end(), 0);
  for (Value h = 1; h <= params_.top; ++h)
    if (grp.cnt[h]) set_extremes(g, h, true, lo[h], hi[h]);
}

void Stripe::insert(Value x, Value y) {
  if (y < 1 || y > params_.top)
    throw Error(ErrorCode::InvalidArgument, "stripe height " + std::to_string(y) + " out of range");
  if (x == 0) throw Error(ErrorCode::InvalidArgument, "stripe x must be positive");
  if (contains(x)) throw Error(ErrorCode::DuplicateX, "duplicate x " + std::to_string(x));
  Gid g = group_of(x);
  Group& grp = groups_[g];
  grp.pts.emplace(x, y);
  grp.tree.insert({x, params_.top - y, 0});
  all_.insert(x);
  for (Value h : thresholds_[y]) {
    bool had = grp.cnt[h]++ > 0;
    Value lo = had ? std::min(grp.gmin[h], x) : x;
    Value hi = had ? std::max(grp.gmax[h], x) : x;
    if (!had || lo != grp.gmin[h] || hi != grp.gmax[h]) set_extremes(g, h, true, lo, hi);
  }
  if (grp.pts.size() >= 2 * params_.group_cap) split(g);
}

void Stripe::erase(Value x) {
  if (!contains(x)) throw Error(ErrorCode::NotFound, "x " + std::to_string(x) + " not present");
  Gid g = group_of(x);
  Group& grp = groups_[g];
  auto it = grp.pts.find(x);
  Value y = it->second;
  grp.pts.erase(it);
  grp.tree.erase(x);
  all_.erase(x);
  for (Value h : thresholds_[y]) {
    if (--grp.cnt[h] == 0)
      set_extremes(g, h, false, 0, 0);
    else if (grp.gmin[h] == x || grp.gmax[h] == x)
      rescan(g, h);
  }
  if (2 * grp.pts.size() < params_.group_cap && seps_.size() > 1) merge_small(g, x);
}

void Stripe::split(Gid g) {
  unlist(g);
  Gid ng = new_group();
  Group& grp = groups_[g];
  auto mid = std::next(grp.pts.begin(), static_cast<std::ptrdiff_t>(grp.pts.size() / 2));
  Value sep = mid->first;
  groups_[ng].pts.insert(mid, grp.pts.end());
  grp.pts.erase(mid, grp.pts.end());
  seps_[sep] = ng;
  relist(g);
  relist(ng);
}

void Stripe::merge_small(Gid g, Value x) {
  auto it = std::prev(seps_.upper_bound(x));
  auto next = std::next(it);
  Gid keep, drop;
  std::map<Value, Gid>::iterator drop_it;
  if (next != seps_.end()) {
    keep = g;
    drop = next->second;
    drop_it = next;
  } else {
    keep = std::prev(it)->second;
    drop = g;
    drop_it = it;
  }
  unlist(keep);
  unlist(drop);
  groups_[keep].pts.merge(groups_[drop].pts);
  groups_[drop].pts.clear();
  groups_[drop].tree = Pst();
  seps_.erase(drop_it);
  free_.push_back(drop);
  relist(keep);
  if (groups_[keep].pts.size() >= 2 * params_.group_cap) split(keep);
}

bool Stripe::query(Value a, Value b, Value c, std::vector<StripePoint>& out, CostMeter* meter,
                   std::size_t limit, QueryStats* stats) const {
  if (stats) *stats = QueryStats{};
  c = std::max<Value>(c, 1);
  if (a > b || c > params_.top) return true;
  auto first = all_.lower_bound(a);
  if (first == all_.end() || *first > b) return true;
  std::size_t start = out.size();
  std::vector<PstPoint> hits;
  auto answer = [&](Gid g) {
    hits.clear();
    groups_[g].tree.query(a, b, params_.top - c + 1, hits, meter);
    for (const auto& p : hits) out.push_back({p.x, params_.top - p.y});
    if (stats) ++stats->groups_answered;
    return out.size() - start <= limit;
  };

  Gid g0 = group_of(*first);
  if (group_of(*std::prev(all_.upper_bound(b))) == g0) {
    if (stats) stats->single_group = true;
    return answer(g0);
  }

  struct Visit {
    std::size_t probe;
    std::size_t count;
    bool answered;
  };
  std::unordered_map<Gid, Visit> visits;
  auto fs = query_thresholds(c, params_.tau, params_.top);
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const auto& rh = r_[fs[j]];
    if (stats) ++stats->probes;
    for (auto it = rh.lower_bound({a, 0}); it != rh.end() && it->first <= b; ++it) {
      if (meter) ++meter->touches;
      auto [v, fresh] = visits.try_emplace(it->second, Visit{j, 1, false});
      if (!fresh) {
        if (v->second.probe == j) continue;
        v->second.probe = j;
        ++v->second.count;
      }
      if (stats) stats->max_group_visits = std::max(stats->max_group_visits, v->second.count);
      if (v->second.answered) continue;
      v->second.answered = true;
      if (!answer(it->second)) return false;
    }
  }
  return true;
}

std::vector<Stripe::GroupView> Stripe::group_views() const {
  std::vector<GroupView> out;
  for (const auto& [sep, g] : seps_) {
    const Group& grp = groups_[g];
    GroupView v;
    for (const auto& [x, y] : grp.pts) v.points.push_back({x, y});
    v.gmin = grp.gmin;
    v.gmax = grp.gmax;
    v.has.resize(grp.cnt.size());
    for (std::size_t h = 0; h < grp.cnt.size(); ++h) v.has[h] = grp.cnt[h] > 0;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<StripePoint> Stripe::points() const {
  std::vector<StripePoint> out;
  for (const auto& [sep, g] : seps_)
    for (const auto& [x, y] : groups_[g].pts) out.push_back({x, y});
  return out;
}

bool Stripe::check_invariants() const {
  std::vector<std::multiset<std::pair<Value, Gid>>> want(params_.top + 1);
  std::size_t total = 0;
  for (auto it = seps_.begin(); it != seps_.end(); ++it) {
    Gid g = it->second;
    const Group& grp = groups_[g];
    auto next = std::next(it);
    total += grp.pts.size();
    if (grp.tree.size() != grp.pts.size()) return false;
    if (grp.pts.size() >= 2 * params_.group_cap) return false;
    if (seps_.size() > 1 && 2 * grp.pts.size() < params_.group_cap) return false;
    for (const auto& [x, y] : grp.pts) {
      if (x < it->first || (next != seps_.end() && x >= next->first)) return false;
      if (!all_.count(x)) return false;
    }
    for (Value h = 1; h <= params_.top; ++h) {
      std::uint32_t n = 0;
      Value lo = 0, hi = 0;
      for (const auto& [x, y] : grp.pts) {
        const auto& t = thresholds_[y];
        if (!std::binary_search(t.begin(), t.end(), h)) continue;
        if (n++ == 0) lo = x;
        hi = x;
      }
      if (n != grp.cnt[h]) return false;
      if (n && (grp.gmin[h] != lo || grp.gmax[h] != hi)) return false;
      if (n) {
        want[h].insert({lo, g});
        want[h].insert({hi, g});
      }
    }
  }
  return total == all_.size() && want == r_;
}

}  // namespace crr
