#include "crr/stripe.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crr;
using namespace crr_test;

namespace {

using Pts = std::vector<StripePoint>;

Pts brute(const std::map<Value, Value>& live, Value a, Value b, Value c) {
  Pts out;
  for (const auto& [x, y] : live)
    if (a <= x && x <= b && y >= c) out.push_back({x, y});
  return out;
}

Pts run(const Stripe& s, Value a, Value b, Value c, Stripe::QueryStats* st = nullptr) {
  Pts out;
  s.query(a, b, c, out, nullptr, std::numeric_limits<std::size_t>::max(), st);
  std::sort(out.begin(), out.end(), [](auto& p, auto& q) { return p.x < q.x; });
  return out;
}

// Brute set {h_{r,s}} straight from the digit formula.
std::set<Value> brute_update(Value h, unsigned tau) {
  std::vector<Value> d;
  for (Value v = h; v; v /= tau) d.push_back(v % tau);
  std::set<Value> out;
  for (std::size_t r = 0; r < d.size(); ++r) {
    Value prefix = 0, p = 1;
    for (std::size_t j = 0; j < d.size(); ++j, p *= tau)
      if (j > r) prefix += d[j] * p;
    Value pr = 1;
    for (std::size_t j = 0; j < r; ++j) pr *= tau;
    for (Value s = 1; s <= d[r]; ++s) out.insert(prefix + s * pr);
  }
  return out;
}

Stripe::Params small_params(Value top = 16, std::size_t cap = 4) {
  Stripe::Params p;
  p.tau = 4;
  p.top = top;
  p.group_cap = cap;
  return p;
}

}  // namespace

TEST_SUITE("stripe3s") {

TEST_CASE("update_thresholds fixtures") {
  CHECK(update_thresholds(6, 4) == std::vector<Value>{4, 5, 6});
  CHECK(update_thresholds(1, 4) == std::vector<Value>{1});
  CHECK(update_thresholds(16, 4) == std::vector<Value>{16});
  for (unsigned tau : {2u, 3u, 4u, 5u})
    for (Value h = 1; h <= 200; ++h) {
      auto t = update_thresholds(h, tau);
      CHECK(std::set<Value>(t.begin(), t.end()) == brute_update(h, tau));
      CHECK(t.back() == h);
    }
}

TEST_CASE("query_thresholds fixtures") {
  // A point at height 16 is the only one above 6 in some group; the probe at
  // 16 is what recovers it, so the set must include 16.
  CHECK(query_thresholds(6, 4, 16) == std::vector<Value>{6, 8, 16});
  CHECK(query_thresholds(1, 4, 16) == std::vector<Value>{1, 4, 16});
  CHECK(query_thresholds(16, 4, 16) == std::vector<Value>{16});
}

TEST_CASE("probe thresholds recover every extreme at or above c") {
  // For every height h' >= c, some f_j lies in the threshold set of h'.
  for (unsigned tau : {2u, 3u, 4u}) {
    Value top = 1;
    while (top < 60) top *= tau;
    for (Value c = 1; c <= top; ++c) {
      auto fs = query_thresholds(c, tau, top);
      for (Value f : fs) CHECK(f >= c);
      for (Value hp = c; hp <= top; ++hp) {
        auto t = update_thresholds(hp, tau);
        bool hit = std::any_of(fs.begin(), fs.end(),
                               [&](Value f) { return std::binary_search(t.begin(), t.end(), f); });
        CHECK(hit);
      }
    }
  }
}

TEST_CASE("params") {
  auto p = Stripe::params_for(1 << 16);
  CHECK(p.tau == 4);
  CHECK(p.top == 16);
  CHECK(p.group_cap == 16);
  auto q = Stripe::params_for(1 << 10, 20);
  CHECK(q.tau == 4);
  CHECK(q.top == 64);
}

TEST_CASE("insert fixtures") {
  Stripe s(small_params());
  s.insert(10, 6);
  auto v = s.group_views();
  REQUIRE(v.size() == 1);
  for (Value h : {4, 5, 6}) {
    CHECK(v[0].has[h]);
    CHECK(v[0].gmin[h] == 10);
    CHECK(v[0].gmax[h] == 10);
  }
  CHECK_FALSE(v[0].has[1]);
  CHECK_FALSE(v[0].has[7]);
  s.insert(11, 2);
  s.insert(40, 6);
  CHECK(run(s, 5, 45, 3) == Pts{{10, 6}, {40, 6}});
  CHECK(run(s, 5, 45, 1) == Pts{{10, 6}, {11, 2}, {40, 6}});
  CHECK(run(s, 12, 39, 1).empty());
  CHECK_THROWS_AS(s.insert(10, 1), Error);
  CHECK_THROWS_AS(s.insert(12, 17), Error);
  CHECK_THROWS_AS(s.insert(12, 0), Error);
  CHECK(s.check_invariants());
}

TEST_CASE("deleting the only point empties the tables") {
  Stripe s(small_params());
  s.insert(7, 9);
  s.erase(7);
  auto v = s.group_views();
  REQUIRE(v.size() == 1);
  CHECK(std::none_of(v[0].has.begin(), v[0].has.end(), [](bool b) { return b; }));
  CHECK(s.check_invariants());
  CHECK_THROWS_AS(s.erase(7), Error);
}

TEST_CASE("randomized updates and queries match a filter") {
  std::mt19937_64 rng(51);
  std::size_t pairs = 0;
  for (int inst = 0; inst < 30; ++inst) {
    auto p = small_params(inst % 2 ? 16 : 27, 2 + rng() % 6);
    if (inst % 2 == 0) p.tau = 3;
    Stripe s(p);
    std::map<Value, Value> live;
    std::uniform_int_distribution<Value> xd(1, 400), yd(1, p.top);
    for (int step = 0; step < 1500; ++step) {
      Value x = xd(rng);
      if (live.count(x) && rng() % 3 == 0) {
        s.erase(x);
        live.erase(x);
      } else if (!live.count(x)) {
        Value y = yd(rng);
        s.insert(x, y);
        live[x] = y;
      }
      if (step % 100 == 0) REQUIRE(s.check_invariants());
      Value a = xd(rng), b = xd(rng), c = yd(rng);
      if (a > b) std::swap(a, b);
      // Half the queries end exactly on a group boundary.
      if (step % 2 == 0 && s.group_count() > 1) {
        auto views = s.group_views();
        const auto& g = views[rng() % views.size()];
        if (!g.points.empty()) {
          a = g.points.front().x;
          b = std::max(a, std::min<Value>(400, g.points.back().x + rng() % 60));
        }
      }
      Stripe::QueryStats st;
      auto got = run(s, a, b, c, &st);
      REQUIRE(got == brute(live, a, b, c));
      Value g = 0;
      for (Value t = 1; t < p.top; t *= p.tau) ++g;
      CHECK(st.max_group_visits <= g + 1);
      ++pairs;
    }
    CHECK(s.check_invariants());
  }
  CHECK(pairs >= 10000);
}

TEST_CASE("the probe set contains the exact per-group extremes") {
  std::mt19937_64 rng(52);
  auto p = small_params(64, 6);
  Stripe s(p);
  std::uniform_int_distribution<Value> xd(1, 5000), yd(1, 64);
  for (int i = 0; i < 600; ++i) {
    Value x = xd(rng);
    if (!s.contains(x)) s.insert(x, yd(rng));
  }
  for (const auto& g : s.group_views())
    for (Value c = 1; c <= p.top; ++c) {
      std::optional<Value> lo, hi;
      for (const auto& q : g.points)
        if (q.y >= c) {
          if (!lo) lo = q.x;
          hi = q.x;
        }
      auto fs = query_thresholds(c, p.tau, p.top);
      std::set<Value> mins, maxs;
      for (Value f : fs)
        if (g.has[f]) {
          mins.insert(g.gmin[f]);
          maxs.insert(g.gmax[f]);
        }
      if (!lo) {
        CHECK(mins.empty());
        continue;
      }
      CHECK(mins.count(*lo));
      CHECK(maxs.count(*hi));
      CHECK(*mins.begin() == *lo);
      CHECK(*maxs.rbegin() == *hi);
    }
}

TEST_CASE("limit stops the query early") {
  Stripe s(small_params(16, 3));
  for (Value x = 1; x <= 100; ++x) s.insert(x, 1 + x % 16);
  Pts out;
  CHECK_FALSE(s.query(1, 100, 1, out, nullptr, 10));
  CHECK(out.size() > 10);
  CHECK(out.size() < 100);
  out.clear();
  CHECK(s.query(1, 100, 1, out, nullptr, 100));
  CHECK(out.size() == 100);
}

TEST_CASE("query touches scale with output") {
  std::mt19937_64 rng(53);
  auto p = Stripe::params_for(1 << 14);
  Stripe s(p);
  std::uniform_int_distribution<Value> xd(1, 1 << 24), yd(1, p.top);
  while (s.size() < (1u << 14)) {
    Value x = xd(rng);
    if (!s.contains(x)) s.insert(x, yd(rng));
  }
  for (int q = 0; q < 300; ++q) {
    Value a = xd(rng), b = a + rng() % (1 << 18), c = yd(rng);
    Pts out;
    CostMeter m;
    s.query(a, b, c, out, &m);
    // Each probe hit is a reported point; each answered group costs its
    // tree's boundary paths.
    CHECK(m.touches <= 8 * (out.size() + 1) + 8 * p.group_cap);
  }
}

}

TEST_SUITE("stripe3s") {

TEST_CASE("bulk load equals one-at-a-time inserts") {
  std::mt19937_64 rng(54);
  auto p = small_params(27, 4);
  p.tau = 3;
  std::map<Value, Value> live;
  std::uniform_int_distribution<Value> xd(1, 3000), yd(1, 27);
  while (live.size() < 500) live[xd(rng)] = yd(rng);
  std::vector<StripePoint> pts;
  for (auto& [x, y] : live) pts.push_back({x, y});
  Stripe s(p, pts);
  CHECK(s.check_invariants());
  CHECK(s.size() == 500);
  CHECK(s.points() == pts);
  for (int q = 0; q < 2000; ++q) {
    Value a = xd(rng), b = xd(rng), c = yd(rng);
    if (a > b) std::swap(a, b);
    REQUIRE(run(s, a, b, c) == brute(live, a, b, c));
  }
  // Still fully dynamic afterwards.
  for (int i = 0; i < 400; ++i) {
    Value x = pts[rng() % pts.size()].x;
    if (live.count(x)) {
      s.erase(x);
      live.erase(x);
    }
  }
  CHECK(s.check_invariants());
  CHECK(run(s, 1, 3000, 1) == brute(live, 1, 3000, 1));
  std::vector<StripePoint> bad{{5, 1}, {5, 2}};
  CHECK_THROWS_AS(Stripe(p, bad), Error);
}

}
