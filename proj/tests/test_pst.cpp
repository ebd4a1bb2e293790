#include "crr/pst.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crr;
using namespace crr_test;

namespace {

std::vector<PstPoint> brute_query(const std::vector<PstPoint>& pts, Value a, Value b, Value c) {
  std::vector<PstPoint> out;
  for (const auto& p : pts)
    if (a <= p.x && p.x <= b && p.y < c) out.push_back(p);
  return out;
}

std::vector<PstPoint> sorted(std::vector<PstPoint> v) {
  std::sort(v.begin(), v.end(), [](const PstPoint& p, const PstPoint& q) { return p.x < q.x; });
  return v;
}

std::vector<PstPoint> run(const Pst& t, Value a, Value b, Value c) {
  std::vector<PstPoint> out;
  t.query(a, b, c, out);
  return sorted(out);
}

std::vector<PstPoint> e1_points() {
  auto pts = e1();
  auto prev = brute_prev(pts);
  std::vector<PstPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({pts[i].value, prev[i], pts[i].color});
  return out;
}

}  // namespace

TEST_SUITE("threesided") {

TEST_CASE("build fixtures") {
  Pst empty(std::vector<PstPoint>{});
  CHECK(empty.empty());
  CHECK_FALSE(empty.top().has_value());
  Pst one(std::vector<PstPoint>{{5, 0, 0}});
  CHECK(one.top()->x == 5);
  Pst t(e1_points());
  CHECK(t.top()->y == 0);
  CHECK(t.check_invariants());
  CHECK_THROWS_AS(Pst(std::vector<PstPoint>{{3, 1, 0}, {3, 2, 0}}), Error);
}

TEST_CASE("query fixtures on the reduction of E1") {
  Pst t(e1_points());
  auto got = run(t, 4, 13, 4);
  std::vector<PstPoint> want{{5, 1, R}, {7, 0, G}, {9, 3, B}};
  CHECK(got == want);
  CHECK(run(t, 7, 7, 1) == std::vector<PstPoint>{{7, 0, G}});
  CHECK(run(t, 1, 100, 0).empty());
}

TEST_CASE("slow color query fixtures") {
  SlowColorIndex s(e1());
  CHECK(as_set(s.query({4, 13})) == std::set<ColorId>{0, 1, 2});
  CHECK(s.query({4, 13}).size() == 3);
  CHECK(s.query({12, 12}) == std::vector<ColorId>{R});
  CHECK(s.query({8, 8}).empty());
}

TEST_CASE("insert and delete fixtures") {
  Pst t(e1_points());
  auto before = run(t, 4, 13, 4);
  t.insert({6, 0, 9});
  auto want = before;
  want.push_back({6, 0, 9});
  CHECK(run(t, 4, 13, 4) == sorted(want));
  t.erase(6);
  CHECK(run(t, 4, 13, 4) == before);
  CHECK_THROWS_AS(t.insert({5, 0, 0}), Error);
  CHECK_THROWS_AS(t.erase(6), Error);

  Pst u(e1_points());
  auto root = *u.top();
  u.erase(root.x);
  auto rest = e1_points();
  std::erase(rest, root);
  auto next = *std::min_element(rest.begin(), rest.end(), [](const PstPoint& p, const PstPoint& q) {
    return p.y < q.y || (p.y == q.y && p.x < q.x);
  });
  CHECK(*u.top() == next);
}

TEST_CASE("random queries match a filter scan") {
  std::mt19937_64 rng(21);
  int pairs = 0;
  for (int inst = 0; inst < 100; ++inst) {
    std::size_t n = rng() % 200;
    auto base = random_instance(rng, n, 2000, 1);
    std::vector<PstPoint> pts;
    std::uniform_int_distribution<Value> yd(0, 2000);
    for (auto& p : base) pts.push_back({p.value, yd(rng), static_cast<std::uint32_t>(rng() % 7)});
    Pst t(pts);
    REQUIRE(t.check_invariants());
    std::uniform_int_distribution<Value> d(0, 2001);
    for (int q = 0; q < 100; ++q, ++pairs) {
      Value a = d(rng), b = d(rng), c = d(rng);
      if (a > b) std::swap(a, b);
      CHECK(run(t, a, b, c) == sorted(brute_query(pts, a, b, c)));
    }
  }
  CHECK(pairs >= 10000);
}

TEST_CASE("invariants survive randomized updates") {
  std::mt19937_64 rng(22);
  Pst t;
  std::map<Value, PstPoint> live;
  std::uniform_int_distribution<Value> xd(1, 600), yd(0, 600);
  for (int step = 0; step < 4000; ++step) {
    Value x = xd(rng);
    if (live.count(x)) {
      t.erase(x);
      live.erase(x);
    } else {
      PstPoint p{x, yd(rng), 0};
      t.insert(p);
      live[x] = p;
    }
    REQUIRE(t.size() == live.size());
    if (step % 50 == 0) {
      REQUIRE(t.check_invariants());
      std::vector<PstPoint> all;
      for (auto& [_, p] : live) all.push_back(p);
      Value a = xd(rng), b = xd(rng), c = yd(rng);
      if (a > b) std::swap(a, b);
      CHECK(run(t, a, b, c) == brute_query(all, a, b, c));
    }
  }
  CHECK(t.check_invariants());
}

TEST_CASE("insert then delete leaves every answer unchanged") {
  std::mt19937_64 rng(23);
  auto pts = e1_points();
  Pst t(pts);
  t.insert({100, 0, 1});
  t.erase(100);
  for (Value a = 1; a <= 21; ++a)
    for (Value b = a; b <= 21; ++b) CHECK(run(t, a, b, a) == brute_query(pts, a, b, a));
}

TEST_CASE("slow color query returns each color once") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    auto pts = random_instance(rng, 1 + rng() % 300, 3000, 1 + rng() % 30);
    SlowColorIndex s(pts);
    Value a = 1 + rng() % 3000, b = 1 + rng() % 3000;
    if (a > b) std::swap(a, b);
    auto got = s.query({a, b});
    CHECK(no_duplicates(got));
    CHECK(as_set(got) == brute_colors(pts, a, b));
  }
}

TEST_CASE("touch count is logarithmic plus output") {
  std::mt19937_64 rng(25);
  auto pts = random_instance(rng, 4096, 1 << 20, 64);
  SlowColorIndex s(pts);
  for (int q = 0; q < 200; ++q) {
    Value a = 1 + rng() % (1 << 20), b = a + rng() % 5000;
    CostMeter m;
    auto got = s.query({a, b}, &m);
    CHECK(m.touches <= 3 * got.size() + 4 * 2 * 12 + 4);
  }
}

}
