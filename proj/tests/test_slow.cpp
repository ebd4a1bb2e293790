#include <cmath>

#include "crr/slow_index.hpp"
#include "doctest.h"
#include "audits.hpp"
#include "support.hpp"

using namespace crr;
using namespace crr_test;

namespace {

using NodeId = SlowIndex::NodeId;

std::vector<Value> values_of(const std::vector<ColoredPoint>& pts) {
  std::vector<Value> out;
  for (const auto& p : pts) out.push_back(p.value);
  return out;
}

}  // namespace

TEST_SUITE("slow_index") {

TEST_CASE("fixtures on E1") {
  SlowIndex s(e1());
  CHECK(s.check_invariants() == "");
  CHECK(as_set(s.query({4, 13})) == std::set<ColorId>{R, G, B});
  CHECK(as_set(s.query({1, 20})) == std::set<ColorId>{R, G, B});
  CHECK(s.query({7, 7}) == std::vector<ColorId>{G});
  CHECK(s.query({21, 30}).empty());
  CHECK(s.k_leftmost({4, 20}, 2) == std::vector<ColorId>{R, G});
  CHECK(s.k_leftmost({4, 20}, 99) == std::vector<ColorId>{R, G, B});
  CHECK(s.k_rightmost({4, 20}, 2) == std::vector<ColorId>{B, G});
  CHECK(s.k_leftmost({21, 30}, 3).empty());
  CHECK_THROWS_AS(s.query({5, 4}), Error);
}

TEST_CASE("a globally new color lands in the root's C set") {
  std::mt19937_64 rng(71);
  auto pts = random_instance(rng, 300, 10000, 4);
  SlowIndex s(pts);
  Value v = 1;
  while (s.contains(v)) ++v;
  s.insert({v, 99});
  CHECK(s.top_of(v) == s.root());
  CHECK(s.node(s.root()).v.count(v));
  CHECK(s.check_invariants() == "");
  // Deleting the color's only element leaves nothing to relocate.
  s.erase(v);
  CHECK_FALSE(s.contains(v));
  CHECK(s.check_invariants() == "");
}

TEST_CASE("inserting just left of a same-color element in its leaf hides that element") {
  std::vector<ColoredPoint> pts;
  for (Value v = 1; v <= 200; ++v) pts.push_back({v * 10, static_cast<ColorId>(v % 7)});
  pts.push_back({5000, 50});
  SlowIndex s(pts);
  REQUIRE(s.top_of(5000) != SlowIndex::kNone);
  s.insert({4999, 50});
  CHECK(s.top_of(5000) == SlowIndex::kNone);
  CHECK(s.prev_of(5000) == 4999);
  CHECK(s.next_of(4999) == 5000);
  Model m;
  for (auto& p : pts) m.pts[p.value] = p.color;
  m.pts[4999] = 50;
  CHECK(audit_c_sets(s, m) == "");
}

TEST_CASE("build shape") {
  for (std::size_t n : {16u, 256u, 4096u, 16384u}) {
    std::mt19937_64 rng(72 + n);
    SlowIndex s(random_instance(rng, n, 1u << 30, 16));
    CHECK(s.check_invariants() == "");
    double lln = std::log2(std::log2(static_cast<double>(n)));
    CHECK(s.height() <= lln + 2);
    for (NodeId u : s.live_nodes()) {
      const auto& node = s.node(u);
      if (node.is_leaf()) {
        CHECK(node.size <= 8);
        continue;
      }
      // Fanout law: about n^(1/2^(d+1)) children at depth d.
      double g = std::ceil(s.capacity(node.depth) / s.capacity(node.depth + 1));
      CHECK(node.children.size() >= std::floor(g / 2));
      CHECK(node.children.size() <= 2 * g);
    }
  }
}

TEST_CASE("exhaustive ranges on small instances") {
  std::mt19937_64 rng(73);
  for (int inst = 0; inst < 60; ++inst) {
    std::size_t n = 1 + rng() % 64;
    auto pts = inst % 2 ? random_instance(rng, n, 200, 1 + rng() % 8)
                        : skewed_instance(rng, n, 200, 8);
    SlowIndex s(pts);
    // Same set built one insertion at a time, in random order.
    SlowIndex d;
    auto order = pts;
    std::shuffle(order.begin(), order.end(), rng);
    for (auto& p : order) d.insert(p);
    REQUIRE(d.check_invariants() == "");
    QueryScratch sc;
    for (Value a = 1; a <= 200; ++a)
      for (Value b = a; b <= 200; ++b) {
        auto want = brute_colors(pts, a, b);
        auto got = s.query({a, b}, sc);
        REQUIRE(as_set(got) == want);
        REQUIRE(no_duplicates(sc.raw));
        REQUIRE(as_set(d.query({a, b})) == want);
      }
  }
}

TEST_CASE("randomized interleavings against a scan") {
  std::mt19937_64 rng(74);
  for (int inst = 0; inst < 6; ++inst) {
    Value universe = inst < 3 ? 3000 : 1u << 20;
    ColorId colors = inst % 3 == 0 ? 3 : inst % 3 == 1 ? 40 : 1000;
    auto pts = random_instance(rng, 400 + 300 * inst, universe, colors);
    SlowIndex s(pts);
    Model m;
    for (auto& p : pts) m.pts[p.value] = p.color;
    std::uniform_int_distribution<Value> vd(1, universe);
    std::uniform_int_distribution<ColorId> cd(0, colors - 1);
    for (int op = 0; op < 6000; ++op) {
      Value v = vd(rng);
      if (m.pts.count(v)) {
        s.erase(v);
        m.pts.erase(v);
      } else if (rng() % 3 != 0) {
        ColorId c = cd(rng);
        s.insert({v, c});
        m.pts[v] = c;
      }
      if (op % 100 == 0) {
        REQUIRE(s.check_invariants() == "");
        REQUIRE(audit_c_sets(s, m) == "");
      }
      Value a = vd(rng), b = vd(rng);
      if (a > b) std::swap(a, b);
      if (op % 4 == 0) b = std::min(universe, a + rng() % 50);
      QueryScratch sc;
      auto got = s.query({a, b}, sc);
      REQUIRE(as_set(got) == m.colors(a, b));
      REQUIRE(no_duplicates(sc.raw));
    }
    CHECK(s.size() == m.pts.size());
  }
}

TEST_CASE("splits and rebuilds keep C sets exact") {
  std::mt19937_64 rng(75);
  SlowIndex s;
  Model m;
  // Ascending inserts hammer the rightmost leaf and force splits.
  for (Value v = 1; v <= 3000; ++v) {
    ColorId c = static_cast<ColorId>(rng() % 20);
    s.insert({v * 3, c});
    m.pts[v * 3] = c;
    if (v % 250 == 0) REQUIRE(audit_c_sets(s, m) == "");
  }
  CHECK(s.split_count() > 0);
  CHECK(s.rebuild_count() > 0);
  CHECK(s.check_invariants() == "");
  std::vector<Value> vals;
  for (auto& [v, c] : m.pts) vals.push_back(v);
  std::shuffle(vals.begin(), vals.end(), rng);
  for (std::size_t i = 0; i < 2500; ++i) {
    s.erase(vals[i]);
    m.pts.erase(vals[i]);
    if (i % 250 == 0) REQUIRE(audit_c_sets(s, m) == "");
  }
  CHECK(s.check_invariants() == "");
  for (int q = 0; q < 2000; ++q) {
    Value a = 1 + rng() % 9000, b = a + rng() % 500;
    REQUIRE(as_set(s.query({a, b})) == m.colors(a, b));
  }
}

TEST_CASE("k-leftmost and k-rightmost, exhaustive on small instances") {
  std::mt19937_64 rng(76);
  for (int inst = 0; inst < 12; ++inst) {
    std::size_t n = 8 + rng() % 57;
    auto pts = random_instance(rng, n, 100, 2 + rng() % 10);
    SlowIndex s(pts);
    for (Value a = 1; a <= 100; a += 1 + rng() % 3)
      for (Value b = a; b <= 100; ++b)
        for (std::size_t k = 1; k <= 10; ++k) {
          REQUIRE(s.k_leftmost({a, b}, k) == brute_k_leftmost(pts, a, b, k));
          REQUIRE(s.k_rightmost({a, b}, k) == brute_k_rightmost(pts, a, b, k));
        }
  }
}

TEST_CASE("k-leftmost on a larger dynamic instance") {
  std::mt19937_64 rng(77);
  auto pts = random_instance(rng, 1 << 12, 1 << 20, 300);
  SlowIndex s(pts);
  std::uniform_int_distribution<Value> vd(1, 1 << 20);
  for (int i = 0; i < 500; ++i) {
    Value v = vd(rng);
    if (!s.contains(v)) {
      ColorId c = static_cast<ColorId>(rng() % 300);
      s.insert({v, c});
      pts.insert(std::lower_bound(pts.begin(), pts.end(), v,
                                  [](const ColoredPoint& p, Value x) { return p.value < x; }),
                 {v, c});
    }
  }
  for (int t = 0; t < 1000; ++t) {
    Value a = vd(rng), b = vd(rng);
    if (a > b) std::swap(a, b);
    std::size_t k = 1 + rng() % 40;
    REQUIRE(s.k_leftmost({a, b}, k) == brute_k_leftmost(pts, a, b, k));
    REQUIRE(s.k_rightmost({a, b}, k) == brute_k_rightmost(pts, a, b, k));
  }
}

TEST_CASE("query touches stay within the sqrt bound") {
  for (unsigned lg : {8u, 10u, 12u, 14u}) {
    std::size_t n = std::size_t{1} << lg;
    std::mt19937_64 rng(78 + lg);
    auto pts = random_instance(rng, n, Value{1} << 32, static_cast<ColorId>(n / 4));
    SlowIndex s(pts);
    auto vals = values_of(pts);
    double lln = std::log2(static_cast<double>(lg));
    for (int q = 0; q < 500; ++q) {
      std::size_t i = rng() % n, j = std::min(n - 1, i + rng() % (n / 4));
      Value a = vals[i], b = vals[j];
      QueryScratch sc;
      auto got = s.query({a, b}, sc);
      double nab = static_cast<double>(j - i + 1);
      CHECK(static_cast<double>(sc.meter.touches) <=
            16 * (std::sqrt(nab) + lln + static_cast<double>(got.size())));
    }
  }
}

}
