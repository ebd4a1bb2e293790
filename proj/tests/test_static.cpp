#include "crr/static_index.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crr;
using namespace crr_test;

namespace {

std::int32_t brute_lca(const StaticIndex& ix, std::int32_t u, std::int32_t v) {
  std::set<std::int32_t> up;
  for (auto w = u; w != StaticIndex::kNone; w = ix.node(w).parent) up.insert(w);
  for (auto w = v; w != StaticIndex::kNone; w = ix.node(w).parent)
    if (up.count(w)) return w;
  return StaticIndex::kNone;
}

// Leaves of the first and last points in [a,b]; the range must be non-empty.
std::pair<std::size_t, std::size_t> end_leaves(const StaticIndex& ix, Value a, Value b) {
  auto pts = ix.points();
  std::size_t first = pts.size(), last = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (a <= pts[i].value && pts[i].value <= b) {
      first = std::min(first, i);
      last = i;
    }
  return {ix.leaf_of_point(first), ix.leaf_of_point(last)};
}

void check_structure(const StaticIndex& ix) {
  for (std::size_t l = 0; l < ix.leaf_count(); ++l) {
    auto k1 = ix.k1(l);
    auto k2 = ix.k2(l);
    for (std::size_t i = 1; i < k1.size(); ++i) REQUIRE(k1[i - 1].m < k1[i].m);
    for (std::size_t i = 1; i < k2.size(); ++i) REQUIRE(k2[i - 1].m > k2[i].m);
  }
  auto pts = ix.points();
  for (std::size_t id = 0; id < ix.node_count(); ++id) {
    const auto& n = ix.node(static_cast<std::int32_t>(id));
    if (n.leaf == StaticIndex::kNone) {
      REQUIRE(n.left != StaticIndex::kNone);
      REQUIRE(n.right != StaticIndex::kNone);
      REQUIRE(n.m == pts[ix.node(n.right).first].value);
    }
    if (n.parent == StaticIndex::kNone) {
      REQUIRE(n.list_len == 0);
      continue;
    }
    // Lists hold the color extremes of S(u), capped and ordered.
    std::vector<ColoredPoint> want;
    std::set<ColorId> seen;
    bool right = ix.is_right_child(static_cast<std::int32_t>(id));
    for (std::size_t k = 0; k < n.last - n.first && want.size() < ix.list_cap(); ++k) {
      std::size_t i = right ? n.first + k : n.last - 1 - k;
      if (seen.insert(pts[i].color).second) want.push_back(pts[i]);
    }
    auto got = ix.list(static_cast<std::int32_t>(id));
    REQUIRE(std::vector<ColoredPoint>(got.begin(), got.end()) == want);
  }
}

}  // namespace

TEST_SUITE("static_index") {

TEST_CASE("build on E1") {
  StaticIndex ix(e1());
  CHECK(ix.leaf_capacity() == 3);
  REQUIRE(ix.leaf_count() == 3);
  auto size_of = [&](std::size_t l) {
    const auto& n = ix.node(ix.leaf_node(l));
    return n.last - n.first;
  };
  CHECK(size_of(0) == 3);
  CHECK(size_of(1) == 3);
  CHECK(size_of(2) == 2);
  const auto& root = ix.node(ix.root());
  CHECK(root.m == ix.points()[ix.node(root.right).first].value);
  CHECK(root.m == 7);
  check_structure(ix);
}

TEST_CASE("tiny and empty indexes") {
  StaticIndex one(std::vector<ColoredPoint>{{4, 0}});
  CHECK(one.leaf_count() == 1);
  CHECK(one.node(one.root()).leaf == 0);
  CHECK(one.query({1, 10}) == std::vector<ColorId>{0});
  CHECK(one.query({5, 10}).empty());

  StaticIndex none(std::vector<ColoredPoint>{});
  CHECK(none.query({1, 100}).empty());
  CHECK_FALSE(none.one_report({1, 100}).has_value());

  StaticIndex two(std::vector<ColoredPoint>{{1, 0}, {2, 1}});
  CHECK(two.leaf_count() == 2);
  CHECK(as_set(two.query({1, 2})) == std::set<ColorId>{0, 1});
}

TEST_CASE("one_report fixtures") {
  StaticIndex ix(e1());
  auto hit = ix.one_report({4, 13});
  REQUIRE(hit.has_value());
  Value v = ix.points()[*hit].value;
  CHECK((v == 5 || v == 7 || v == 9 || v == 12));
  CHECK_FALSE(ix.one_report({8, 8}).has_value());
  auto exact = ix.one_report({1, 1});
  REQUIRE(exact.has_value());
  CHECK(ix.points()[*exact].value == 1);
}

TEST_CASE("hra_query on E1 is the lowest common ancestor of the end leaves") {
  StaticIndex ix(e1());
  auto hit = ix.one_report({4, 13});
  auto u = ix.hra_query(ix.leaf_of_point(*hit), {4, 13});
  auto [la, lb] = end_leaves(ix, 4, 13);
  CHECK(u == brute_lca(ix, ix.leaf_node(la), ix.leaf_node(lb)));
  CHECK(u == ix.root());
  // [1,3] lies in the first leaf.
  CHECK(ix.hra_query(0, {1, 3}) == StaticIndex::kNone);
}

TEST_CASE("query fixtures on E1") {
  StaticIndex ix(e1());
  CHECK(as_set(ix.query({4, 13})) == std::set<ColorId>{0, 1, 2});
  CHECK(ix.query({4, 13}).size() == 3);
  CHECK(ix.query({6, 6}).empty());
  CHECK(as_set(ix.query({1, 20})) == std::set<ColorId>{0, 1, 2});
  QueryScratch s;
  auto got = ix.query({4, 13}, s);
  CHECK(got.size() == brute_colors(e1(), 4, 13).size());
  CHECK(s.col.all_clear());
  CHECK_THROWS_AS(ix.query({5, 4}), Error);
}

TEST_CASE("exhaustive ranges on small instances, both locate backends") {
  std::mt19937_64 rng(41);
  for (int inst = 0; inst < 120; ++inst) {
    std::size_t n = rng() % 65;
    auto pts = inst % 3 ? random_instance(rng, n, 256, 1 + rng() % 8)
                        : skewed_instance(rng, n, 256, 8);
    auto backend = inst % 2 ? LocateBackend::BitTrie : LocateBackend::SortedArray;
    StaticIndex ix(pts, backend);
    check_structure(ix);
    QueryScratch s;
    for (Value a = 1; a <= 256; ++a)
      for (Value b = a; b <= 256; b += 1 + (b % 3)) {
        auto got = ix.query({a, b}, s);
        REQUIRE(no_duplicates(got));
        REQUIRE(as_set(got) == brute_colors(pts, a, b));
      }
  }
}

TEST_CASE("structural facts hold on random queries") {
  std::mt19937_64 rng(42);
  for (int inst = 0; inst < 20; ++inst) {
    std::size_t n = 100 + rng() % 3000;
    auto pts = random_instance(rng, n, 50000, 1 + rng() % 40);
    StaticIndex ix(pts);
    check_structure(ix);
    std::uniform_int_distribution<Value> d(1, 50000);
    for (int q = 0; q < 300; ++q) {
      Value a = d(rng), b = d(rng);
      if (a > b) std::swap(a, b);
      auto hit = ix.one_report({a, b});
      if (!hit) {
        CHECK(brute_colors(pts, a, b).empty());
        continue;
      }
      std::size_t leaf = ix.leaf_of_point(*hit);
      // Every left parent has m > a and every right parent m <= b.
      for (const auto& e : ix.k1(leaf)) CHECK(e.m > a);
      for (const auto& e : ix.k2(leaf)) CHECK(e.m <= b);
      auto u = ix.hra_query(leaf, {a, b});
      auto [la, lb] = end_leaves(ix, a, b);
      auto w = brute_lca(ix, ix.leaf_node(la), ix.leaf_node(lb));
      if (u == StaticIndex::kNone) {
        CHECK(la == lb);
      } else if (u != w) {
        // The only way past the common ancestor: the smallest element in the
        // range is m(u) itself, so the whole range sits below u's right child.
        auto smallest = ix.points()[ix.node(ix.leaf_node(la)).first].value;
        CHECK(ix.node(u).m == smallest);
        CHECK(a <= smallest);
        CHECK(brute_lca(ix, w, ix.node(u).right) == ix.node(u).right);
      }
      CHECK(as_set(ix.query({a, b})) == brute_colors(pts, a, b));
    }
  }
}

TEST_CASE("reporting touches stay within the output bound") {
  std::mt19937_64 rng(43);
  for (std::size_t n : {256u, 2048u, 16384u}) {
    auto pts = random_instance(rng, n, 1u << 24, static_cast<ColorId>(1 + n / 8));
    StaticIndex ix(pts);
    Value logn = ceil_log2(n);
    QueryScratch s;
    for (int q = 0; q < 500; ++q) {
      Value a = 1 + rng() % (1u << 24), b = a + rng() % (1u << (4 + q % 18));
      s.meter.reset();
      auto got = ix.query({a, b}, s);
      std::uint64_t k = got.size();
      CHECK(s.meter.touches <= 8 * (k + 1) + 4 * logn);
      if (s.fallback) CHECK(k >= logn);
    }
  }
}

TEST_CASE("total list storage is linear") {
  std::mt19937_64 rng(44);
  auto pts = random_instance(rng, 8192, 1u << 30, 4000);
  StaticIndex ix(pts);
  CHECK(ix.total_list_entries() <= 2 * pts.size());
}

}
