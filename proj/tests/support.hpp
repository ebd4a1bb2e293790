#pragma once

// Shared fixtures and brute-force references for the unit tests. Nothing
// here calls into the library's own oracles, so the tests check the library
// against independently written scans.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "crr/core.hpp"

namespace crr_test {

using crr::ColorId;
using crr::ColoredPoint;
using crr::Value;

inline constexpr ColorId R = 0, B = 1, G = 2;

inline std::vector<ColoredPoint> e1() {
  return {{1, R}, {3, B}, {5, R}, {7, G}, {9, B}, {12, R}, {15, G}, {20, B}};
}

/// Distinct colors in [a,b] by linear scan, as a sorted set.
inline std::set<ColorId> brute_colors(const std::vector<ColoredPoint>& pts, Value a, Value b) {
  std::set<ColorId> out;
  for (const auto& p : pts)
    if (a <= p.value && p.value <= b) out.insert(p.color);
  return out;
}

inline std::set<ColorId> as_set(const std::vector<ColorId>& v) { return {v.begin(), v.end()}; }

inline bool no_duplicates(std::vector<ColorId> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

/// Nearest earlier same-color value by a backward scan for every point.
inline std::vector<Value> brute_prev(const std::vector<ColoredPoint>& pts) {
  std::vector<Value> out(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i; j-- > 0;)
      if (pts[j].color == pts[i].color) {
        out[i] = pts[j].value;
        break;
      }
  return out;
}

/// First k distinct colors scanning [a,b] left to right.
inline std::vector<ColorId> brute_k_leftmost(const std::vector<ColoredPoint>& pts, Value a,
                                             Value b, std::size_t k) {
  std::vector<ColorId> out;
  for (const auto& p : pts) {
    if (out.size() >= k) break;
    if (p.value < a || p.value > b) continue;
    if (std::find(out.begin(), out.end(), p.color) == out.end()) out.push_back(p.color);
  }
  return out;
}

inline std::vector<ColorId> brute_k_rightmost(const std::vector<ColoredPoint>& pts, Value a,
                                              Value b, std::size_t k) {
  std::vector<ColorId> out;
  for (auto it = pts.rbegin(); it != pts.rend() && out.size() < k; ++it) {
    if (it->value < a || it->value > b) continue;
    if (std::find(out.begin(), out.end(), it->color) == out.end()) out.push_back(it->color);
  }
  return out;
}

/// n distinct values in [1, universe] with colors in [0, colors), sorted.
inline std::vector<ColoredPoint> random_instance(std::mt19937_64& rng, std::size_t n,
                                                 Value universe, ColorId colors) {
  std::set<Value> vals;
  std::uniform_int_distribution<Value> vd(1, universe);
  while (vals.size() < n) vals.insert(vd(rng));
  std::uniform_int_distribution<ColorId> cd(0, colors - 1);
  std::vector<ColoredPoint> out;
  for (Value v : vals) out.push_back({v, cd(rng)});
  return out;
}

/// Colors drawn so that a few colors dominate, which makes long lists and
/// fallback paths more likely than a uniform draw would.
inline std::vector<ColoredPoint> skewed_instance(std::mt19937_64& rng, std::size_t n,
                                                 Value universe, ColorId colors) {
  auto pts = random_instance(rng, n, universe, colors);
  std::geometric_distribution<ColorId> gd(0.3);
  for (auto& p : pts) p.color = std::min<ColorId>(gd(rng), colors - 1);
  return pts;
}

/// Mutable point set for dynamic tests, answered by scanning.
struct Model {
  std::map<Value, ColorId> pts;

  std::vector<ColoredPoint> sorted() const {
    std::vector<ColoredPoint> out;
    for (const auto& [v, c] : pts) out.push_back({v, c});
    return out;
  }
  std::set<ColorId> colors(Value a, Value b) const {
    std::set<ColorId> out;
    for (auto it = pts.lower_bound(a); it != pts.end() && it->first <= b; ++it)
      out.insert(it->second);
    return out;
  }
  std::size_t count_in(Value a, Value b) const {
    std::size_t n = 0;
    for (auto it = pts.lower_bound(a); it != pts.end() && it->first <= b; ++it) ++n;
    return n;
  }
};

}  // namespace crr_test
