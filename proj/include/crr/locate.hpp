#pragma once

#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "crr/core.hpp"

namespace crr {

/// One-reporting over a static sorted key array: returns the index of some
/// key in [a, b], or nothing when the range is empty.
class OneReporter {
 public:
  virtual ~OneReporter() = default;
  virtual std::optional<std::size_t> any_in(Value a, Value b, CostMeter* meter) const = 0;
};

enum class LocateBackend { SortedArray, BitTrie };

/// Binary search over the key array.
class SortedArrayReporter final : public OneReporter {
 public:
  explicit SortedArrayReporter(std::span<const Value> keys) : keys_(keys) {}
  std::optional<std::size_t> any_in(Value a, Value b, CostMeter* meter) const override;

 private:
  std::span<const Value> keys_;
};

/// Bitwise trie with one hash table per prefix length (x-fast layout). The
/// successor of `a` is found by binary search over prefix lengths, so a
/// lookup costs O(log w) hash probes regardless of N.
class BitTrieReporter final : public OneReporter {
 public:
  explicit BitTrieReporter(std::span<const Value> keys);
  std::optional<std::size_t> any_in(Value a, Value b, CostMeter* meter) const override;
  std::optional<std::size_t> successor(Value a, CostMeter* meter) const;

 private:
  struct Span {
    std::uint32_t first;
    std::uint32_t last;
  };
  std::span<const Value> keys_;
  // levels_[l] maps the top-l-bit prefix to the index span holding it.
  std::vector<std::unordered_map<Value, Span>> levels_;
};

std::unique_ptr<OneReporter> make_reporter(LocateBackend backend, std::span<const Value> keys);

}  // namespace crr
