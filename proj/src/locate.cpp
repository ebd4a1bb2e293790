#include "crr/locate.hpp"

#include <algorithm>

namespace crr {

std::optional<std::size_t> SortedArrayReporter::any_in(Value a, Value b, CostMeter* meter) const {
  std::size_t lo = 0, hi = keys_.size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (meter) ++meter->locate_ops;
    if (keys_[mid] < a)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < keys_.size() && keys_[lo] <= b) return lo;
  return std::nullopt;
}

namespace {

constexpr unsigned kBits = 64;

Value prefix_of(Value v, unsigned len) { return len == 0 ? 0 : v >> (kBits - len); }

}  // namespace

BitTrieReporter::BitTrieReporter(std::span<const Value> keys) : keys_(keys), levels_(kBits + 1) {
  for (std::uint32_t i = 0; i < keys.size(); ++i) {
    for (unsigned l = 0; l <= kBits; ++l) {
      auto [it, fresh] = levels_[l].try_emplace(prefix_of(keys[i], l), Span{i, i});
      if (!fresh) it->second.last = i;
    }
  }
}

std::optional<std::size_t> BitTrieReporter::successor(Value a, CostMeter* meter) const {
  if (keys_.empty()) return std::nullopt;
  unsigned lo = 0, hi = kBits;  // prefix of length lo is known to be present
  while (lo < hi) {
    unsigned mid = (lo + hi + 1) / 2;
    if (meter) ++meter->locate_ops;
    if (levels_[mid].count(prefix_of(a, mid)))
      lo = mid;
    else
      hi = mid - 1;
  }
  const Span& s = levels_[lo].at(prefix_of(a, lo));
  if (lo == kBits) return s.first;
  bool next_bit = (a >> (kBits - 1 - lo)) & 1;
  if (!next_bit) return s.first;
  std::size_t after = std::size_t{s.last} + 1;
  if (after < keys_.size()) return after;
  return std::nullopt;
}

std::optional<std::size_t> BitTrieReporter::any_in(Value a, Value b, CostMeter* meter) const {
  auto s = successor(a, meter);
  if (s && keys_[*s] <= b) return s;
  return std::nullopt;
}

std::unique_ptr<OneReporter> make_reporter(LocateBackend backend, std::span<const Value> keys) {
  if (backend == LocateBackend::BitTrie) return std::make_unique<BitTrieReporter>(keys);
  return std::make_unique<SortedArrayReporter>(keys);
}

}  // namespace crr
