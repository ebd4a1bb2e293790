#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace crr {

using Value = std::uint64_t;
using ColorId = std::uint32_t;

/// prev-link sentinel: no earlier element of the same color.
inline constexpr Value kNoPrev = 0;

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidRange,
  DuplicateCoordinate,
  DuplicateX,
  NotFound,
  Io,
  Format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ColoredPoint {
  Value value = 0;
  ColorId color = 0;

  friend bool operator==(const ColoredPoint&, const ColoredPoint&) = default;
};

/// Closed interval [a, b]; a > b is rejected at construction.
class Range {
 public:
  Range(Value a, Value b);
  Value a() const noexcept { return a_; }
  Value b() const noexcept { return b_; }
  bool contains(Value v) const noexcept { return a_ <= v && v <= b_; }

 private:
  Value a_;
  Value b_;
};

/// Stored values are at least 1, so [0,b] asks the same as [1,b]. Rewrites q
/// accordingly and returns false when no stored value can match.
inline bool clamp_to_values(Range& q) {
  if (q.b() == 0) return false;
  if (q.a() == 0) q = Range(1, q.b());
  return true;
}

/// Bijection between external color labels and dense ids [0, C).
class ColorRemap {
 public:
  /// Returns the id of `label`, registering it if unseen.
  ColorId intern(const std::string& label);
  /// Returns the id of `label` or throws NotFound.
  ColorId id_of(const std::string& label) const;
  bool contains(const std::string& label) const { return forward_.count(label) != 0; }
  const std::string& label(ColorId id) const { return reverse_.at(id); }
  std::size_t size() const noexcept { return reverse_.size(); }
  const std::vector<std::string>& labels() const noexcept { return reverse_; }

 private:
  std::unordered_map<std::string, ColorId> forward_;
  std::vector<std::string> reverse_;
};

/// Per-query instrumentation. Counters only grow during a query; callers
/// reset between queries.
struct CostMeter {
  std::uint64_t touches = 0;      // elements/nodes examined while reporting
  std::uint64_t locate_ops = 0;   // predecessor search and navigation steps
  std::uint64_t block_reads = 0;  // block transfers while reporting (EM)
  std::uint64_t locate_reads = 0; // block transfers while locating (EM)

  void reset() noexcept { *this = CostMeter{}; }
};

struct LabeledPoint {
  Value value;
  std::string label;
};

struct NormalizedInput {
  std::vector<ColoredPoint> points;  // ascending by value
  ColorRemap remap;
};

/// Sorts by value and remaps labels densely in first-occurrence (input)
/// order. Throws DuplicateCoordinate, or InvalidArgument for value 0.
NormalizedInput normalize_input(std::span<const LabeledPoint> points);

/// prev(e) for each point of a sorted, duplicate-free list.
std::vector<Value> compute_prev(std::span<const ColoredPoint> sorted);

/// Brute-force reference answers.
std::vector<ColorId> oracle_report(std::span<const ColoredPoint> points, Range q);
std::vector<ColorId> oracle_k_leftmost(std::span<const ColoredPoint> points, Range q,
                                       std::size_t k);
std::vector<ColorId> oracle_k_rightmost(std::span<const ColoredPoint> points, Range q,
                                        std::size_t k);

/// One flag per color plus the list of set flags, so clearing costs
/// O(answer) rather than O(C).
class ColArray {
 public:
  ColArray() = default;
  explicit ColArray(std::size_t colors) : seen_(colors, 0) {}

  void ensure(std::size_t colors) {
    if (seen_.size() < colors) seen_.resize(colors, 0);
  }
  /// True the first time `c` is marked since the last clear().
  bool mark(ColorId c) {
    if (c >= seen_.size()) seen_.resize(std::size_t{c} + 1, 0);
    if (seen_[c]) return false;
    seen_[c] = 1;
    touched_.push_back(c);
    return true;
  }
  void clear() {
    for (ColorId c : touched_) seen_[c] = 0;
    touched_.clear();
  }
  bool all_clear() const;

 private:
  std::vector<std::uint8_t> seen_;
  std::vector<ColorId> touched_;
};

/// Keeps the first occurrence of every color, preserving order. `col` is
/// left all-zero on return.
std::vector<ColorId> dedup(std::span<const ColorId> colors, ColArray& col);

/// Dataset CSV: `value,color_label` per line; blank lines and `#` comments
/// are skipped.
std::vector<LabeledPoint> read_dataset(std::istream& in);
std::vector<LabeledPoint> read_dataset_file(const std::string& path);
void write_dataset(std::ostream& out, std::span<const LabeledPoint> points);

/// ceil(log2(max(n, 2))).
unsigned ceil_log2(std::uint64_t n);

}  // namespace crr
