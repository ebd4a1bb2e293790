#include "crr/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace crr {

Range::Range(Value a, Value b) : a_(a), b_(b) {
  if (a > b)
    throw Error(ErrorCode::InvalidRange,
                "invalid range [" + std::to_string(a) + "," + std::to_string(b) + "]");
}

ColorId ColorRemap::intern(const std::string& label) {
  auto [it, inserted] = forward_.try_emplace(label, static_cast<ColorId>(reverse_.size()));
  if (inserted) reverse_.push_back(label);
  return it->second;
}

ColorId ColorRemap::id_of(const std::string& label) const {
  auto it = forward_.find(label);
  if (it == forward_.end()) throw Error(ErrorCode::NotFound, "unknown color label '" + label + "'");
  return it->second;
}

NormalizedInput normalize_input(std::span<const LabeledPoint> points) {
  NormalizedInput out;
  out.points.reserve(points.size());
  for (const auto& p : points) {
    if (p.value == kNoPrev)
      throw Error(ErrorCode::InvalidArgument, "coordinate 0 is reserved");
    out.points.push_back({p.value, out.remap.intern(p.label)});
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const ColoredPoint& x, const ColoredPoint& y) { return x.value < y.value; });
  auto dup = std::adjacent_find(out.points.begin(), out.points.end(),
                                [](const ColoredPoint& x, const ColoredPoint& y) {
                                  return x.value == y.value;
                                });
  if (dup != out.points.end())
    throw Error(ErrorCode::DuplicateCoordinate,
                "duplicate coordinate " + std::to_string(dup->value));
  return out;
}

std::vector<Value> compute_prev(std::span<const ColoredPoint> sorted) {
  std::vector<Value> prev(sorted.size(), kNoPrev);
  std::unordered_map<ColorId, Value> last;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto [it, fresh] = last.try_emplace(sorted[i].color, sorted[i].value);
    if (!fresh) {
      prev[i] = it->second;
      it->second = sorted[i].value;
    }
  }
  return prev;
}

std::vector<ColorId> oracle_report(std::span<const ColoredPoint> points, Range q) {
  std::vector<ColorId> out;
  std::unordered_set<ColorId> seen;
  for (const auto& p : points)
    if (q.contains(p.value) && seen.insert(p.color).second) out.push_back(p.color);
  return out;
}

std::vector<ColorId> oracle_k_leftmost(std::span<const ColoredPoint> points, Range q,
                                       std::size_t k) {
  std::vector<ColoredPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.value < y.value; });
  std::vector<ColorId> out;
  std::unordered_set<ColorId> seen;
  for (const auto& p : sorted) {
    if (out.size() >= k) break;
    if (q.contains(p.value) && seen.insert(p.color).second) out.push_back(p.color);
  }
  return out;
}

std::vector<ColorId> oracle_k_rightmost(std::span<const ColoredPoint> points, Range q,
                                        std::size_t k) {
  std::vector<ColoredPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.value > y.value; });
  std::vector<ColorId> out;
  std::unordered_set<ColorId> seen;
  for (const auto& p : sorted) {
    if (out.size() >= k) break;
    if (q.contains(p.value) && seen.insert(p.color).second) out.push_back(p.color);
  }
  return out;
}

bool ColArray::all_clear() const {
  return touched_.empty() && std::all_of(seen_.begin(), seen_.end(), [](auto f) { return f == 0; });
}

std::vector<ColorId> dedup(std::span<const ColorId> colors, ColArray& col) {
  std::vector<ColorId> out;
  out.reserve(colors.size());
  for (ColorId c : colors)
    if (col.mark(c)) out.push_back(c);
  col.clear();
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<LabeledPoint> read_dataset(std::istream& in) {
  std::vector<LabeledPoint> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto comma = s.find(',');
    if (comma == std::string_view::npos)
      throw Error(ErrorCode::Format, "line " + std::to_string(lineno) + ": expected value,color");
    std::string_view num = trim(s.substr(0, comma));
    std::string_view label = trim(s.substr(comma + 1));
    Value v = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc{} || ptr != num.data() + num.size() || label.empty())
      throw Error(ErrorCode::Format, "line " + std::to_string(lineno) + ": malformed record");
    out.push_back({v, std::string(label)});
  }
  return out;
}

std::vector<LabeledPoint> read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_dataset(in);
}

void write_dataset(std::ostream& out, std::span<const LabeledPoint> points) {
  for (const auto& p : points) out << p.value << ',' << p.label << '\n';
}

unsigned ceil_log2(std::uint64_t n) {
  if (n < 2) n = 2;
  unsigned r = 0;
  while ((std::uint64_t{1} << r) < n && r < 64) ++r;
  return r;
}

}  // namespace crr
