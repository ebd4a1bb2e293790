#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "crr/core.hpp"
#include "crr/pst.hpp"

namespace crr {

struct StripePoint {
  Value x = 0;
  Value y = 0;

  friend bool operator==(const StripePoint&, const StripePoint&) = default;
};

/// Thresholds h_{r,s} written by a point of height h: for each base-tau
/// digit a_r of h and s = 1..a_r, the prefix of h above r plus s * tau^r.
std::vector<Value> update_thresholds(Value h, unsigned tau);

/// Probe thresholds f_0..f_g for a query of height c when the top height is
/// H = tau^g. Values above H are dropped and duplicates removed.
std::vector<Value> query_thresholds(Value c, unsigned tau, Value top);

/// Three-sided reporting [a,b] x [c,H] over points with heights in [1,H].
///
/// Points are kept in x-ordered groups of Theta(log N). For each group and
/// height h the tables gmin/gmax hold the extreme x among points whose
/// threshold set contains h. The per-height sets R_h index those extremes,
/// so one probe per f_j finds a representative of every group that meets
/// the query, and each group is then answered by its own small tree.
class Stripe {
 public:
  struct Params {
    unsigned tau = 2;
    Value top = 2;               // H, a power of tau
    std::size_t group_cap = 2;   // nominal group size; split at 2x, merge below x/2
  };

  /// tau = max(2, ceil(sqrt(log2 n))); H = the least power of tau that is
  /// at least max(log2 n, max_y).
  static Params params_for(std::size_t n, Value max_y = 0);

  struct QueryStats {
    std::size_t probes = 0;            // R_{f_j} lookups
    std::size_t groups_answered = 0;
    std::size_t max_group_visits = 0;  // over all groups, per query
    bool single_group = false;
  };

  struct GroupView {
    std::vector<StripePoint> points;  // ascending x
    std::vector<Value> gmin;          // index h in [1,H]; valid where has[h]
    std::vector<Value> gmax;
    std::vector<bool> has;
  };

  explicit Stripe(Params p);
  /// Bulk load from points sorted by distinct x, in groups of group_cap.
  Stripe(Params p, std::span<const StripePoint> sorted);

  /// Throws DuplicateX, or InvalidArgument when x is 0 or y is outside [1, H].
  void insert(Value x, Value y);
  /// Throws NotFound.
  void erase(Value x);
  bool contains(Value x) const { return all_.count(x) != 0; }

  /// Appends {p : a <= p.x <= b, p.y >= c}. Stops early once more than
  /// `limit` points were appended; returns false in that case.
  bool query(Value a, Value b, Value c, std::vector<StripePoint>& out, CostMeter* meter = nullptr,
             std::size_t limit = std::numeric_limits<std::size_t>::max(),
             QueryStats* stats = nullptr) const;

  std::size_t size() const noexcept { return all_.size(); }
  std::size_t group_count() const noexcept { return seps_.size(); }
  const Params& params() const noexcept { return params_; }
  std::vector<GroupView> group_views() const;
  std::vector<StripePoint> points() const;
  /// Tables exact, R_h consistent with them, group sizes in bounds.
  bool check_invariants() const;

 private:
  struct Group {
    std::map<Value, Value> pts;  // x -> y
    Pst tree;                    // (x, H - y)
    std::vector<Value> gmin, gmax;
    std::vector<std::uint32_t> cnt;
  };
  using Gid = std::uint32_t;

  Gid group_of(Value x) const;
  Gid new_group();
  void unlist(Gid g);    // drop every R_h entry of g
  void relist(Gid g);    // recompute g's tables and tree, re-add entries
  void set_extremes(Gid g, Value h, bool have, Value lo, Value hi);
  void rescan(Gid g, Value h);
  void split(Gid g);
  void merge_small(Gid g, Value x);  // x: any key in g's range

  Params params_;
  std::vector<Group> groups_;
  std::vector<Gid> free_;
  std::map<Value, Gid> seps_;  // group owns x in [sep, next sep)
  std::vector<std::multiset<std::pair<Value, Gid>>> r_;
  std::set<Value> all_;
  std::vector<std::vector<Value>> thresholds_;  // by height
};

}  // namespace crr
