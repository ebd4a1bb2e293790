#include "crr/em_static.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>

#include "crr/pst.hpp"

namespace crr {

namespace {

using Record = BlockStore::Record;
constexpr std::size_t kDirFields = 14;
constexpr char kMagic[4] = {'C', 'R', 'R', '1'};

std::size_t em_capacity(std::size_t n, std::size_t b) {
  std::size_t t = 1;
  for (unsigned __int128 p = b; p < n; p *= b) ++t;
  return b * t;
}

std::size_t bucket_node_size(std::size_t block) { return std::max<std::size_t>(block, 4); }

// Priority search tree whose nodes are buckets. A node keeps the lowest-y
// points of its subtree (up to node size minus two), splits the rest by x
// at the median, and records the smallest y of each child. Node i occupies
// records [base + i * S, base + (i + 1) * S), S = bucket_node_size(block):
//   r0 = (split, (left + 1) << 32 | (right + 1), bucket count)
//   r1 = (left child min y, right child min y, 0), absent child = UINT64_MAX
//   r2.. = (x, y, color) sorted by x
class BucketTreeBuilder {
 public:
  explicit BucketTreeBuilder(std::size_t block) : size_(bucket_node_size(block)), cap_(size_ - 2) {}

  std::vector<Record> build(std::vector<PstPoint> pts, std::uint64_t& root_y) {
    std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.x < r.x; });
    recs_.clear();
    root_y = pts.empty() ? kAbsent : make(pts);
    return std::move(recs_);
  }

 private:
  static constexpr std::uint64_t kAbsent = UINT64_MAX;

  static bool lower(const PstPoint& l, const PstPoint& r) {
    return l.y != r.y ? l.y < r.y : l.x < r.x;
  }

  // Builds the subtree of `pts` (sorted by x) and returns its smallest y.
  std::uint64_t make(const std::vector<PstPoint>& pts) {
    std::size_t id = recs_.size() / size_;
    recs_.resize(recs_.size() + size_, Record{0, 0, 0});
    std::vector<PstPoint> bucket, rest;
    if (pts.size() <= cap_) {
      bucket = pts;
    } else {
      std::vector<PstPoint> by_y = pts;
      std::nth_element(by_y.begin(), by_y.begin() + static_cast<std::ptrdiff_t>(cap_ - 1), by_y.end(), lower);
      PstPoint kth = by_y[cap_ - 1];
      for (const auto& p : pts) (lower(kth, p) ? rest : bucket).push_back(p);
    }
    std::uint64_t min_y = kAbsent;
    for (const auto& p : bucket) min_y = std::min(min_y, p.y);

    std::uint64_t split = 0, links = 0, left_y = kAbsent, right_y = kAbsent;
    if (!rest.empty()) {
      std::size_t mid = (rest.size() + 1) / 2;
      split = rest[mid - 1].x;
      std::vector<PstPoint> right(rest.begin() + static_cast<std::ptrdiff_t>(mid), rest.end());
      rest.resize(mid);
      std::uint64_t left_id = recs_.size() / size_ + 1;
      left_y = make(rest);
      links = left_id << 32;
      if (!right.empty()) {
        links |= recs_.size() / size_ + 1;
        right_y = make(right);
      }
    }
    std::size_t r = id * size_;
    recs_[r] = {split, links, bucket.size()};
    recs_[r + 1] = {left_y, right_y, 0};
    for (std::size_t j = 0; j < bucket.size(); ++j) recs_[r + 2 + j] = {bucket[j].x, bucket[j].y, bucket[j].tag};
    return min_y;
  }

  std::size_t size_, cap_;
  std::vector<Record> recs_;
};

std::vector<Record> layout_pst(std::vector<PstPoint> pts, std::size_t block, std::uint64_t& root_y) {
  return BucketTreeBuilder(block).build(std::move(pts), root_y);
}

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes))
    throw Error(ErrorCode::Format, "truncated index file");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

}  // namespace

std::size_t BlockStore::append_region(std::span<const Record> recs) {
  pad();
  std::size_t start = records_.size();
  records_.insert(records_.end(), recs.begin(), recs.end());
  pad();
  return start;
}

void BlockStore::pad() {
  while (records_.size() % block_size_) records_.push_back(Record{0, 0, 0});
}

BlockReader::BlockReader(const BlockStore& store, CostMeter& meter, std::size_t cache_blocks)
    : store_(store), meter_(meter), cache_blocks_(cache_blocks) {}

const BlockStore::Record& BlockReader::get(std::size_t i) {
  if (i >= store_.record_count()) throw Error(ErrorCode::Format, "record index out of range");
  std::size_t blk = i / store_.block_size();
  if (blk != buffered_) {
    auto it = cached_.find(blk);
    if (it != cached_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
    } else {
      ++(locating_ ? meter_.locate_reads : meter_.block_reads);
      if (cache_blocks_ > 0) {
        lru_.push_front(blk);
        cached_[blk] = lru_.begin();
        if (lru_.size() > cache_blocks_) {
          cached_.erase(lru_.back());
          lru_.pop_back();
        }
      }
    }
    buffered_ = blk;
  }
  return store_.record(i);
}

EmIndex::EmIndex(std::span<const ColoredPoint> sorted, std::size_t block_size)
    : store_(block_size) {
  if (block_size < 2) throw Error(ErrorCode::InvalidArgument, "block size must be at least 2");
  n_ = sorted.size();
  cap_ = em_capacity(std::max<std::size_t>(n_, 2), block_size);
  {
    std::set<ColorId> distinct;
    for (const auto& p : sorted) distinct.insert(p.color);
    colors_ = distinct.size();
  }

  Directory d;
  d.n = n_;
  d.colors = colors_;
  d.cap = cap_;
  std::vector<Record> dir_recs((kDirFields + 2) / 3, Record{0, 0, 0});
  store_.append_region(dir_recs);

  auto prev = compute_prev(sorted);
  std::vector<Record> vals(n_);
  for (std::size_t i = 0; i < n_; ++i) vals[i] = {sorted[i].value, prev[i], sorted[i].color};
  d.values = store_.append_region(vals);

  if (n_ > 0) {
    StaticIndex st(sorted, LocateBackend::SortedArray, cap_);
    auto prev_of = [&](Value v) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), v,
                                 [](const ColoredPoint& p, Value x) { return p.value < x; });
      return prev[static_cast<std::size_t>(it - sorted.begin())];
    };

    store_.pad();
    d.lists = store_.record_count();
    std::vector<std::uint64_t> list_at(st.node_count(), 0);
    for (std::size_t id = 0; id < st.node_count(); ++id) {
      auto lst = st.list(static_cast<std::int32_t>(id));
      if (lst.empty()) continue;
      std::vector<Record> recs;
      recs.reserve(lst.size());
      for (const auto& p : lst) recs.push_back({p.value, prev_of(p.value), p.color});
      list_at[id] = store_.append_region(recs);
    }

    std::vector<Record> nodes(st.node_count());
    for (std::size_t id = 0; id < st.node_count(); ++id) {
      const auto& n = st.node(static_cast<std::int32_t>(id));
      std::uint64_t kids = (static_cast<std::uint64_t>(n.left + 1) << 32) |
                           static_cast<std::uint32_t>(n.right + 1);
      nodes[id] = {list_at[id], n.list_len, kids};
    }
    d.nodes = st.node_count();
    d.root = static_cast<std::uint64_t>(st.root());
    d.node_recs = store_.append_region(nodes);

    leaves_ = st.leaf_count();
    std::vector<Record> kpool;
    std::vector<Record> leaf_dir(2 * leaves_);
    std::vector<std::pair<std::size_t, std::size_t>> k_at(leaves_);
    for (std::size_t l = 0; l < leaves_; ++l) {
      k_at[l].first = kpool.size();
      for (const auto& e : st.k1(l))
        kpool.push_back({e.m, static_cast<std::uint64_t>(e.node), st.node(e.node).depth});
      for (const auto& e : st.k2(l))
        kpool.push_back({e.m, static_cast<std::uint64_t>(e.node), st.node(e.node).depth});
    }
    d.kpool = store_.append_region(kpool);

    for (std::size_t l = 0; l < leaves_; ++l) {
      std::size_t first = st.leaf_begin(l);
      std::size_t last = std::min(n_, first + cap_);
      std::vector<PstPoint> pts;
      for (std::size_t i = first; i < last; ++i) pts.push_back({sorted[i].value, prev[i], sorted[i].color});
      std::uint64_t root_y = 0;
      auto recs = layout_pst(std::move(pts), block_size, root_y);
      std::size_t base = store_.append_region(recs);
      leaf_dir[2 * l] = {d.kpool + k_at[l].first, st.k1(l).size(), st.k2(l).size()};
      leaf_dir[2 * l + 1] = {base, last - first, root_y};
    }
    d.leaves = leaves_;
    d.leaf_dir = store_.append_region(leaf_dir);

    auto global = layout_pst(reduction_points(sorted), block_size, d.global_root_y);
    d.global_nodes = n_;
    d.global_pst = store_.append_region(global);
  }

  std::uint64_t fields[kDirFields] = {d.n,        d.colors,   d.cap,   d.leaves,     d.nodes,
                                      d.root,     d.values,   d.node_recs, d.leaf_dir, d.kpool,
                                      d.lists,    d.global_pst, d.global_nodes, d.global_root_y};
  for (std::size_t i = 0; i < kDirFields; ++i) store_.mutable_record(i / 3)[i % 3] = fields[i];
  dir_ = d;
}

void EmIndex::read_directory() {
  if (store_.record_count() < (kDirFields + 2) / 3) throw Error(ErrorCode::Format, "missing directory");
  std::uint64_t f[kDirFields];
  for (std::size_t i = 0; i < kDirFields; ++i) f[i] = store_.record(i / 3)[i % 3];
  Directory d{f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9], f[10], f[11], f[12], f[13]};
  std::uint64_t total = store_.record_count();
  auto within = [&](std::uint64_t start, std::uint64_t len) {
    return start <= total && len <= total - start;
  };
  std::uint64_t b = store_.block_size();
  bool ok = d.cap == em_capacity(std::max<std::uint64_t>(d.n, 2), b) && within(d.values, d.n);
  if (ok && d.n > 0) {
    ok = d.leaves == (d.n + d.cap - 1) / d.cap && d.root < d.nodes && within(d.node_recs, d.nodes) &&
         within(d.leaf_dir, 2 * d.leaves) && d.global_nodes == d.n && d.global_pst < total &&
         d.kpool <= total && d.lists <= total;
  }
  if (!ok) throw Error(ErrorCode::Format, "inconsistent directory");
  dir_ = d;
  n_ = d.n;
  colors_ = d.colors;
  cap_ = d.cap;
  leaves_ = d.leaves;
}

std::size_t EmIndex::pst_node_record(std::size_t base, std::size_t i) const {
  return base + i * bucket_node_size(store_.block_size());
}

void EmIndex::pst_query(BlockReader& rd, std::size_t base, std::size_t count, std::uint64_t root_y,
                        Range q, std::vector<ColorId>& out) const {
  if (count == 0 || root_y >= q.a()) return;
  std::vector<std::size_t> pending{0};
  while (!pending.empty()) {
    std::size_t r = pst_node_record(base, pending.back());
    pending.pop_back();
    Record head = rd.get(r);
    Record kids = rd.get(r + 1);
    for (std::uint64_t j = 0; j < head[2]; ++j) {
      Record p = rd.get(r + 2 + j);
      if (q.contains(p[0]) && p[1] < q.a()) out.push_back(static_cast<ColorId>(p[2]));
    }
    std::uint64_t left = head[1] >> 32, right = head[1] & 0xffffffffu;
    if (right && kids[1] < q.a() && q.b() > head[0]) pending.push_back(right - 1);
    if (left && kids[0] < q.a() && q.a() <= head[0]) pending.push_back(left - 1);
  }
}

void EmIndex::scan_values(BlockReader& rd, std::size_t from, std::size_t to, Range q, QueryScratch& s) const {
  for (std::size_t i = from; i < to; ++i) {
    Record e = rd.get(dir_.values + i);
    ++s.meter.touches;
    if (e[1] < q.a()) s.raw.push_back(static_cast<ColorId>(e[2]));
  }
}

std::vector<ColorId> EmIndex::query(Range q, QueryScratch& s) const {
  s.raw.clear();
  s.fallback = false;
  if (n_ == 0 || !clamp_to_values(q)) return {};
  BlockReader rd(store_, s.meter, cache_blocks_);
  rd.set_locating(true);

  std::size_t lo = 0, hi = n_;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    ++s.meter.locate_ops;
    if (rd.get(dir_.values + mid)[0] < q.a())
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == n_ || rd.get(dir_.values + lo)[0] > q.b()) return {};
  std::size_t leaf = lo / cap_;

  Record ld = rd.get(dir_.leaf_dir + 2 * leaf);
  auto prefix_end = [&](std::size_t start, std::size_t len, auto pred) {
    std::size_t l = 0, h = len;
    while (l < h) {
      std::size_t mid = l + (h - l) / 2;
      ++s.meter.locate_ops;
      if (pred(rd.get(start + mid)[0]))
        l = mid + 1;
      else
        h = mid;
    }
    return l;
  };
  std::size_t k1_len = ld[1], k2_len = ld[2];
  std::size_t e1 = prefix_end(ld[0], k1_len, [&](Value m) { return m <= q.b(); });
  std::size_t e2 = prefix_end(ld[0] + k1_len, k2_len, [&](Value m) { return m > q.a(); });
  std::uint64_t u = UINT64_MAX, depth = UINT64_MAX;
  if (e1 > 0) {
    Record k = rd.get(ld[0] + e1 - 1);
    u = k[1];
    depth = k[2];
  }
  if (e2 > 0) {
    Record k = rd.get(ld[0] + k1_len + e2 - 1);
    if (k[2] < depth) u = k[1];
  }

  if (u == UINT64_MAX) {
    // The range stays inside one leaf. Short stretches of the values region
    // are cheaper to scan than the leaf tree is to walk.
    std::size_t end = lo + prefix_end(dir_.values + lo, std::min(n_, (leaf + 1) * cap_) - lo,
                                      [&](Value v) { return v <= q.b(); });
    std::size_t b = store_.block_size();
    if ((dir_.values + end - 1) / b - (dir_.values + lo) / b < 2) {
      rd.set_locating(false);
      scan_values(rd, lo, end, q, s);
      return s.raw;
    }
    Record lp = rd.get(dir_.leaf_dir + 2 * leaf + 1);
    rd.set_locating(false);
    pst_query(rd, lp[0], lp[1], lp[2], q, s.raw);
    return s.raw;
  }

  Record un = rd.get(dir_.node_recs + u);
  Record left = rd.get(dir_.node_recs + (un[2] >> 32) - 1);
  Record right = rd.get(dir_.node_recs + (un[2] & 0xffffffffu) - 1);

  // A full list that the range covers to its end cannot hold the whole
  // answer. Its last entry tells, so peek before reporting.
  auto covered = [&](const Record& list, auto inside) {
    return list[1] == cap_ && inside(rd.get(list[0] + list[1] - 1)[0]);
  };
  bool fallback = covered(left, [&](Value v) { return v >= q.a(); });
  if (!fallback) fallback = covered(right, [&](Value v) { return v <= q.b(); });
  rd.set_locating(false);
  if (!fallback) {
    for (std::size_t i = 0; i < left[1]; ++i) {
      Record e = rd.get(left[0] + i);
      if (e[0] < q.a()) break;
      ++s.meter.touches;
      s.raw.push_back(static_cast<ColorId>(e[2]));
    }
    for (std::size_t i = 0; i < right[1]; ++i) {
      Record e = rd.get(right[0] + i);
      if (e[0] > q.b()) break;
      ++s.meter.touches;
      if (e[1] < q.a()) s.raw.push_back(static_cast<ColorId>(e[2]));
    }
  }
  if (fallback) {
    // The answer has at least cap_ colors, and a walk of the global tree
    // costs its height plus about 2k/B. Scanning the values of [a,b] is
    // preferred while it fits in that budget.
    s.fallback = true;
    rd.set_locating(true);
    std::size_t end = lo + prefix_end(dir_.values + lo, n_ - lo, [&](Value v) { return v <= q.b(); });
    rd.set_locating(false);
    std::size_t b = store_.block_size();
    std::size_t height = std::bit_width(n_ / (bucket_node_size(b) - 2) + 1);
    if ((dir_.values + end - 1) / b - (dir_.values + lo) / b + 1 <= 2 * (1 + cap_ / b) + height) {
      scan_values(rd, lo, end, q, s);
    } else {
      pst_query(rd, dir_.global_pst, dir_.global_nodes, dir_.global_root_y, q, s.raw);
    }
  }
  return s.raw;
}

std::vector<ColorId> EmIndex::query(Range q) const {
  QueryScratch s;
  return query(q, s);
}

void EmIndex::save(std::ostream& out) const {
  out.write(kMagic, 4);
  put_le(out, kFormatVersion, 2);
  put_le(out, n_, 8);
  put_le(out, store_.block_size(), 4);
  put_le(out, colors_, 4);
  for (std::size_t i = 0; i < store_.record_count(); ++i)
    for (std::uint64_t w : store_.record(i)) put_le(out, w, 8);
  if (!out) throw Error(ErrorCode::Io, "write failed");
}

void EmIndex::save_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  save(f);
}

EmIndex EmIndex::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
    throw Error(ErrorCode::Format, "not an index file");
  if (get_le(in, 2) != kFormatVersion) throw Error(ErrorCode::Format, "unsupported format version");
  std::uint64_t n = get_le(in, 8);
  std::uint64_t b = get_le(in, 4);
  std::uint64_t c = get_le(in, 4);
  if (b < 2) throw Error(ErrorCode::Format, "bad block size");
  std::string body(std::istreambuf_iterator<char>(in), {});
  std::size_t block_bytes = 24 * b;
  if (body.empty() || body.size() % block_bytes)
    throw Error(ErrorCode::Format, "body is not a whole number of blocks");
  EmIndex idx;
  idx.store_ = BlockStore(b);
  std::vector<Record> recs(body.size() / 24);
  for (std::size_t i = 0; i < recs.size(); ++i)
    for (std::size_t w = 0; w < 3; ++w) {
      std::uint64_t v = 0;
      for (int k = 7; k >= 0; --k)
        v = (v << 8) | static_cast<unsigned char>(body[i * 24 + w * 8 + static_cast<std::size_t>(k)]);
      recs[i][w] = v;
    }
  idx.store_.append_region(recs);
  idx.read_directory();
  if (idx.n_ != n || idx.colors_ != c) throw Error(ErrorCode::Format, "header disagrees with directory");
  if (auto why = idx.audit(); !why.empty()) throw Error(ErrorCode::Format, "corrupt index: " + why);
  return idx;
}

EmIndex EmIndex::load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
  return load(f);
}

std::string EmIndex::audit() const {
  const Directory& d = dir_;
  if (d.n == 0) return "";
  auto rec = [&](std::uint64_t i) -> const Record* {
    return i < store_.record_count() ? &store_.record(i) : nullptr;
  };
  // Values ascend and prev links match the colors.
  std::unordered_map<std::uint64_t, Value> last;
  std::set<std::uint64_t> colors;
  for (std::uint64_t i = 0; i < d.n; ++i) {
    const Record& r = *rec(d.values + i);
    if (r[0] == 0 || (i > 0 && store_.record(d.values + i - 1)[0] >= r[0])) return "values out of order";
    auto it = last.find(r[2]);
    if (r[1] != (it == last.end() ? kNoPrev : it->second)) return "prev link of " + std::to_string(r[0]);
    last[r[2]] = r[0];
    colors.insert(r[2]);
  }
  if (colors.size() != d.colors) return "color count";

  for (std::uint64_t id = 0; id < d.nodes; ++id) {
    const Record& n = *rec(d.node_recs + id);
    std::uint64_t kids[2] = {(n[2] >> 32), n[2] & 0xffffffffu};
    for (int side = 0; side < 2; ++side) {
      if (kids[side] == 0) continue;
      if (kids[side] > d.nodes) return "child link";
      const Record& c = *rec(d.node_recs + kids[side] - 1);
      if (c[1] > d.cap) return "list over capacity";
      std::set<std::uint64_t> seen;
      for (std::uint64_t j = 0; j < c[1]; ++j) {
        const Record* e = rec(c[0] + j);
        if (!e) return "list out of range";
        if (!seen.insert((*e)[2]).second) return "repeated color in list";
        if (j > 0) {
          Value before = store_.record(c[0] + j - 1)[0];
          if (side == 0 ? before <= (*e)[0] : before >= (*e)[0]) return "list order";
        }
      }
    }
  }

  std::uint64_t covered = 0;
  for (std::uint64_t l = 0; l < d.leaves; ++l) {
    const Record& k = *rec(d.leaf_dir + 2 * l);
    const Record& p = *rec(d.leaf_dir + 2 * l + 1);
    if (p[1] == 0 || p[1] > d.cap || (l + 1 < d.leaves && p[1] != d.cap)) return "leaf extent";
    covered += p[1];
    if (!rec(k[0] + k[1] + k[2] - (k[1] + k[2] ? 1 : 0))) return "hra table out of range";
    for (std::uint64_t j = 0; j < k[1] + k[2]; ++j)
      if (store_.record(k[0] + j)[1] >= d.nodes) return "hra entry";
    if (!rec(pst_node_record(p[0], 0) + 1)) return "leaf tree out of range";
  }
  if (covered != d.n) return "leaves do not cover the set";
  if (!rec(pst_node_record(d.global_pst, 0) + 1)) return "global tree out of range";
  return "";
}

}  // namespace crr
