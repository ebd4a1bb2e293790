// Command-line harness over the C interface of libcrr.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "crr/crr.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(crr_status s, const std::string& what) {
  if (s != CRR_OK) throw CliError(what + ": " + crr_status_name(s) + " (" + crr_last_error() + ")");
}

struct IndexPtr {
  crr_index* p = nullptr;
  IndexPtr() = default;
  IndexPtr(const IndexPtr&) = delete;
  IndexPtr& operator=(const IndexPtr&) = delete;
  IndexPtr(IndexPtr&& o) noexcept : p(o.p) { o.p = nullptr; }
  IndexPtr& operator=(IndexPtr&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  ~IndexPtr() { crr_free(p); }
};

const std::map<std::string, crr_kind> kKinds = {
    {"static", CRR_STATIC}, {"dynamic", CRR_DYNAMIC}, {"slow", CRR_SLOW}, {"em", CRR_EM}};

bool is_static(crr_kind k) { return k == CRR_STATIC || k == CRR_EM; }

// ---------------------------------------------------------------- datasets

struct Dataset {
  std::vector<crr_point> points;       // ascending by value
  std::vector<std::string> labels;     // dense id -> label
  std::map<std::string, uint32_t> ids;

  uint32_t intern(const std::string& label) {
    auto [it, fresh] = ids.emplace(label, static_cast<uint32_t>(labels.size()));
    if (fresh) labels.push_back(label);
    return it->second;
  }
};

Dataset load_dataset(const std::string& path) {
  crr_dataset* raw = nullptr;
  check(crr_dataset_read(path.c_str(), &raw), "reading " + path);
  Dataset ds;
  const crr_point* p = crr_dataset_points(raw);
  ds.points.assign(p, p + crr_dataset_size(raw));
  for (uint32_t c = 0; c < crr_dataset_colors(raw); ++c) ds.intern(crr_dataset_label(raw, c));
  crr_dataset_free(raw);
  return ds;
}

// --------------------------------------------------------------- workloads

struct Op {
  char kind;  // I D Q K
  uint64_t a = 0, b = 0, k = 0;
  std::string label;
};

std::string format_op(const Op& op) {
  std::ostringstream s;
  s << op.kind << ' ';
  switch (op.kind) {
    case 'I': s << op.a << ' ' << op.label; break;
    case 'D': s << op.a; break;
    case 'Q': s << op.a << ' ' << op.b; break;
    default: s << op.a << ' ' << op.b << ' ' << op.k; break;
  }
  return s.str();
}

std::vector<Op> load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open workload " + path);
  std::vector<Op> ops;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream s(line);
    Op op;
    s >> op.kind;
    bool ok = false;
    switch (op.kind) {
      case 'I': ok = static_cast<bool>(s >> op.a >> op.label); break;
      case 'D': ok = static_cast<bool>(s >> op.a); break;
      case 'Q': ok = static_cast<bool>(s >> op.a >> op.b); break;
      case 'K': ok = static_cast<bool>(s >> op.a >> op.b >> op.k); break;
      default: break;
    }
    if (!ok) throw CliError(path + ":" + std::to_string(no) + ": malformed operation");
    ops.push_back(op);
  }
  return ops;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw CliError("cannot write " + path);
  out << text;
}

// ------------------------------------------------------------- index state

// A built index plus the current point set, so static kinds can be rebuilt
// after updates and every kind can be compared with a scan.
class Session {
 public:
  Session(crr_kind kind, uint32_t block_size, Dataset ds)
      : kind_(kind), block_size_(block_size), ds_(std::move(ds)) {
    for (const auto& p : ds_.points) model_[p.value] = p.color;
    idx_ = build(kind_);
    oracle_ = build(CRR_ORACLE);
  }

  crr_kind kind() const { return kind_; }
  Dataset& dataset() { return ds_; }
  std::size_t size() const { return model_.size(); }

  /// Applies an update to both sides. Returns false when it was rejected
  /// (duplicate insert, missing delete), which the scan agrees with.
  bool update(const Op& op) {
    bool ok = op.kind == 'I' ? !model_.count(op.a) && op.a != 0 : model_.count(op.a) != 0;
    if (!ok) return false;
    if (op.kind == 'I') {
      uint32_t c = ds_.intern(op.label);
      model_[op.a] = c;
      check(crr_insert(oracle_.p, op.a, c), "oracle insert");
      if (is_static(kind_))
        stale_ = true;
      else
        check(crr_insert(idx_.p, op.a, c), "insert");
    } else {
      model_.erase(op.a);
      check(crr_delete(oracle_.p, op.a), "oracle delete");
      if (is_static(kind_))
        stale_ = true;
      else
        check(crr_delete(idx_.p, op.a), "delete");
    }
    return true;
  }

  const crr_index* index() {
    if (stale_) {
      idx_ = build(kind_);
      stale_ = false;
    }
    return idx_.p;
  }
  const crr_index* oracle() const { return oracle_.p; }

 private:
  IndexPtr build(crr_kind k) const {
    std::vector<crr_point> pts;
    pts.reserve(model_.size());
    for (const auto& [v, c] : model_) pts.push_back({v, c});
    IndexPtr out;
    check(crr_build(k, pts.data(), pts.size(), block_size_, &out.p), "building index");
    return out;
  }

  crr_kind kind_;
  uint32_t block_size_;
  Dataset ds_;
  std::map<uint64_t, uint32_t> model_;
  IndexPtr idx_, oracle_;
  bool stale_ = false;
};

struct Answer {
  std::vector<uint32_t> colors;
  crr_cost cost{};
  crr_status status = CRR_OK;
};

Answer run_query(const crr_index* idx, uint64_t a, uint64_t b) {
  Answer ans;
  ans.colors.resize(64);
  for (;;) {
    std::size_t n = 0;
    ans.status = crr_query(idx, a, b, ans.colors.data(), ans.colors.size(), &n, &ans.cost);
    if (ans.status == CRR_E_BUFFER_TOO_SMALL) {
      ans.colors.resize(n);
      continue;
    }
    ans.colors.resize(ans.status == CRR_OK ? n : 0);
    return ans;
  }
}

Answer run_k_leftmost(const crr_index* idx, uint64_t a, uint64_t b, uint64_t k) {
  Answer ans;
  ans.colors.resize(k);
  std::size_t n = 0;
  ans.status = crr_k_leftmost(idx, a, b, k, ans.colors.data(), &n);
  ans.colors.resize(ans.status == CRR_OK ? n : 0);
  return ans;
}

// ---------------------------------------------------------------- generate

struct GenOptions {
  uint64_t seed = 1, n = 1000, universe = 1u << 20, colors = 16;
  std::string skew = "uniform", out, workload;
  uint64_t ops = 0, max_width = 0;
  std::string mix = "queries";
};

uint64_t below(std::mt19937_64& rng, uint64_t n) { return n ? rng() % n : 0; }

int cmd_generate(const GenOptions& o) {
  if (o.n > o.universe) throw CliError("n must not exceed the universe size");
  if (o.colors < 1) throw CliError("at least one color is required");
  if (o.skew != "uniform" && o.skew != "zipf") throw CliError("skew must be uniform or zipf");
  if (o.mix != "queries" && o.mix != "mixed") throw CliError("mix must be queries or mixed");
  std::mt19937_64 rng(o.seed);

  std::vector<uint64_t> values;
  if (o.universe <= 4 * o.n) {
    std::vector<uint64_t> all(o.universe);
    for (uint64_t i = 0; i < o.universe; ++i) all[i] = i + 1;
    for (uint64_t i = 0; i < o.n; ++i) std::swap(all[i], all[i + below(rng, o.universe - i)]);
    values.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(o.n));
  } else {
    std::unordered_set<uint64_t> seen;
    while (values.size() < o.n) {
      uint64_t v = 1 + below(rng, o.universe);
      if (seen.insert(v).second) values.push_back(v);
    }
  }

  std::vector<double> cumulative(o.colors);
  double total = 0;
  for (uint64_t c = 0; c < o.colors; ++c) {
    total += o.skew == "zipf" ? 1.0 / static_cast<double>(c + 1) : 1.0;
    cumulative[c] = total;
  }
  auto draw_color = [&] {
    double x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    return static_cast<uint64_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                          static_cast<std::ptrdiff_t>(o.colors) - 1));
  };

  std::ostringstream data;
  data << "# generate seed=" << o.seed << " n=" << o.n << " universe=" << o.universe
       << " colors=" << o.colors << " skew=" << o.skew << "\n";
  for (uint64_t v : values) data << v << ",c" << draw_color() << "\n";
  write_text(o.out, data.str());

  if (!o.workload.empty()) {
    std::ostringstream w;
    w << "# workload seed=" << o.seed << " ops=" << o.ops << " mix=" << o.mix << "\n";
    uint64_t width_cap = o.max_width ? o.max_width : o.universe;
    unsigned lg = 0;
    while ((uint64_t{1} << lg) < width_cap) ++lg;
    std::vector<uint64_t> live = values;
    for (uint64_t i = 0; i < o.ops; ++i) {
      uint64_t roll = below(rng, 10);
      if (o.mix == "mixed" && roll < 2) {
        w << "I " << 1 + below(rng, o.universe) << " c" << draw_color() << "\n";
      } else if (o.mix == "mixed" && roll < 4 && !live.empty()) {
        w << "D " << live[below(rng, live.size())] << "\n";
      } else {
        uint64_t a = 1 + below(rng, o.universe);
        uint64_t width = below(rng, std::min(width_cap, uint64_t{1} << below(rng, lg + 1)));
        uint64_t b = std::min(o.universe, a + width);
        if (o.mix == "mixed" && roll == 9)
          w << "K " << a << ' ' << b << ' ' << 1 + below(rng, 8) << "\n";
        else
          w << "Q " << a << ' ' << b << "\n";
      }
    }
    write_text(o.workload, w.str());
  }
  return 0;
}

// ------------------------------------------------------------------ build

int cmd_build(const std::string& dataset, const std::string& kind_name, uint32_t block_size,
              const std::string& out) {
  crr_kind kind = kKinds.at(kind_name);
  Dataset ds = load_dataset(dataset);
  IndexPtr idx;
  auto t0 = std::chrono::steady_clock::now();
  check(crr_build(kind, ds.points.data(), ds.points.size(), block_size, &idx.p), "building index");
  auto nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0);
  crr_info info;
  check(crr_info_get(idx.p, &info), "info");
  json j = {{"schema", 1},       {"index", kind_name},        {"n", info.size},
            {"colors", info.colors}, {"build_nanos", nanos.count()}};
  if (kind == CRR_EM) {
    j["block_size"] = info.block_size;
    if (!out.empty()) {
      check(crr_save(idx.p, out.c_str()), "saving " + out);
      j["file"] = out;
    }
  } else if (!out.empty()) {
    throw CliError("only the em index has a file format");
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ----------------------------------------------------------------- verify

struct Divergence {
  std::size_t op;  // index into the workload
  std::vector<uint32_t> got, want;
};

std::vector<uint32_t> normalized(std::vector<uint32_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::optional<Divergence> replay(crr_kind kind, uint32_t block_size, const Dataset& ds,
                                 const std::vector<Op>& ops, std::size_t limit, bool corrupt,
                                 std::size_t* checked = nullptr, std::size_t* skipped = nullptr) {
  Session s(kind, block_size, ds);
  for (std::size_t i = 0; i < limit; ++i) {
    const Op& op = ops[i];
    if (op.kind == 'I' || op.kind == 'D') {
      s.update(op);
      continue;
    }
    if (op.a > op.b) continue;
    Answer got, want;
    if (op.kind == 'Q') {
      got = run_query(s.index(), op.a, op.b);
      want = run_query(s.oracle(), op.a, op.b);
      // Fault injection: lose one color from every answer with at least two.
      if (corrupt && got.colors.size() >= 2) got.colors.pop_back();
      got.colors = normalized(got.colors);
      want.colors = normalized(want.colors);
    } else {
      got = run_k_leftmost(s.index(), op.a, op.b, op.k);
      if (got.status == CRR_E_UNSUPPORTED) {
        if (skipped) ++*skipped;
        continue;
      }
      want = run_k_leftmost(s.oracle(), op.a, op.b, op.k);
      if (corrupt && got.colors.size() >= 2) got.colors.pop_back();
    }
    if (checked) ++*checked;
    if (got.status != want.status || got.colors != want.colors) return Divergence{i, got.colors, want.colors};
  }
  return std::nullopt;
}

std::string join(const std::vector<uint32_t>& v, const Dataset& ds) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i] < ds.labels.size() ? ds.labels[v[i]] : std::to_string(v[i]);
  }
  return out + "}";
}

int cmd_verify(const std::string& dataset, const std::string& workload, const std::string& kind_name,
               uint32_t block_size, bool corrupt, const std::string& out) {
  crr_kind kind = kKinds.at(kind_name);
  Dataset ds = load_dataset(dataset);
  auto ops = load_workload(workload);
  std::size_t checked = 0, skipped = 0;
  auto div = replay(kind, block_size, ds, ops, ops.size(), corrupt, &checked, &skipped);
  if (!div) {
    std::cout << "PASS " << kind_name << ": " << checked << " answers match the scan";
    if (skipped) std::cout << " (" << skipped << " k-leftmost ops not offered by this index)";
    std::cout << "\n";
    return 0;
  }

  // Shortest failing prefix by bisection over the prefix length.
  std::size_t lo = 0, hi = div->op + 1;
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (replay(kind, block_size, ds, ops, mid, corrupt))
      hi = mid;
    else
      lo = mid;
  }
  // Keep the updates of the prefix and the failing query, then check that
  // the reduced workload still fails.
  std::vector<Op> repro;
  for (std::size_t i = 0; i + 1 < hi; ++i)
    if (ops[i].kind == 'I' || ops[i].kind == 'D') repro.push_back(ops[i]);
  repro.push_back(ops[hi - 1]);
  auto still = replay(kind, block_size, ds, repro, repro.size(), corrupt);
  if (!still) repro.assign(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(hi));

  std::ostringstream text;
  text << "# reproducer: index=" << kind_name << " dataset=" << dataset << (corrupt ? " corrupt" : "")
       << "\n";
  for (const auto& op : repro) text << format_op(op) << "\n";
  std::cerr << "FAIL " << kind_name << ": operation " << div->op + 1 << " (" << format_op(ops[div->op])
            << ") returned " << join(div->got, ds) << ", expected " << join(div->want, ds) << "\n"
            << "minimal failing prefix: " << hi << " operations; reproducer has " << repro.size() << "\n";
  if (out.empty())
    std::cerr << text.str();
  else
    write_text(out, text.str());
  return 1;
}

// ------------------------------------------------------------------ bench

struct Record {
  std::size_t op;
  uint64_t a, b, k;
  crr_cost cost;
  int64_t nanos;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

// Buckets 0, 1, 4, 16, 64, ...: the largest power of four not above k.
uint64_t bucket_of(uint64_t k) {
  if (k == 0) return 0;
  uint64_t b = 1;
  while (b * 4 <= k) b *= 4;
  return b;
}

int cmd_bench(const std::string& dataset, const std::string& workload, const std::string& kind_name,
              uint32_t block_size, unsigned threads, const std::string& out) {
  crr_kind kind = kKinds.at(kind_name);
  Dataset ds = load_dataset(dataset);
  auto ops = load_workload(workload);
  Session s(kind, block_size, ds);
  std::vector<Record> records;

  auto time_query = [](const crr_index* idx, const Op& op, std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    Answer ans = run_query(idx, op.a, op.b);
    auto t1 = std::chrono::steady_clock::now();
    return Record{i, op.a, op.b, ans.colors.size(), ans.cost,
                  std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()};
  };

  bool read_only = std::all_of(ops.begin(), ops.end(), [](const Op& op) { return op.kind == 'Q' || op.kind == 'K'; });
  if (is_static(kind) && read_only && threads > 1) {
    // Read-only queries on a static index: split across workers, each with
    // its own meters (the C call fills a private crr_cost).
    std::vector<std::size_t> qs;
    for (std::size_t i = 0; i < ops.size(); ++i)
      if (ops[i].kind == 'Q' && ops[i].a <= ops[i].b) qs.push_back(i);
    records.resize(qs.size());
    const crr_index* idx = s.index();
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t j = t; j < qs.size(); j += threads) records[j] = time_query(idx, ops[qs[j]], qs[j]);
      });
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const Op& op = ops[i];
      if (op.kind == 'I' || op.kind == 'D')
        s.update(op);
      else if (op.kind == 'Q' && op.a <= op.b)
        records.push_back(time_query(s.index(), op, i));
    }
  }

  json j;
  j["schema"] = 1;
  j["index"] = kind_name;
  j["n"] = ds.points.size();
  if (kind == CRR_EM) j["block_size"] = block_size;
  j["records"] = json::array();
  std::map<uint64_t, std::vector<const Record*>> buckets;
  for (const auto& r : records) {
    json rec = {{"op", r.op},
                {"a", r.a},
                {"b", r.b},
                {"k", r.k},
                {"touches", r.cost.touches},
                {"locate_ops", r.cost.locate_ops},
                {"block_reads", r.cost.block_reads},
                {"locate_reads", r.cost.locate_reads},
                {"fallback", r.cost.fallback != 0},
                {"wall_nanos", r.nanos}};
    j["records"].push_back(rec);
    buckets[bucket_of(r.k)].push_back(&r);
  }
  j["summary"] = json::array();
  for (const auto& [b, rs] : buckets) {
    std::vector<double> per_k, per_block, nanos;
    for (const Record* r : rs) {
      per_k.push_back(static_cast<double>(r->cost.touches) / static_cast<double>(r->k + 1));
      if (kind == CRR_EM)
        per_block.push_back(static_cast<double>(r->cost.block_reads) /
                            (1.0 + static_cast<double>(r->k) / static_cast<double>(block_size)));
      nanos.push_back(static_cast<double>(r->nanos));
    }
    json row = {{"k_bucket", b},
                {"queries", rs.size()},
                {"median_touches_per_k1", median(per_k)},
                {"median_wall_nanos", median(nanos)}};
    if (kind == CRR_EM) row["median_block_reads_per_1_k_over_b"] = median(per_block);
    j["summary"].push_back(row);
  }
  write_text(out, j.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------- dump

int cmd_dump(const std::string& file, const std::string& out) {
  IndexPtr idx;
  check(crr_load(file.c_str(), &idx.p), "loading " + file);
  crr_info info;
  check(crr_info_get(idx.p, &info), "info");
  json j = {{"schema", 1}, {"index", "em"}, {"n", info.size}, {"colors", info.colors},
            {"block_size", info.block_size}};
  if (!out.empty()) {
    check(crr_save(idx.p, out.c_str()), "saving " + out);
    auto slurp = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    j["file"] = out;
    j["identical"] = slurp(file) == slurp(out);
  }
  std::cout << j.dump(2) << "\n";
  return j.value("identical", true) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Color range reporting: generate data, build indexes, verify and benchmark them"};
  app.require_subcommand(1);

  std::string kind = "static", dataset, workload, out;
  uint32_t block_size = 64;
  auto add_index_flags = [&](CLI::App* sub) {
    sub->add_option("--index", kind, "Index kind")
        ->check(CLI::IsMember({"static", "dynamic", "slow", "em"}));
    sub->add_option("--block-size", block_size, "Records per block for the em index")
        ->check(CLI::Range(2u, 1u << 20));
  };

  GenOptions gen;
  auto* g = app.add_subcommand("generate", "Write a random dataset (and optionally a workload)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("-n,--n", gen.n, "Number of points");
  g->add_option("-u,--universe", gen.universe, "Values are drawn from 1..U")->check(CLI::PositiveNumber);
  g->add_option("-c,--colors", gen.colors, "Number of colors");
  g->add_option("--skew", gen.skew, "Color frequencies")->check(CLI::IsMember({"uniform", "zipf"}));
  g->add_option("--out", gen.out, "Dataset CSV path (stdout if omitted)");
  g->add_option("--workload", gen.workload, "Also write a workload to this path");
  g->add_option("--ops", gen.ops, "Workload length");
  g->add_option("--mix", gen.mix, "Workload operations")->check(CLI::IsMember({"queries", "mixed"}));
  g->add_option("--max-width", gen.max_width, "Largest query width (default: universe)");

  auto* b = app.add_subcommand("build", "Build an index and report its shape; em indexes can be saved");
  b->add_option("dataset", dataset, "Dataset CSV")->required();
  add_index_flags(b);
  b->add_option("--out", out, "Index file (em only)");

  bool corrupt = false;
  auto* v = app.add_subcommand("verify", "Replay a workload on an index and a scan in lockstep");
  v->add_option("dataset", dataset, "Dataset CSV")->required();
  v->add_option("workload", workload, "Workload file")->required();
  add_index_flags(v);
  v->add_flag("--corrupt", corrupt, "Inject a fault into the index answers");
  v->add_option("--out", out, "Where to write the reproducer (stderr if omitted)");

  unsigned threads = 1;
  auto* be = app.add_subcommand("bench", "Replay a workload and emit per-query counters as JSON");
  be->add_option("dataset", dataset, "Dataset CSV")->required();
  be->add_option("workload", workload, "Workload file")->required();
  add_index_flags(be);
  be->add_option("--threads", threads, "Worker threads for read-only static workloads")
      ->check(CLI::Range(1u, 256u));
  be->add_option("--out", out, "JSON path (stdout if omitted)");

  std::string index_file;
  auto* d = app.add_subcommand("dump", "Load an em index file, print its header, optionally re-save it");
  d->add_option("file", index_file, "Index file")->required();
  d->add_option("--out", out, "Re-save here and compare bytes");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return cmd_generate(gen);
    if (*b) return cmd_build(dataset, kind, block_size, out);
    if (*v) return cmd_verify(dataset, workload, kind, block_size, corrupt, out);
    if (*be) return cmd_bench(dataset, workload, kind, block_size, threads, out);
    if (*d) return cmd_dump(index_file, out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
