#include "crr/crr.h"

#include <algorithm>
#include <memory>
#include <new>
#include <set>
#include <string>
#include <variant>

#include "crr/dyn_index.hpp"
#include "crr/em_static.hpp"
#include "crr/slow_index.hpp"
#include "crr/static_index.hpp"

namespace {

using namespace crr;

thread_local std::string g_error;

struct Oracle {
  std::vector<ColoredPoint> points;  // ascending

  auto find(Value v) {
    return std::lower_bound(points.begin(), points.end(), v,
                            [](const ColoredPoint& p, Value x) { return p.value < x; });
  }
};

}  // namespace

struct crr_index {
  crr_kind kind;
  std::variant<std::unique_ptr<StaticIndex>, DynIndex, SlowIndex, EmIndex, Oracle> impl;
};

struct crr_dataset {
  std::vector<crr_point> points;
  std::vector<std::string> labels;
};

namespace {

crr_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return CRR_E_INVALID_ARGUMENT;
    case ErrorCode::InvalidRange: return CRR_E_INVALID_RANGE;
    case ErrorCode::DuplicateCoordinate:
    case ErrorCode::DuplicateX: return CRR_E_DUPLICATE;
    case ErrorCode::NotFound: return CRR_E_NOT_FOUND;
    case ErrorCode::Io: return CRR_E_IO;
    case ErrorCode::Format: return CRR_E_FORMAT;
  }
  return CRR_E_INTERNAL;
}

crr_status fail(crr_status s, std::string msg) {
  g_error = std::move(msg);
  return s;
}

template <class F>
crr_status guarded(F&& f) {
  g_error.clear();
  try {
    return f();
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CRR_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CRR_E_INTERNAL, e.what());
  }
}

std::vector<ColoredPoint> sorted_points(const crr_point* pts, std::size_t n) {
  std::vector<ColoredPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {pts[i].value, pts[i].color};
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i].value == kNoPrev) throw Error(ErrorCode::InvalidArgument, "coordinate 0 is reserved");
    if (i > 0 && out[i - 1].value == out[i].value)
      throw Error(ErrorCode::DuplicateCoordinate, "duplicate coordinate " + std::to_string(out[i].value));
  }
  return out;
}

crr_status unsupported(const crr_index* idx, const char* op) {
  return fail(CRR_E_UNSUPPORTED,
              std::string(op) + " is not offered by index kind " + std::to_string(int(idx->kind)));
}

crr_status copy_out(const std::vector<ColorId>& ans, uint32_t* out, std::size_t cap, std::size_t* count) {
  if (count) *count = ans.size();
  if (ans.size() > cap) return fail(CRR_E_BUFFER_TOO_SMALL, "output buffer holds " + std::to_string(cap) +
                                                                " colors, answer has " + std::to_string(ans.size()));
  std::copy(ans.begin(), ans.end(), out);
  return CRR_OK;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

extern "C" {

const char* crr_last_error(void) { return g_error.c_str(); }

const char* crr_status_name(crr_status s) {
  switch (s) {
    case CRR_OK: return "ok";
    case CRR_E_INVALID_ARGUMENT: return "invalid argument";
    case CRR_E_INVALID_RANGE: return "invalid range";
    case CRR_E_DUPLICATE: return "duplicate coordinate";
    case CRR_E_NOT_FOUND: return "not found";
    case CRR_E_IO: return "i/o error";
    case CRR_E_FORMAT: return "format error";
    case CRR_E_UNSUPPORTED: return "unsupported";
    case CRR_E_BUFFER_TOO_SMALL: return "buffer too small";
    case CRR_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

crr_status crr_build(crr_kind kind, const crr_point* points, size_t n, uint32_t block_size,
                     crr_index** out) {
  return guarded([&] {
    if (!out || (n > 0 && !points)) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    auto pts = sorted_points(points, n);
    auto idx = std::make_unique<crr_index>(crr_index{kind, Oracle{}});
    switch (kind) {
      case CRR_STATIC: idx->impl = std::make_unique<StaticIndex>(pts); break;
      case CRR_DYNAMIC: idx->impl.emplace<DynIndex>(pts); break;
      case CRR_SLOW: idx->impl.emplace<SlowIndex>(pts); break;
      case CRR_EM: idx->impl.emplace<EmIndex>(pts, block_size); break;
      case CRR_ORACLE: idx->impl = Oracle{std::move(pts)}; break;
      default: return fail(CRR_E_INVALID_ARGUMENT, "unknown index kind");
    }
    *out = idx.release();
    return CRR_OK;
  });
}

void crr_free(crr_index* index) { delete index; }

crr_status crr_info_get(const crr_index* index, crr_info* out) {
  return guarded([&] {
    if (!index || !out) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    *out = crr_info{index->kind, 0, 0, 0};
    auto count_colors = [](const auto& pts) {
      std::set<ColorId> s;
      for (const auto& p : pts) s.insert(p.color);
      return s.size();
    };
    std::visit(overloaded{
                   [&](const std::unique_ptr<StaticIndex>& s) {
                     out->size = s->size();
                     out->colors = count_colors(s->points());
                   },
                   [&](const DynIndex& d) {
                     out->size = d.size();
                     out->colors = d.color_count();
                   },
                   [&](const SlowIndex& s) {
                     out->size = s.size();
                     out->colors = s.color_count();
                   },
                   [&](const EmIndex& e) {
                     out->size = e.size();
                     out->colors = e.colors();
                     out->block_size = static_cast<uint32_t>(e.block_size());
                   },
                   [&](const Oracle& o) {
                     out->size = o.points.size();
                     out->colors = count_colors(o.points);
                   },
               },
               index->impl);
    return CRR_OK;
  });
}

crr_status crr_query(const crr_index* index, uint64_t a, uint64_t b, uint32_t* out, size_t cap,
                     size_t* count, crr_cost* cost) {
  return guarded([&] {
    if (!index || (cap > 0 && !out)) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    Range q(a, b);
    QueryScratch s;
    std::vector<ColorId> ans = std::visit(
        overloaded{
            [&](const std::unique_ptr<StaticIndex>& x) { return x->query(q, s); },
            [&](const DynIndex& x) { return x.query(q, s); },
            [&](const SlowIndex& x) { return x.query(q, s); },
            [&](const EmIndex& x) { return x.query(q, s); },
            [&](const Oracle& x) { return oracle_report(x.points, q); },
        },
        index->impl);
    if (cost) {
      *cost = crr_cost{s.meter.touches, s.meter.locate_ops, s.meter.block_reads,
                       s.meter.locate_reads, s.fallback ? 1 : 0};
    }
    return copy_out(ans, out, cap, count);
  });
}

crr_status crr_insert(crr_index* index, uint64_t value, uint32_t color) {
  return guarded([&] {
    if (!index) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    ColoredPoint p{value, color};
    if (auto* d = std::get_if<DynIndex>(&index->impl)) {
      d->insert(p);
    } else if (auto* s = std::get_if<SlowIndex>(&index->impl)) {
      s->insert(p);
    } else if (auto* o = std::get_if<Oracle>(&index->impl)) {
      if (value == kNoPrev) return fail(CRR_E_INVALID_ARGUMENT, "coordinate 0 is reserved");
      auto it = o->find(value);
      if (it != o->points.end() && it->value == value)
        return fail(CRR_E_DUPLICATE, "duplicate coordinate " + std::to_string(value));
      o->points.insert(it, p);
    } else {
      return unsupported(index, "insert");
    }
    return CRR_OK;
  });
}

crr_status crr_delete(crr_index* index, uint64_t value) {
  return guarded([&] {
    if (!index) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    if (auto* d = std::get_if<DynIndex>(&index->impl)) {
      d->erase(value);
    } else if (auto* s = std::get_if<SlowIndex>(&index->impl)) {
      s->erase(value);
    } else if (auto* o = std::get_if<Oracle>(&index->impl)) {
      auto it = o->find(value);
      if (it == o->points.end() || it->value != value)
        return fail(CRR_E_NOT_FOUND, "value " + std::to_string(value) + " not present");
      o->points.erase(it);
    } else {
      return unsupported(index, "delete");
    }
    return CRR_OK;
  });
}

crr_status crr_k_leftmost(const crr_index* index, uint64_t a, uint64_t b, size_t k, uint32_t* out,
                          size_t* count) {
  return guarded([&] {
    if (!index || (k > 0 && !out)) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    Range q(a, b);
    std::vector<ColorId> ans;
    if (auto* s = std::get_if<SlowIndex>(&index->impl))
      ans = s->k_leftmost(q, k);
    else if (auto* o = std::get_if<Oracle>(&index->impl))
      ans = oracle_k_leftmost(o->points, q, k);
    else
      return unsupported(index, "k_leftmost");
    return copy_out(ans, out, k, count);
  });
}

crr_status crr_save(const crr_index* index, const char* path) {
  return guarded([&] {
    if (!index || !path) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    auto* e = std::get_if<EmIndex>(&index->impl);
    if (!e) return unsupported(index, "save");
    e->save_file(path);
    return CRR_OK;
  });
}

crr_status crr_load(const char* path, crr_index** out) {
  return guarded([&] {
    if (!path || !out) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    auto idx = std::make_unique<crr_index>(crr_index{CRR_EM, EmIndex::load_file(path)});
    *out = idx.release();
    return CRR_OK;
  });
}

crr_status crr_dataset_read(const char* path, crr_dataset** out) {
  return guarded([&] {
    if (!path || !out) return fail(CRR_E_INVALID_ARGUMENT, "null argument");
    auto raw = read_dataset_file(path);
    auto norm = normalize_input(raw);
    auto ds = std::make_unique<crr_dataset>();
    ds->points.reserve(norm.points.size());
    for (const auto& p : norm.points) ds->points.push_back({p.value, p.color});
    ds->labels = norm.remap.labels();
    *out = ds.release();
    return CRR_OK;
  });
}

void crr_dataset_free(crr_dataset* ds) { delete ds; }
size_t crr_dataset_size(const crr_dataset* ds) { return ds ? ds->points.size() : 0; }
const crr_point* crr_dataset_points(const crr_dataset* ds) { return ds ? ds->points.data() : nullptr; }
size_t crr_dataset_colors(const crr_dataset* ds) { return ds ? ds->labels.size() : 0; }
const char* crr_dataset_label(const crr_dataset* ds, uint32_t color) {
  return ds && color < ds->labels.size() ? ds->labels[color].c_str() : nullptr;
}

}  // extern "C"
