// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crr/crr.h"
#include "doctest.h"

namespace {

std::vector<crr_point> e1() {
  return {{1, 0}, {3, 1}, {5, 0}, {7, 2}, {9, 1}, {12, 0}, {15, 2}, {20, 1}};
}

std::set<uint32_t> scan(const std::vector<crr_point>& pts, uint64_t a, uint64_t b) {
  std::set<uint32_t> out;
  for (auto p : pts)
    if (a <= p.value && p.value <= b) out.insert(p.color);
  return out;
}

std::set<uint32_t> ask(const crr_index* idx, uint64_t a, uint64_t b, crr_cost* cost = nullptr) {
  uint32_t buf[64];
  size_t n = 0;
  REQUIRE(crr_query(idx, a, b, buf, 64, &n, cost) == CRR_OK);
  return {buf, buf + n};
}

struct Handle {
  crr_index* p = nullptr;
  ~Handle() { crr_free(p); }
};

}  // namespace

TEST_CASE("every kind answers E1") {
  auto pts = e1();
  std::reverse(pts.begin(), pts.end());  // input order does not matter
  for (crr_kind k : {CRR_STATIC, CRR_DYNAMIC, CRR_SLOW, CRR_EM, CRR_ORACLE}) {
    Handle h;
    REQUIRE(crr_build(k, pts.data(), pts.size(), 4, &h.p) == CRR_OK);
    CHECK(ask(h.p, 4, 13) == std::set<uint32_t>{0, 1, 2});
    CHECK(ask(h.p, 7, 7) == std::set<uint32_t>{2});
    CHECK(ask(h.p, 21, 40).empty());
    crr_info info;
    REQUIRE(crr_info_get(h.p, &info) == CRR_OK);
    CHECK(info.kind == k);
    CHECK(info.size == 8);
    CHECK(info.colors == 3);
    CHECK(info.block_size == (k == CRR_EM ? 4u : 0u));
  }
}

TEST_CASE("errors come back as codes with a message") {
  Handle h;
  auto pts = e1();
  REQUIRE(crr_build(CRR_STATIC, pts.data(), pts.size(), 0, &h.p) == CRR_OK);
  uint32_t buf[4];
  size_t n = 0;
  CHECK(crr_query(h.p, 9, 8, buf, 4, &n, nullptr) == CRR_E_INVALID_RANGE);
  CHECK(std::string(crr_last_error()).size() > 0);
  CHECK(crr_query(h.p, 1, 20, buf, 2, &n, nullptr) == CRR_E_BUFFER_TOO_SMALL);
  CHECK(n == 3);
  CHECK(crr_insert(h.p, 30, 1) == CRR_E_UNSUPPORTED);
  CHECK(crr_save(h.p, "/tmp/never") == CRR_E_UNSUPPORTED);
  CHECK(crr_query(h.p, 1, 20, buf, 4, &n, nullptr) == CRR_OK);
  CHECK(std::string(crr_last_error()).empty());

  crr_point dup[] = {{3, 0}, {3, 1}};
  crr_index* bad = nullptr;
  CHECK(crr_build(CRR_DYNAMIC, dup, 2, 0, &bad) == CRR_E_DUPLICATE);
  crr_point zero[] = {{0, 0}};
  CHECK(crr_build(CRR_SLOW, zero, 1, 0, &bad) == CRR_E_INVALID_ARGUMENT);
  CHECK(crr_build(CRR_EM, dup, 1, 1, &bad) == CRR_E_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(crr_load("/nonexistent/file.crr", &bad) == CRR_E_IO);
}

TEST_CASE("updates on dynamic kinds track a scan") {
  std::mt19937_64 rng(5);
  for (crr_kind k : {CRR_DYNAMIC, CRR_SLOW, CRR_ORACLE}) {
    Handle h;
    REQUIRE(crr_build(k, nullptr, 0, 0, &h.p) == CRR_OK);
    std::vector<crr_point> model;
    for (int op = 0; op < 3000; ++op) {
      uint64_t v = 1 + rng() % 500;
      auto it = std::find_if(model.begin(), model.end(), [&](auto p) { return p.value == v; });
      if (rng() % 2) {
        uint32_t c = static_cast<uint32_t>(rng() % 9);
        crr_status s = crr_insert(h.p, v, c);
        REQUIRE(s == (it == model.end() ? CRR_OK : CRR_E_DUPLICATE));
        if (s == CRR_OK) model.push_back({v, c});
      } else {
        crr_status s = crr_delete(h.p, v);
        REQUIRE(s == (it == model.end() ? CRR_E_NOT_FOUND : CRR_OK));
        if (s == CRR_OK) model.erase(it);
      }
      uint64_t a = 1 + rng() % 500, b = a + rng() % 100;
      REQUIRE(ask(h.p, a, b) == scan(model, a, b));
    }
  }
}

TEST_CASE("k-leftmost on the slow kind") {
  Handle slow, oracle;
  auto pts = e1();
  REQUIRE(crr_build(CRR_SLOW, pts.data(), pts.size(), 0, &slow.p) == CRR_OK);
  REQUIRE(crr_build(CRR_ORACLE, pts.data(), pts.size(), 0, &oracle.p) == CRR_OK);
  uint32_t x[8], y[8];
  size_t nx = 0, ny = 0;
  REQUIRE(crr_k_leftmost(slow.p, 4, 20, 2, x, &nx) == CRR_OK);
  REQUIRE(crr_k_leftmost(oracle.p, 4, 20, 2, y, &ny) == CRR_OK);
  CHECK(nx == 2);
  CHECK(std::vector<uint32_t>(x, x + nx) == std::vector<uint32_t>{0, 2});
  CHECK(std::vector<uint32_t>(y, y + ny) == std::vector<uint32_t>{0, 2});
  Handle st;
  REQUIRE(crr_build(CRR_STATIC, pts.data(), pts.size(), 0, &st.p) == CRR_OK);
  CHECK(crr_k_leftmost(st.p, 4, 20, 2, x, &nx) == CRR_E_UNSUPPORTED);
}

TEST_CASE("EM save and load through files") {
  std::mt19937_64 rng(6);
  std::vector<crr_point> pts;
  for (uint64_t v = 1; v <= 2000; ++v)
    if (rng() % 3 == 0) pts.push_back({v * 7, static_cast<uint32_t>(rng() % 50)});
  Handle h, back;
  REQUIRE(crr_build(CRR_EM, pts.data(), pts.size(), 8, &h.p) == CRR_OK);
  std::string path = "capi_roundtrip.crr";
  REQUIRE(crr_save(h.p, path.c_str()) == CRR_OK);
  REQUIRE(crr_load(path.c_str(), &back.p) == CRR_OK);
  for (int q = 0; q < 200; ++q) {
    uint64_t a = rng() % 14000, b = a + rng() % 3000;
    crr_cost c1, c2;
    REQUIRE(ask(h.p, a, b, &c1) == ask(back.p, a, b, &c2));
    REQUIRE(c1.block_reads == c2.block_reads);
    REQUIRE(c1.locate_reads == c2.locate_reads);
  }
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("JUNK", 4);
  }
  crr_index* bad = nullptr;
  CHECK(crr_load(path.c_str(), &bad) == CRR_E_FORMAT);
  std::remove(path.c_str());
}

TEST_CASE("dataset files") {
  std::string path = "capi_dataset.csv";
  {
    std::ofstream f(path);
    f << "# demo\n9,blue\n1,red\n\n5,red\n7,green\n";
  }
  crr_dataset* ds = nullptr;
  REQUIRE(crr_dataset_read(path.c_str(), &ds) == CRR_OK);
  CHECK(crr_dataset_size(ds) == 4);
  CHECK(crr_dataset_colors(ds) == 3);
  const crr_point* p = crr_dataset_points(ds);
  CHECK(p[0].value == 1);
  CHECK(p[3].value == 9);
  CHECK(std::string(crr_dataset_label(ds, p[3].color)) == "blue");
  CHECK(crr_dataset_label(ds, 99) == nullptr);
  crr_dataset_free(ds);
  {
    std::ofstream f(path);
    f << "1,red\n1,blue\n";
  }
  CHECK(crr_dataset_read(path.c_str(), &ds) == CRR_E_DUPLICATE);
  std::remove(path.c_str());
}
