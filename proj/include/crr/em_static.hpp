#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crr/core.hpp"
#include "crr/static_index.hpp"

namespace crr {

/// Simulated disk: a flat array of three-word records grouped into blocks of
/// B records. All index data lives here after construction.
class BlockStore {
 public:
  using Record = std::array<std::uint64_t, 3>;

  BlockStore() = default;
  explicit BlockStore(std::size_t block_size) : block_size_(block_size) {}

  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t record_count() const noexcept { return records_.size(); }
  std::size_t block_count() const noexcept { return records_.size() / block_size_; }
  const Record& record(std::size_t i) const { return records_.at(i); }

  /// Appends records starting at a fresh block; returns the first index.
  std::size_t append_region(std::span<const Record> recs);
  /// Pads the tail to a whole block.
  void pad();
  Record& mutable_record(std::size_t i) { return records_.at(i); }

  bool operator==(const BlockStore&) const = default;

 private:
  std::size_t block_size_ = 1;
  std::vector<Record> records_;
};

/// Sequential reader over a BlockStore holding one block in its buffer, plus
/// an optional LRU cache of further blocks. Each fetch of a block that is in
/// neither is one I/O, charged to the meter's locate or reporting counter
/// depending on the current phase. Leaving the locate phase empties the
/// one-block buffer, so reporting is charged for every block it uses.
class BlockReader {
 public:
  BlockReader(const BlockStore& store, CostMeter& meter, std::size_t cache_blocks = 0);

  const BlockStore::Record& get(std::size_t i);
  void set_locating(bool locating) noexcept {
    if (locating_ && !locating) buffered_ = SIZE_MAX;
    locating_ = locating;
  }

 private:
  const BlockStore& store_;
  CostMeter& meter_;
  std::size_t cache_blocks_;
  std::size_t buffered_ = SIZE_MAX;
  bool locating_ = true;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::list<std::size_t>::iterator> cached_;
};

/// Static color reporting in the external-memory model.
///
/// Leaves and lists hold B * ceil(log_B N) elements, and every list entry
/// carries prev(e). A query walks R(left child) of the highest range
/// ancestor and then L(right child), keeping only entries with prev(e) < a.
/// This emits each color exactly once without a duplicate filter. When the
/// range covers a full list to its end, the answer is at least as large as
/// the list. The query then answers from the values region or from a global
/// search tree over (e, prev(e)), whichever needs fewer blocks.
class EmIndex {
 public:
  static constexpr std::uint16_t kFormatVersion = 1;

  EmIndex() = default;
  EmIndex(std::span<const ColoredPoint> sorted, std::size_t block_size);

  /// The emission stream, which is the answer. `scratch.raw` receives the
  /// same colors; the meter is charged, not reset.
  std::vector<ColorId> query(Range q, QueryScratch& scratch) const;
  std::vector<ColorId> query(Range q) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static EmIndex load(std::istream& in);
  static EmIndex load_file(const std::string& path);

  std::size_t size() const noexcept { return n_; }
  std::size_t block_size() const noexcept { return store_.block_size(); }
  std::size_t colors() const noexcept { return colors_; }
  std::size_t capacity() const noexcept { return cap_; }
  std::size_t leaf_count() const noexcept { return leaves_; }
  const BlockStore& store() const noexcept { return store_; }
  /// LRU cache size used by later queries; 0 (the default) keeps only the
  /// one-block buffer.
  void set_cache_blocks(std::size_t blocks) noexcept { cache_blocks_ = blocks; }

  /// Empty when the stored lists are ordered (L ascending, R descending),
  /// within capacity and color-distinct, and the directory is consistent.
  std::string audit() const;

  bool operator==(const EmIndex& o) const {
    return n_ == o.n_ && colors_ == o.colors_ && store_ == o.store_;
  }

 private:
  struct Directory {
    std::uint64_t n = 0, colors = 0, cap = 0, leaves = 0, nodes = 0, root = 0;
    std::uint64_t values = 0, node_recs = 0, leaf_dir = 0, kpool = 0, lists = 0;
    std::uint64_t global_pst = 0, global_nodes = 0, global_root_y = 0;
  };

  void read_directory();
  std::size_t pst_node_record(std::size_t base, std::size_t i) const;
  /// [a,b] x [0,a) on a blocked search tree, reading each block once.
  void scan_values(BlockReader& rd, std::size_t from, std::size_t to, Range q, QueryScratch& s) const;
  void pst_query(BlockReader& rd, std::size_t base, std::size_t count, std::uint64_t root_y,
                 Range q, std::vector<ColorId>& out) const;

  BlockStore store_;
  Directory dir_;
  std::size_t n_ = 0, colors_ = 0, cap_ = 1, leaves_ = 0;
  std::size_t cache_blocks_ = 0;
};

}  // namespace crr
