#pragma once
// Sparse direct-address table from s-bit substring values to 32-bit code ids.
//
// Buckets are grouped 32 at a time. Each group carries a 32-bit occupancy mask and
// a 32-bit offset into a single per-table arena. A group's arena block holds the
// group-local segment starts for its non-empty buckets (c+1 of them, last one a
// terminator) followed by the group's entries, ordered by bucket index. A probe is
// O(1): occupancy bit test, popcount rank into the starts, segment slice.
//
// A one-bit-per-group summary bitmap fronts the mask array. It is purely an
// acceleration (the mask probe alone is already correct): for very sparse wide
// tables it keeps the hot working set ~96x smaller than the mask+offset arrays.
//
// Group arrays for wide tables are calloc-backed so untouched pages stay on the
// kernel's shared zero page; "constant-time initialization" is plain lazy zeroing.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mih {

// Widest substring a table will direct-address (2^32 buckets).
inline constexpr uint32_t kMaxTableBits = 32;

struct TableStats {
  uint64_t non_empty_buckets = 0;
  uint64_t max_bucket_size = 0;
  uint64_t total_entries = 0;
  uint64_t estimated_bytes = 0;

  // Reference accounting model: 12 bytes per group (mask + block pointer) whether
  // or not it is used, 12 more for each group that has content, 4 per non-empty
  // bucket (segment start), 4 per entry (id).
  static uint64_t estimate_bytes(uint32_t s, uint64_t non_empty_groups,
                                 uint64_t non_empty_buckets, uint64_t total_entries) {
    const uint64_t groups = uint64_t{1} << (s >= 5 ? s - 5 : 0);
    return groups * 12 + non_empty_groups * 12 + non_empty_buckets * 4 + total_entries * 4;
  }
};

namespace detail {

// Large zero-initialized array; calloc keeps unwritten pages lazily mapped.
template <typename T>
class ZeroedArray {
 public:
  ZeroedArray() = default;
  explicit ZeroedArray(uint64_t n) : n_(n) {
    if (n == 0) return;
    p_ = static_cast<T*>(std::calloc(n, sizeof(T)));
    if (!p_) throw std::bad_alloc();
  }
  ZeroedArray(ZeroedArray&& o) noexcept : p_(o.p_), n_(o.n_) { o.p_ = nullptr; o.n_ = 0; }
  ZeroedArray& operator=(ZeroedArray&& o) noexcept {
    if (this != &o) {
      std::free(p_);
      p_ = o.p_; n_ = o.n_;
      o.p_ = nullptr; o.n_ = 0;
    }
    return *this;
  }
  ZeroedArray(const ZeroedArray&) = delete;
  ZeroedArray& operator=(const ZeroedArray&) = delete;
  ~ZeroedArray() { std::free(p_); }

  T& operator[](uint64_t i) { return p_[i]; }
  const T& operator[](uint64_t i) const { return p_[i]; }
  uint64_t size() const { return n_; }

 private:
  T* p_ = nullptr;
  uint64_t n_ = 0;
};

}  // namespace detail

class SubstringTable {
 public:
  SubstringTable() = default;

  // Two-pass deterministic build: stable sort by bucket value (keeps insertion
  // order within a bucket), then lay groups out in ascending order.
  static SubstringTable build(uint32_t s, std::vector<std::pair<uint64_t, uint32_t>> pairs) {
    check_width(s);
    const uint64_t limit = bucket_count(s);
    for (const auto& [v, id] : pairs)
      if (v >= limit)
        throw std::invalid_argument("SubstringTable::build: value " + std::to_string(v) +
                                    " does not fit in " + std::to_string(s) + " bits");
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    SubstringTable t;
    t.s_ = s;
    t.n_ = pairs.size();
    t.num_groups_ = (limit + 31) / 32;
    t.masks_ = detail::ZeroedArray<uint32_t>(t.num_groups_);
    t.block_off_ = detail::ZeroedArray<uint32_t>(t.num_groups_);
    t.summary_ = detail::ZeroedArray<uint64_t>((t.num_groups_ + 63) / 64);

    // First pass over the sorted pairs: occupancy masks and per-group sizes.
    uint64_t non_empty_buckets = 0, non_empty_groups = 0, arena_size = 0;
    for (size_t i = 0; i < pairs.size();) {
      const uint64_t g = pairs[i].first >> 5;
      size_t gi = i;
      uint32_t mask = 0;
      while (gi < pairs.size() && (pairs[gi].first >> 5) == g) {
        const uint64_t v = pairs[gi].first;
        size_t run = gi;
        while (run < pairs.size() && pairs[run].first == v) ++run;
        mask |= uint32_t{1} << (v & 31);
        t.max_bucket_ = std::max<uint64_t>(t.max_bucket_, run - gi);
        ++non_empty_buckets;
        gi = run;
      }
      t.masks_[g] = mask;
      t.summary_[g >> 6] |= uint64_t{1} << (g & 63);
      ++non_empty_groups;
      arena_size += static_cast<uint64_t>(std::popcount(mask)) + 1 + (gi - i);
      i = gi;
    }
    t.non_empty_buckets_ = non_empty_buckets;
    t.non_empty_groups_ = non_empty_groups;
    if (arena_size >> 32)
      throw std::invalid_argument("SubstringTable::build: table content exceeds 2^32 arena slots");
    t.arena_.reserve(arena_size);

    // Second pass: emit each group's block (starts, then entries).
    for (size_t i = 0; i < pairs.size();) {
      const uint64_t g = pairs[i].first >> 5;
      t.block_off_[g] = static_cast<uint32_t>(t.arena_.size());
      const uint32_t c = static_cast<uint32_t>(std::popcount(t.masks_[g]));
      const size_t starts_at = t.arena_.size();
      t.arena_.resize(starts_at + c + 1);
      uint32_t bucket_idx = 0, emitted = 0;
      size_t gi = i;
      while (gi < pairs.size() && (pairs[gi].first >> 5) == g) {
        const uint64_t v = pairs[gi].first;
        t.arena_[starts_at + bucket_idx] = emitted;
        while (gi < pairs.size() && pairs[gi].first == v) {
          t.arena_.push_back(pairs[gi].second);
          ++emitted;
          ++gi;
        }
        ++bucket_idx;
      }
      t.arena_[starts_at + c] = emitted;
      i = gi;
    }
    return t;
  }

  uint32_t s() const { return s_; }
  uint64_t size() const { return n_; }
  uint64_t num_groups() const { return num_groups_; }
  uint64_t non_empty_buckets() const { return non_empty_buckets_; }
  uint64_t non_empty_groups() const { return non_empty_groups_; }
  uint64_t max_bucket_size() const { return max_bucket_; }

  // Checked public probe.
  std::span<const uint32_t> bucket_lookup(uint64_t value) const {
    if (s_ == 0) throw std::logic_error("SubstringTable: not built");
    if (value >= bucket_count(s_))
      throw std::invalid_argument("bucket_lookup: value " + std::to_string(value) +
                                  " does not fit in " + std::to_string(s_) + " bits");
    return probe(value);
  }

  // Unchecked probe; value < 2^s by construction at call sites.
  std::span<const uint32_t> probe(uint64_t value) const {
    const uint64_t g = value >> 5;
    if (!((summary_[g >> 6] >> (g & 63)) & 1u)) return {};
    const uint32_t mask = masks_[g];
    const uint32_t t = static_cast<uint32_t>(value & 31);
    if (!((mask >> t) & 1u)) return {};
    const uint32_t rank = static_cast<uint32_t>(std::popcount(mask & ((uint32_t{1} << t) - 1)));
    const uint32_t c = static_cast<uint32_t>(std::popcount(mask));
    const uint32_t* blk = arena_.data() + block_off_[g];
    return {blk + c + 1 + blk[rank], blk[rank + 1] - blk[rank]};
  }

  TableStats stats() const {
    TableStats st;
    st.non_empty_buckets = non_empty_buckets_;
    st.max_bucket_size = max_bucket_;
    st.total_entries = n_;
    st.estimated_bytes = TableStats::estimate_bytes(s_, non_empty_groups_, non_empty_buckets_, n_);
    return st;
  }

  // --- serialization support -------------------------------------------------

  uint32_t group_mask(uint64_t g) const { return masks_[g]; }

  // The raw arena block for a non-empty group: c+1 starts then the entries.
  std::span<const uint32_t> group_block(uint64_t g) const {
    const uint32_t c = static_cast<uint32_t>(std::popcount(masks_[g]));
    const uint32_t* blk = arena_.data() + block_off_[g];
    return {blk, c + 1 + blk[c]};
  }

  template <typename Fn>  // Fn(group_id, mask, block_span), ascending group id
  void for_each_non_empty_group(Fn&& fn) const {
    for (uint64_t w = 0; w < summary_.size(); ++w) {
      uint64_t bits = summary_[w];
      while (bits) {
        const uint64_t g = (w << 6) + static_cast<uint32_t>(std::countr_zero(bits));
        bits &= bits - 1;
        fn(g, masks_[g], group_block(g));
      }
    }
  }

  // Rebuild from serialized (group id, mask, block) records, ascending by group.
  // Validates structure; throws std::invalid_argument on any inconsistency.
  static SubstringTable from_groups(
      uint32_t s, uint64_t total_entries,
      const std::vector<std::tuple<uint64_t, uint32_t, std::vector<uint32_t>>>& groups) {
    check_width(s);
    SubstringTable t;
    t.s_ = s;
    t.num_groups_ = (bucket_count(s) + 31) / 32;
    t.masks_ = detail::ZeroedArray<uint32_t>(t.num_groups_);
    t.block_off_ = detail::ZeroedArray<uint32_t>(t.num_groups_);
    t.summary_ = detail::ZeroedArray<uint64_t>((t.num_groups_ + 63) / 64);
    uint64_t prev_g = 0;
    bool first = true;
    uint64_t entries = 0;
    for (const auto& [g, mask, block] : groups) {
      if (g >= t.num_groups_) throw std::invalid_argument("table group id out of range");
      if (!first && g <= prev_g) throw std::invalid_argument("table group ids not ascending");
      if (mask == 0) throw std::invalid_argument("empty group in table serialization");
      const uint32_t c = static_cast<uint32_t>(std::popcount(mask));
      if (block.size() < c + 1) throw std::invalid_argument("table group block truncated");
      const uint32_t e = block[c];
      if (block.size() != uint64_t{c} + 1 + e)
        throw std::invalid_argument("table group block size mismatch");
      if (block[0] != 0) throw std::invalid_argument("table group starts must begin at 0");
      for (uint32_t i = 0; i < c; ++i)
        if (block[i] > block[i + 1]) throw std::invalid_argument("table group starts not monotone");
      if (t.arena_.size() + block.size() > (uint64_t{1} << 32))
        throw std::invalid_argument("table arena exceeds 2^32 slots");
      t.masks_[g] = mask;
      t.summary_[g >> 6] |= uint64_t{1} << (g & 63);
      t.block_off_[g] = static_cast<uint32_t>(t.arena_.size());
      t.arena_.insert(t.arena_.end(), block.begin(), block.end());
      uint32_t group_max = 0;
      for (uint32_t i = 0; i < c; ++i) group_max = std::max(group_max, block[i + 1] - block[i]);
      t.max_bucket_ = std::max<uint64_t>(t.max_bucket_, group_max);
      t.non_empty_buckets_ += c;
      ++t.non_empty_groups_;
      entries += e;
      prev_g = g;
      first = false;
    }
    if (entries != total_entries)
      throw std::invalid_argument("table entry count mismatch: header says " +
                                  std::to_string(total_entries) + ", groups hold " +
                                  std::to_string(entries));
    t.n_ = entries;
    return t;
  }

 private:
  static void check_width(uint32_t s) {
    if (s == 0 || s > kMaxTableBits)
      throw std::invalid_argument("SubstringTable: key width must be in [1, " +
                                  std::to_string(kMaxTableBits) + "], got " + std::to_string(s));
  }
  static uint64_t bucket_count(uint32_t s) { return uint64_t{1} << s; }

  uint32_t s_ = 0;
  uint64_t n_ = 0;
  uint64_t num_groups_ = 0;
  uint64_t non_empty_buckets_ = 0;
  uint64_t non_empty_groups_ = 0;
  uint64_t max_bucket_ = 0;
  detail::ZeroedArray<uint32_t> masks_;
  detail::ZeroedArray<uint32_t> block_off_;
  detail::ZeroedArray<uint64_t> summary_;
  std::vector<uint32_t> arena_;
};

// Convenience wrappers matching the operation names used throughout.
inline SubstringTable build_table(uint32_t s, std::vector<std::pair<uint64_t, uint32_t>> pairs) {
  return SubstringTable::build(s, std::move(pairs));
}
inline std::span<const uint32_t> bucket_lookup(const SubstringTable& t, uint64_t value) {
  return t.bucket_lookup(value);
}
inline TableStats table_stats(const SubstringTable& t) { return t.stats(); }

}  // namespace mih
