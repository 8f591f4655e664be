#pragma once
// Multi-index engine over disjoint substrings: one direct-address table per
// substring, exact r-neighbor search, exact progressive k-nearest search.
//
// Why it is exact: if two codes differ in at most r bits and the positions are
// split into m disjoint substrings, some substring differs in at most floor(r/m)
// bits (pigeonhole). Sharper, with r = m*r' + a: either one of the first a+1
// substrings differs in at most r' bits, or one of the remaining m-a-1 differs
// in at most r'-1 (otherwise the total would be at least m*r' + a + 1). So probing
// ball(r') in the first a+1 tables and ball(r'-1) in the rest retrieves a superset
// of every r-neighbor, and full-width distances cull the rest.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mih/codes.hpp"
#include "mih/enumerate.hpp"
#include "mih/scan.hpp"
#include "mih/table.hpp"

namespace mih {

// r = m*r_sub + a with 0 <= a < m. Tables 0..a get radius r_sub, the rest
// r_sub - 1; a table whose radius would be -1 is skipped entirely.
struct RadiusSplit {
  uint32_t r = 0;
  uint32_t m = 1;
  uint32_t r_sub = 0;
  uint32_t a = 0;

  // Search radius for table j, or -1 if the table is skipped.
  int32_t table_radius(uint32_t j) const {
    return j <= a ? static_cast<int32_t>(r_sub) : static_cast<int32_t>(r_sub) - 1;
  }
};

inline RadiusSplit split_radius(uint32_t r, uint32_t m) {
  if (m == 0) throw std::invalid_argument("split_radius: need at least one substring");
  return {r, m, r / m, r % m};
}

struct SearchTrace {
  uint64_t lookups = 0;                // buckets probed
  uint64_t candidates = 0;             // ids retrieved, before duplicate suppression
  uint64_t unique_candidates = 0;      // distinct ids retrieved
  uint64_t distance_evaluations = 0;   // always equals unique_candidates
  uint32_t final_radius = 0;           // kNN only: completed guarantee radius
};

// Per-query scratch, reusable across queries and indexes. The mark bitmap is
// zero outside a query; queries clear exactly the bits they set.
class SearchScratch {
 public:
  void ensure(uint64_t n, uint32_t bits) {
    if (marks_.size() < (n + 63) / 64) marks_.resize((n + 63) / 64, 0);
    if (bins_.size() < size_t{bits} + 1) {
      bins_.resize(bits + 1);
      counts_.resize(bits + 1, 0);
    }
    touched_.clear();
  }

  bool marked(uint32_t id) const { return (marks_[id >> 6] >> (id & 63)) & 1u; }
  void mark(uint32_t id) {
    marks_[id >> 6] |= uint64_t{1} << (id & 63);
    touched_.push_back(id);
  }
  const std::vector<uint32_t>& touched() const { return touched_; }

  void clear_marks() {
    for (uint32_t id : touched_) marks_[id >> 6] &= ~(uint64_t{1} << (id & 63));
    touched_.clear();
  }

  std::vector<std::vector<uint32_t>>& bins() { return bins_; }
  std::vector<uint64_t>& counts() { return counts_; }
  std::vector<uint32_t>& used_bins() { return used_bins_; }

  void clear_bins() {
    for (uint32_t d : used_bins_) {
      bins_[d].clear();
      counts_[d] = 0;
    }
    used_bins_.clear();
  }

 private:
  std::vector<uint64_t> marks_;
  std::vector<uint32_t> touched_;
  std::vector<std::vector<uint32_t>> bins_;
  std::vector<uint64_t> counts_;
  std::vector<uint32_t> used_bins_;
};

class MihIndex {
 public:
  // One table per substring, keyed on that substring's value for every code.
  static MihIndex build(CodeDatabase db, Partition partition) {
    if (partition.bits() != db.bits())
      throw std::invalid_argument("MihIndex::build: partition width does not match codes");
    MihIndex idx(std::move(db), std::move(partition));
    const uint32_t m = idx.partition_.m();
    idx.tables_.reserve(m);
    for (uint32_t j = 0; j < m; ++j) {
      if (idx.partition_.length(j) > kMaxTableBits)
        throw std::invalid_argument(
            "MihIndex::build: substring " + std::to_string(j) + " is " +
            std::to_string(idx.partition_.length(j)) + " bits; direct addressing supports at most " +
            std::to_string(kMaxTableBits) + " (use more substrings)");
      std::vector<std::pair<uint64_t, uint32_t>> pairs;
      pairs.reserve(idx.db_.size());
      for (uint64_t i = 0; i < idx.db_.size(); ++i)
        pairs.emplace_back(extract_substring(idx.db_.code(i), idx.partition_, j),
                           static_cast<uint32_t>(i));
      idx.tables_.push_back(SubstringTable::build(idx.partition_.length(j), std::move(pairs)));
    }
    return idx;
  }

  // io.hpp rebuilds indexes from parts; the same invariants are re-checked.
  static MihIndex assemble(CodeDatabase db, Partition partition,
                           std::vector<SubstringTable> tables) {
    if (partition.bits() != db.bits())
      throw std::invalid_argument("MihIndex: partition width does not match codes");
    if (tables.size() != partition.m())
      throw std::invalid_argument("MihIndex: table count does not match partition");
    for (uint32_t j = 0; j < tables.size(); ++j) {
      if (tables[j].s() != partition.length(j))
        throw std::invalid_argument("MihIndex: table " + std::to_string(j) +
                                    " width does not match its substring");
      if (tables[j].size() != db.size())
        throw std::invalid_argument("MihIndex: table " + std::to_string(j) +
                                    " entry count does not match the database");
    }
    MihIndex idx(std::move(db), std::move(partition));
    idx.tables_ = std::move(tables);
    return idx;
  }

  const CodeDatabase& db() const { return db_; }
  const Partition& partition() const { return partition_; }
  uint32_t num_tables() const { return static_cast<uint32_t>(tables_.size()); }
  const SubstringTable& table(uint32_t j) const { return tables_[j]; }

  // Exactly {(i, d_i) : d_i <= r}, sorted by (distance, id).
  Neighbors range_search(BinaryCode q, uint32_t r, SearchTrace* trace = nullptr,
                         SearchScratch* scratch = nullptr) const {
    if (q.bits != db_.bits()) throw std::invalid_argument("range_search: query width mismatch");
    if (r > db_.bits()) throw std::invalid_argument("range_search: radius exceeds code width");
    SearchScratch local;
    SearchScratch& sc = scratch ? *scratch : local;
    sc.ensure(db_.size(), db_.bits());
    SearchTrace tr;

    const RadiusSplit split = split_radius(r, partition_.m());
    for (uint32_t j = 0; j < partition_.m(); ++j) {
      const int32_t rj = split.table_radius(j);
      if (rj < 0) continue;
      const uint32_t sj = partition_.length(j);
      // Substring radii never exceed the substring width: r <= bits and
      // r_sub = r/m <= bits/m <= s_j for balanced partitions.
      const uint64_t sub_q = extract_substring(q, partition_, j);
      BallEnumerator ball({sj, sub_q, static_cast<uint32_t>(rj)});
      probe_all(ball, tables_[j], sc, tr);
    }

    Neighbors out;
    cull(q, r, sc, tr, out);
    sc.clear_marks();
    std::sort(out.begin(), out.end(), neighbor_less);
    if (trace) *trace = tr;
    return out;
  }

  // The k smallest (distance, id) pairs, identical to scan_knn's output.
  //
  // Progressive widening: full-code radius r steps 0,1,2,...; the step with
  // r = m*r' + a probes ring r' of table a. After step r every code within
  // distance r has been seen (the superset argument above applied to the
  // cumulative probes), so once the bins below the current r hold k ids the
  // top-k distance multiset is settled.
  Neighbors knn_search(BinaryCode q, uint32_t k, SearchTrace* trace = nullptr,
                       SearchScratch* scratch = nullptr) const {
    if (q.bits != db_.bits()) throw std::invalid_argument("knn_search: query width mismatch");
    if (k > db_.size()) throw std::invalid_argument("knn_search: k exceeds database size");
    SearchTrace tr;
    Neighbors out;
    if (k == 0) {
      if (trace) *trace = tr;
      return out;
    }
    SearchScratch local;
    SearchScratch& sc = scratch ? *scratch : local;
    sc.ensure(db_.size(), db_.bits());

    const uint32_t m = partition_.m();
    const uint32_t b = db_.bits();
    std::vector<uint64_t> sub_q(m);
    for (uint32_t j = 0; j < m; ++j) sub_q[j] = extract_substring(q, partition_, j);

    auto& bins = sc.bins();
    auto& counts = sc.counts();
    uint64_t settled = 0;  // sum of |bins[d]| for d < r; final once step d ran
    uint32_t r = 0;
    while (true) {
      if (settled >= k) break;
      assert(r <= b && "k <= n guarantees termination by radius b");
      const uint32_t r_sub = r / m, a = r % m;
      const uint32_t sj = partition_.length(a);
      RingEnumerator ring({sj, sub_q[a], r_sub});
      uint64_t v;
      while (ring.next(v)) {
        ++tr.lookups;
        const auto seg = tables_[a].probe(v);
        tr.candidates += seg.size();
        for (uint32_t id : seg) {
          if (sc.marked(id)) continue;
          sc.mark(id);
          const uint32_t d =
              detail::hamming_words(q.words, db_.raw_words().data() + uint64_t{id} * db_.words_per_entry(),
                                    db_.words_per_entry());
          // A code first reachable at step r is at full distance >= r.
          assert(d >= r);
          if (bins[d].empty()) sc.used_bins().push_back(d);
          bins[d].push_back(id);
          ++counts[d];
        }
      }
      settled += counts[r];  // ring r' of table a was the last probe completing radius r
      ++r;
    }
    tr.final_radius = r - 1;
    tr.unique_candidates = sc.touched().size();
    tr.distance_evaluations = tr.unique_candidates;

    out.reserve(k);
    for (uint32_t d = 0; d <= b && out.size() < k; ++d) {
      if (counts[d] == 0) continue;
      auto& bin = bins[d];
      std::sort(bin.begin(), bin.end());
      for (uint32_t id : bin) {
        if (out.size() == k) break;
        out.push_back({id, d});
      }
    }
    sc.clear_marks();
    sc.clear_bins();
    if (trace) *trace = tr;
    return out;
  }

 private:
  MihIndex(CodeDatabase db, Partition partition)
      : db_(std::move(db)), partition_(std::move(partition)) {}

  void probe_all(BallEnumerator& ball, const SubstringTable& table, SearchScratch& sc,
                 SearchTrace& tr) const {
    uint64_t v;
    while (ball.next(v)) {
      ++tr.lookups;
      const auto seg = table.probe(v);
      tr.candidates += seg.size();
      for (uint32_t id : seg)
        if (!sc.marked(id)) sc.mark(id);
    }
  }

  void cull(BinaryCode q, uint32_t r, SearchScratch& sc, SearchTrace& tr, Neighbors& out) const {
    const uint32_t wpc = db_.words_per_entry();
    const uint64_t* base = db_.raw_words().data();
    tr.unique_candidates = sc.touched().size();
    tr.distance_evaluations = tr.unique_candidates;
    for (uint32_t id : sc.touched()) {
      const uint32_t d = detail::hamming_words(q.words, base + uint64_t{id} * wpc, wpc);
      if (d <= r) out.push_back({id, d});
    }
  }

  CodeDatabase db_;
  Partition partition_;
  std::vector<SubstringTable> tables_;
};

inline MihIndex build_index(CodeDatabase db, Partition partition) {
  return MihIndex::build(std::move(db), std::move(partition));
}

}  // namespace mih
