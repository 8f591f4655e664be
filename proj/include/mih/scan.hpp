#pragma once
// Exhaustive linear-scan search: the correctness oracle and the speed baseline.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "mih/codes.hpp"

namespace mih {

struct Neighbor {
  uint32_t id = 0;
  uint32_t dist = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Ordered (distance, id), ids distinct.
using Neighbors = std::vector<Neighbor>;

inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
}

// All ids within distance r of q, sorted by (distance, id).
inline Neighbors scan_range(const CodeDatabase& db, BinaryCode q, uint32_t r) {
  if (q.bits != db.bits()) throw std::invalid_argument("scan_range: query width mismatch");
  const uint32_t wpc = db.words_per_entry();
  const uint64_t* base = db.raw_words().data();
  Neighbors out;
  for (uint64_t i = 0; i < db.size(); ++i) {
    const uint32_t d = detail::hamming_words(q.words, base + i * wpc, wpc);
    if (d <= r) out.push_back({static_cast<uint32_t>(i), d});
  }
  std::sort(out.begin(), out.end(), neighbor_less);
  return out;
}

// The k smallest (distance, id) pairs; ties at the cut go to smaller ids.
inline Neighbors scan_knn(const CodeDatabase& db, BinaryCode q, uint32_t k) {
  if (q.bits != db.bits()) throw std::invalid_argument("scan_knn: query width mismatch");
  if (k > db.size()) throw std::invalid_argument("scan_knn: k exceeds database size");
  if (k == 0) return {};
  const uint32_t wpc = db.words_per_entry();
  const uint64_t* base = db.raw_words().data();
  // Bounded selection: max-heap of the k best seen so far.
  auto worse = [](const Neighbor& a, const Neighbor& b) { return neighbor_less(a, b); };
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> heap(worse);
  for (uint64_t i = 0; i < db.size(); ++i) {
    const uint32_t d = detail::hamming_words(q.words, base + i * wpc, wpc);
    const Neighbor cand{static_cast<uint32_t>(i), d};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (neighbor_less(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
  }
  Neighbors out(heap.size());
  for (size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

}  // namespace mih
