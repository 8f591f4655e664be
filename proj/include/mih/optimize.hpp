#pragma once
// Greedy correlation-driven assignment of bit positions to substrings.
//
// Highly correlated bits concentrated in one substring make its table's bucket
// occupancy lumpy, which inflates candidate counts. The greedy rule spreads
// correlated bits apart: each substring repeatedly receives the unused bit whose
// worst-case correlation with the bits it already owns is smallest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mih/codes.hpp"

namespace mih {

// Absolute pairwise correlations between bit positions; diagonal 1. Bits with
// zero variance in the estimation sample carry 0 against every other bit.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(uint32_t bits)
      : bits_(bits), m_(uint64_t{bits} * bits, 0.0), constant_(bits, 0) {
    for (uint32_t i = 0; i < bits; ++i) set(i, i, 1.0);
  }

  uint32_t bits() const { return bits_; }
  double at(uint32_t i, uint32_t j) const { return m_[uint64_t{i} * bits_ + j]; }
  void set(uint32_t i, uint32_t j, double v) {
    m_[uint64_t{i} * bits_ + j] = v;
    m_[uint64_t{j} * bits_ + i] = v;
  }

  bool is_constant(uint32_t i) const { return constant_[i] != 0; }
  void set_constant(uint32_t i) { constant_[i] = 1; }

 private:
  uint32_t bits_;
  std::vector<double> m_;
  std::vector<char> constant_;
};

// |Pearson| between every pair of bit positions over the sample. Bit columns are
// transposed into packed bitsets so each pair costs popcounts over n/64 words.
inline CorrelationMatrix estimate_correlations(const CodeDatabase& sample) {
  const uint64_t n = sample.size();
  if (n < 2) throw std::invalid_argument("estimate_correlations: need at least 2 codes");
  const uint32_t b = sample.bits();
  const uint64_t col_words = (n + 63) / 64;
  std::vector<uint64_t> cols(uint64_t{b} * col_words, 0);
  for (uint64_t i = 0; i < n; ++i) {
    const BinaryCode c = sample.code(i);
    for (uint32_t pos = 0; pos < b; ++pos)
      if (c.bit(pos)) cols[uint64_t{pos} * col_words + (i >> 6)] |= uint64_t{1} << (i & 63);
  }
  auto count_ones = [&](uint32_t pos) {
    uint64_t c = 0;
    for (uint64_t w = 0; w < col_words; ++w)
      c += std::popcount(cols[uint64_t{pos} * col_words + w]);
    return c;
  };
  auto count_and = [&](uint32_t p, uint32_t q) {
    uint64_t c = 0;
    const uint64_t *a = cols.data() + uint64_t{p} * col_words,
                   *bb = cols.data() + uint64_t{q} * col_words;
    for (uint64_t w = 0; w < col_words; ++w) c += std::popcount(a[w] & bb[w]);
    return c;
  };

  CorrelationMatrix corr(b);
  std::vector<uint64_t> ones(b);
  std::vector<double> var(b);
  for (uint32_t i = 0; i < b; ++i) {
    ones[i] = count_ones(i);
    const double p = static_cast<double>(ones[i]) / n;
    var[i] = p * (1.0 - p);
    if (ones[i] == 0 || ones[i] == n) corr.set_constant(i);
  }
  for (uint32_t i = 0; i < b; ++i) {
    for (uint32_t j = i + 1; j < b; ++j) {
      if (var[i] == 0.0 || var[j] == 0.0) continue;  // stays 0
      const double pi = static_cast<double>(ones[i]) / n;
      const double pj = static_cast<double>(ones[j]) / n;
      const double pij = static_cast<double>(count_and(i, j)) / n;
      const double c = std::fabs(pij - pi * pj) / std::sqrt(var[i] * var[j]);
      corr.set(i, j, std::min(c, 1.0));
    }
  }
  return corr;
}

// Greedy assignment:
//   init: a seed-chosen bit opens substring 0; substring j then opens with the
//         unassigned bit most correlated with substring j-1's opener.
//   rounds: cycle substrings with spare capacity; each visit takes the unused bit
//         whose maximum correlation with the substring's current bits is minimal.
// Ties always go to the lowest bit index. Constant bits join last, round-robin.
// Capacities are the balanced sizes, extras on the lowest-indexed substrings.
inline Partition greedy_assign(const CorrelationMatrix& corr, uint32_t m, uint64_t seed) {
  const uint32_t b = corr.bits();
  if (m == 0 || m > b) throw std::invalid_argument("greedy_assign: need 1 <= m <= bits");

  std::vector<uint32_t> cap(m, b / m);
  for (uint32_t j = 0; j < b % m; ++j) ++cap[j];
  std::vector<std::vector<uint32_t>> subs(m);

  std::vector<uint32_t> pool;  // non-constant, unassigned
  std::vector<uint32_t> constants;
  for (uint32_t i = 0; i < b; ++i)
    (corr.is_constant(i) ? constants : pool).push_back(i);

  // Chain initialization over the non-constant pool.
  auto take = [&](std::vector<uint32_t>& from, uint32_t value) {
    from.erase(std::find(from.begin(), from.end(), value));
  };
  if (!pool.empty()) {
    std::mt19937_64 rng(seed);
    const uint32_t first =
        pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
    subs[0].push_back(first);
    take(pool, first);
    for (uint32_t j = 1; j < m && !pool.empty(); ++j) {
      const uint32_t prev = subs[j - 1].empty() ? first : subs[j - 1].front();
      uint32_t best = pool.front();
      double best_c = -1.0;
      for (uint32_t cand : pool) {
        const double c = corr.at(cand, prev);
        if (c > best_c) {
          best_c = c;
          best = cand;
        }
      }
      subs[j].push_back(best);
      take(pool, best);
    }
  }

  // Assignment rounds.
  while (!pool.empty()) {
    bool any = false;
    for (uint32_t j = 0; j < m && !pool.empty(); ++j) {
      if (subs[j].size() >= cap[j]) continue;
      any = true;
      uint32_t best = pool.front();
      double best_worst = 2.0;
      for (uint32_t cand : pool) {
        double worst = 0.0;
        for (uint32_t owned : subs[j]) worst = std::max(worst, corr.at(cand, owned));
        if (worst < best_worst) {
          best_worst = worst;
          best = cand;
        }
      }
      subs[j].push_back(best);
      take(pool, best);
    }
    if (!any) break;  // capacities exhausted; cannot happen with balanced caps
  }

  // Constant bits last, round-robin over remaining capacity.
  uint32_t j = 0;
  for (uint32_t bit : constants) {
    while (subs[j].size() >= cap[j]) j = (j + 1) % m;
    subs[j].push_back(bit);
    j = (j + 1) % m;
  }

  for (auto& sub : subs) std::sort(sub.begin(), sub.end());
  return Partition(b, std::move(subs));
}

}  // namespace mih
