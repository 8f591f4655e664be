#pragma once
// Packed binary codes, Hamming distance, and bit-position partitions.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace mih {

// Generous hard cap; keeps header sizes and partition tables sane.
inline constexpr uint32_t kMaxCodeBits = 4096;

constexpr uint32_t words_per_code(uint32_t bits) { return (bits + 63) / 64; }

// Mask covering the valid bits of the last storage word (all-ones if bits % 64 == 0).
constexpr uint64_t last_word_mask(uint32_t bits) {
  const uint32_t used = bits & 63;
  return used == 0 ? ~uint64_t{0} : (uint64_t{1} << used) - 1;
}

// Non-owning view of one code. Bit i lives at word i/64, bit i%64 (LSB-first);
// bits past position bits-1 are zero in the packed words.
struct BinaryCode {
  const uint64_t* words = nullptr;
  uint32_t bits = 0;

  bool bit(uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }
};

namespace detail {

// Unchecked distance over pre-validated equal-width codes; the hot loop everywhere.
inline uint32_t hamming_words(const uint64_t* a, const uint64_t* b, uint32_t nwords) {
  uint32_t d = 0;
  for (uint32_t w = 0; w < nwords; ++w) d += static_cast<uint32_t>(std::popcount(a[w] ^ b[w]));
  return d;
}

}  // namespace detail

inline uint32_t hamming_distance(BinaryCode a, BinaryCode b) {
  if (a.bits != b.bits)
    throw std::invalid_argument("hamming_distance: code widths differ (" + std::to_string(a.bits) +
                                " vs " + std::to_string(b.bits) + ")");
  return detail::hamming_words(a.words, b.words, words_per_code(a.bits));
}

// Flat, append-only store of n equal-width codes; a code's id is its position.
class CodeDatabase {
 public:
  CodeDatabase() = default;
  explicit CodeDatabase(uint32_t bits) { reset(bits); }

  static CodeDatabase zeros(uint32_t bits, uint64_t n) {
    CodeDatabase db(bits);
    check_count(n);
    db.n_ = n;
    db.words_.assign(n * words_per_code(bits), 0);
    return db;
  }

  void reset(uint32_t bits) {
    if (bits == 0 || bits > kMaxCodeBits)
      throw std::invalid_argument("CodeDatabase: code width must be in [1, " +
                                  std::to_string(kMaxCodeBits) + "], got " + std::to_string(bits));
    bits_ = bits;
    n_ = 0;
    words_.clear();
  }

  uint32_t bits() const { return bits_; }
  uint64_t size() const { return n_; }
  uint32_t words_per_entry() const { return words_per_code(bits_); }

  BinaryCode code(uint64_t i) const { return {words_.data() + i * words_per_entry(), bits_}; }

  void append(BinaryCode c) {
    if (c.bits != bits_) throw std::invalid_argument("CodeDatabase::append: width mismatch");
    append_words(c.words);
  }

  // Caller supplies words_per_entry() little-endian words; padding bits must be zero.
  void append_words(const uint64_t* w) {
    check_count(n_ + 1);
    const uint32_t wpc = words_per_entry();
    if ((w[wpc - 1] & ~last_word_mask(bits_)) != 0)
      throw std::invalid_argument("CodeDatabase::append: nonzero padding bits");
    words_.insert(words_.end(), w, w + wpc);
    ++n_;
  }

  uint64_t* mutable_words(uint64_t i) { return words_.data() + i * words_per_entry(); }
  const std::vector<uint64_t>& raw_words() const { return words_; }

  void set_bit(uint64_t i, uint32_t pos, bool v) {
    uint64_t& w = words_[i * words_per_entry() + (pos >> 6)];
    const uint64_t m = uint64_t{1} << (pos & 63);
    w = v ? (w | m) : (w & ~m);
  }

  bool operator==(const CodeDatabase& o) const {
    return bits_ == o.bits_ && n_ == o.n_ && words_ == o.words_;
  }

 private:
  static void check_count(uint64_t n) {
    // ids are 32-bit
    if (n > (uint64_t{1} << 32))
      throw std::invalid_argument("CodeDatabase: at most 2^32 codes supported");
  }

  uint32_t bits_ = 0;
  uint64_t n_ = 0;
  std::vector<uint64_t> words_;
};

// Assignment of bit positions {0..bits-1} to m disjoint substrings.
// Valid partitions cover every position exactly once, with sizes differing by at most one.
class Partition {
 public:
  Partition(uint32_t bits, std::vector<std::vector<uint32_t>> substrings)
      : bits_(bits), substrings_(std::move(substrings)) {
    validate();
    precompute();
  }

  uint32_t bits() const { return bits_; }
  uint32_t m() const { return static_cast<uint32_t>(substrings_.size()); }
  uint32_t length(uint32_t j) const { return static_cast<uint32_t>(substrings_[j].size()); }
  const std::vector<uint32_t>& positions(uint32_t j) const { return substrings_[j]; }
  const std::vector<std::vector<uint32_t>>& substrings() const { return substrings_; }

  bool contiguous(uint32_t j) const { return runs_[j].contiguous; }

  bool operator==(const Partition& o) const {
    return bits_ == o.bits_ && substrings_ == o.substrings_;
  }

  friend uint64_t extract_substring(BinaryCode code, const Partition& p, uint32_t j);

 private:
  struct Run {
    bool contiguous;
    uint32_t offset;  // first bit position when contiguous
  };

  void validate() const {
    const uint32_t m = static_cast<uint32_t>(substrings_.size());
    if (bits_ == 0 || bits_ > kMaxCodeBits) throw std::invalid_argument("Partition: bad width");
    if (m == 0 || m > bits_)
      throw std::invalid_argument("Partition: substring count must be in [1, bits]");
    std::vector<char> seen(bits_, 0);
    size_t lo = bits_, hi = 0;
    for (const auto& sub : substrings_) {
      lo = std::min(lo, sub.size());
      hi = std::max(hi, sub.size());
      for (uint32_t pos : sub) {
        if (pos >= bits_)
          throw std::invalid_argument("Partition: bit position " + std::to_string(pos) +
                                      " out of range");
        if (seen[pos])
          throw std::invalid_argument("Partition: bit position " + std::to_string(pos) +
                                      " assigned twice");
        seen[pos] = 1;
      }
    }
    uint64_t total = 0;
    for (const auto& sub : substrings_) total += sub.size();
    if (total != bits_) throw std::invalid_argument("Partition: positions do not cover the code");
    if (hi - lo > 1) throw std::invalid_argument("Partition: substring sizes differ by more than 1");
  }

  void precompute() {
    runs_.resize(substrings_.size());
    for (size_t j = 0; j < substrings_.size(); ++j) {
      const auto& sub = substrings_[j];
      bool contig = true;
      for (size_t i = 1; i < sub.size(); ++i)
        if (sub[i] != sub[i - 1] + 1) {
          contig = false;
          break;
        }
      runs_[j] = {contig, sub.empty() ? 0 : sub.front()};
    }
  }

  uint32_t bits_;
  std::vector<std::vector<uint32_t>> substrings_;
  std::vector<Run> runs_;
};

// Contiguous runs; the first (bits % m) substrings take the extra bit.
inline Partition consecutive_partition(uint32_t bits, uint32_t m) {
  if (m == 0 || m > bits)
    throw std::invalid_argument("consecutive_partition: need 1 <= m <= bits, got m=" +
                                std::to_string(m) + ", bits=" + std::to_string(bits));
  std::vector<std::vector<uint32_t>> subs(m);
  const uint32_t base = bits / m, extra = bits % m;
  uint32_t pos = 0;
  for (uint32_t j = 0; j < m; ++j) {
    const uint32_t len = base + (j < extra ? 1 : 0);
    subs[j].reserve(len);
    for (uint32_t i = 0; i < len; ++i) subs[j].push_back(pos++);
  }
  return Partition(bits, std::move(subs));
}

// Bit i of the result = code bit at the i-th position owned by substring j.
inline uint64_t extract_substring(BinaryCode code, const Partition& p, uint32_t j) {
  if (j >= p.m()) throw std::invalid_argument("extract_substring: substring index out of range");
  if (code.bits != p.bits()) throw std::invalid_argument("extract_substring: width mismatch");
  const auto& sub = p.substrings_[j];
  const uint32_t len = static_cast<uint32_t>(sub.size());
  if (len > 64) throw std::invalid_argument("extract_substring: substring wider than 64 bits");
  if (len == 0) return 0;
  const Partition::Run& run = p.runs_[j];
  if (run.contiguous) {
    const uint32_t w = run.offset >> 6, sh = run.offset & 63;
    uint64_t v = code.words[w] >> sh;
    if (sh + len > 64) v |= code.words[w + 1] << (64 - sh);
    return len == 64 ? v : (v & ((uint64_t{1} << len) - 1));
  }
  uint64_t v = 0;
  for (uint32_t i = 0; i < len; ++i) v |= uint64_t{code.bit(sub[i])} << i;
  return v;
}

}  // namespace mih
