#pragma once
// Lazy enumeration of the s-bit values at or within a Hamming radius of a center.
//
// Order contract: values come out by increasing distance from the center, and within
// one distance by lexicographically increasing tuples of flipped bit positions
// ((0,1,2) before (0,1,3) before (0,2,3), ...). Enumeration is a cursor, never a
// materialized list: the value count grows near-exponentially in the radius.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mih {

struct BallSpec {
  uint32_t s = 0;       // value width in bits, 1..64
  uint64_t center = 0;  // < 2^s
  uint32_t radius = 0;  // <= s

  void validate() const {
    if (s == 0 || s > 64) throw std::invalid_argument("BallSpec: width must be in [1, 64]");
    if (s < 64 && (center >> s) != 0)
      throw std::invalid_argument("BallSpec: center has bits beyond the width");
    if (radius > s)
      throw std::invalid_argument("BallSpec: radius " + std::to_string(radius) +
                                  " exceeds width " + std::to_string(s));
  }
};

// Values at exactly `radius` from the center, C(s, radius) of them.
class RingEnumerator {
 public:
  explicit RingEnumerator(const BallSpec& spec)
      : s_(spec.s), z_(spec.radius), center_(spec.center) {
    spec.validate();
    reset();
  }

  void reset() {
    done_ = false;
    mask_ = 0;
    for (uint32_t i = 0; i < z_; ++i) {
      pos_[i] = i;
      mask_ |= uint64_t{1} << i;
    }
  }

  // Writes the next value and returns true, or returns false when exhausted.
  bool next(uint64_t& out) {
    if (done_) return false;
    out = center_ ^ mask_;
    advance();
    return true;
  }

 private:
  // Next flipped-position combination in lexicographic order: bump the rightmost
  // position that can still move, pack everything after it tightly against it.
  void advance() {
    if (z_ == 0) {
      done_ = true;
      return;
    }
    uint32_t i = z_;
    while (i > 0) {
      --i;
      if (pos_[i] < s_ - z_ + i) {
        if (i == z_ - 1) {
          // Common case: slide the last flip up by one.
          mask_ ^= (uint64_t{1} << pos_[i]) | (uint64_t{1} << (pos_[i] + 1));
          ++pos_[i];
        } else {
          uint32_t p = pos_[i];
          for (uint32_t j = i; j < z_; ++j) pos_[j] = ++p;
          mask_ = 0;
          for (uint32_t j = 0; j < z_; ++j) mask_ |= uint64_t{1} << pos_[j];
        }
        return;
      }
    }
    done_ = true;
  }

  uint32_t s_;
  uint32_t z_;
  uint64_t center_;
  uint64_t mask_ = 0;
  bool done_ = false;
  uint32_t pos_[64] = {};
};

// Rings 0..radius chained: the full ball, distance-major order.
class BallEnumerator {
 public:
  explicit BallEnumerator(const BallSpec& spec) : spec_(spec), ring_({spec.s, spec.center, 0}) {
    spec.validate();
  }

  bool next(uint64_t& out) {
    while (true) {
      if (ring_.next(out)) return true;
      if (cur_radius_ == spec_.radius) return false;
      ++cur_radius_;
      ring_ = RingEnumerator({spec_.s, spec_.center, cur_radius_});
    }
  }

 private:
  BallSpec spec_;
  uint32_t cur_radius_ = 0;
  RingEnumerator ring_;
};

}  // namespace mih
