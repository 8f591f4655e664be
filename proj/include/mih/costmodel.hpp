#pragma once
// Analytic cost model for substring-table search over uniformly distributed codes.
//
// Core quantities, for width-b codes split into m = b/s substrings of s bits,
// database size n, search radius r:
//   ball(s, r)        = sum_{z<=r} C(s, z), the buckets probed per table at radius r
//   lookups(b, s, r)  = (b/s) * ball(s, floor(s*r/b)), with the per-substring radius
//                       every table would use if the full radius split evenly
//   bound             = (b/s) * 2^{H(r/b) * s}, H the Bernoulli entropy, valid r <= b/2
//   cost(b, s, r, n)  = (1 + n/2^s) * lookups  (one unit per probe, one per candidate
//                       under the uniform-occupancy estimate n/2^s per bucket)
// The split-aware variant charges each table its actual radius from r = m*r' + a
// (a+1 tables at r', the rest at r'-1) instead of the even-split approximation; it
// is the sharper measure and is what makes minima align near s = log2 n.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mih/index.hpp"

namespace mih {

// Exact |{v : dist(v, center) <= r}| for s-bit values: sum of binomials.
inline mpz_class ball_size(uint32_t s, uint32_t r) {
  if (r > s)
    throw std::invalid_argument("ball_size: radius " + std::to_string(r) + " exceeds width " +
                                std::to_string(s));
  mpz_class total = 0, term;
  for (uint32_t z = 0; z <= r; ++z) {
    mpz_bin_uiui(term.get_mpz_t(), s, z);
    total += term;
  }
  return total;
}

// Bernoulli entropy in bits; 0 at the boundaries by continuity.
inline double entropy(double eps) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("entropy: argument outside [0, 1]");
  if (eps == 0.0 || eps == 1.0) return 0.0;
  return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

// 2^{H(eps)*eta}, an upper bound on sum_{z <= floor(eps*eta)} C(eta, z) for eps <= 1/2.
inline double binomial_sum_bound(uint32_t eta, double eps) {
  if (eta == 0) throw std::invalid_argument("binomial_sum_bound: eta must be positive");
  if (eps <= 0.0 || eps > 0.5)
    throw std::invalid_argument("binomial_sum_bound: eps must be in (0, 1/2]");
  return std::exp2(entropy(eps) * eta);
}

struct LookupCount {
  mpz_class exact;  // (b/s) * ball(s, floor(s*r/b))
  double bound;     // (b/s) * 2^{H(r/b)*s}
};

inline LookupCount lookup_count(uint32_t b, uint32_t s, uint32_t r) {
  if (s == 0 || b == 0 || b % s != 0)
    throw std::invalid_argument("lookup_count: s must divide b (got b=" + std::to_string(b) +
                                ", s=" + std::to_string(s) + ")");
  if (r > b) throw std::invalid_argument("lookup_count: radius exceeds code width");
  const uint32_t m = b / s;
  const uint32_t sub_r = static_cast<uint32_t>((uint64_t{s} * r) / b);
  LookupCount lc;
  lc.exact = m * ball_size(s, sub_r);
  lc.bound = m * std::exp2(entropy(static_cast<double>(r) / b) * s);
  return lc;
}

struct CostPoint {
  uint32_t s = 0;
  mpz_class lookups;          // exact lookup count
  double lookup_bound = 0.0;  // entropy bound on lookups
  double cost = 0.0;          // (1 + n/2^s) * lookups
  double cost_bound = 0.0;    // (1 + n/2^s) * lookup_bound
};

inline CostPoint expected_cost(uint32_t b, uint32_t s, uint32_t r, uint64_t n) {
  LookupCount lc = lookup_count(b, s, r);
  CostPoint p;
  p.s = s;
  const double occupancy = 1.0 + static_cast<double>(n) * std::exp2(-static_cast<double>(s));
  p.cost = occupancy * lc.exact.get_d();
  p.cost_bound = occupancy * lc.bound;
  p.lookups = std::move(lc.exact);
  p.lookup_bound = lc.bound;
  return p;
}

// Model cost at an arbitrary integer width: the table count b/s is treated as a
// real number so the curve is defined between divisors too.
inline double cost_at_width(uint32_t b, uint32_t s, uint32_t r, uint64_t n) {
  if (s == 0 || b == 0) throw std::invalid_argument("cost_at_width: widths must be positive");
  if (r > b) throw std::invalid_argument("cost_at_width: radius exceeds code width");
  const uint32_t sub_r = static_cast<uint32_t>((uint64_t{s} * r) / b);
  const double occupancy = 1.0 + static_cast<double>(n) * std::exp2(-static_cast<double>(s));
  return occupancy * (static_cast<double>(b) / s) * ball_size(s, std::min(sub_r, s)).get_d();
}

// Split-aware cost at a divisor width: m = b/s tables, radii from r = m*r' + a.
inline double split_cost(uint32_t b, uint32_t s, uint32_t r, uint64_t n) {
  if (s == 0 || b % s != 0) throw std::invalid_argument("split_cost: s must divide b");
  if (r > b) throw std::invalid_argument("split_cost: radius exceeds code width");
  const uint32_t m = b / s;
  const RadiusSplit sp = split_radius(r, m);
  mpz_class lookups = (sp.a + 1) * ball_size(s, std::min(sp.r_sub, s));
  if (sp.r_sub >= 1 && m > sp.a + 1) lookups += (m - sp.a - 1) * ball_size(s, sp.r_sub - 1);
  const double occupancy = 1.0 + static_cast<double>(n) * std::exp2(-static_cast<double>(s));
  return occupancy * lookups.get_d();
}

// 2 * (b / log2 n) * n^{H(r/b)}: the cost bound evaluated at s = log2 n.
inline double cost_bound_at_log_n(uint32_t b, uint32_t r, uint64_t n) {
  if (n < 2) throw std::invalid_argument("cost_bound_at_log_n: n must be at least 2");
  const double log2n = std::log2(static_cast<double>(n));
  return 2.0 * (b / log2n) * std::pow(static_cast<double>(n), entropy(static_cast<double>(r) / b));
}

// Closest integer to b / log2 n, clamped to [1, b].
inline uint32_t choose_num_tables(uint32_t b, uint64_t n) {
  if (n < 2) throw std::invalid_argument("choose_num_tables: n must be at least 2");
  const double ratio = b / std::log2(static_cast<double>(n));
  const long long rounded = std::llround(ratio);
  return static_cast<uint32_t>(std::clamp<long long>(rounded, 1, b));
}

// Buckets a single width-b table would probe to reach each query's k-th neighbor:
// ball(b, radius) per query, summarized exactly.
struct SingleTableSummary {
  uint64_t queries = 0;
  mpz_class total;
  mpz_class min;
  mpz_class max;
  double mean = 0.0;
};

inline SingleTableSummary single_table_lookups(uint32_t b, const std::vector<uint32_t>& radii) {
  SingleTableSummary s;
  s.queries = radii.size();
  for (uint32_t r : radii) {
    mpz_class l = ball_size(b, r);
    if (s.total == 0 || l < s.min) s.min = l;
    if (l > s.max) s.max = l;
    s.total += l;
  }
  if (s.queries > 0) {
    mpq_class mean(s.total, s.queries);
    mean.canonicalize();
    s.mean = mean.get_d();
  }
  return s;
}

}  // namespace mih
