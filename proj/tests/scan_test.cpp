#include "mih/scan.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "mih/io.hpp"

namespace mih {
namespace {

CodeDatabase tiny_db() {
  // 000000, 000001, 111111 as 6-bit codes
  CodeDatabase db(6);
  for (uint64_t w : {0ull, 1ull, 63ull}) db.append_words(&w);
  return db;
}

TEST(ScanRange, TinyCases) {
  CodeDatabase db = tiny_db();
  uint64_t q = 0;
  BinaryCode qc{&q, 6};

  auto r0 = scan_range(db, qc, 0);
  ASSERT_EQ(r0.size(), 1u);
  EXPECT_EQ(r0[0].id, 0u);
  EXPECT_EQ(r0[0].dist, 0u);

  auto r1 = scan_range(db, qc, 1);
  ASSERT_EQ(r1.size(), 2u);
  EXPECT_EQ(r1[1].id, 1u);

  auto r5 = scan_range(db, qc, 5);
  EXPECT_EQ(r5.size(), 2u);

  auto r6 = scan_range(db, qc, 6);
  ASSERT_EQ(r6.size(), 3u);
  EXPECT_EQ(r6[2].dist, 6u);
}

TEST(ScanKnn, TinyCases) {
  CodeDatabase db = tiny_db();
  uint64_t q = 0;
  BinaryCode qc{&q, 6};

  auto k1 = scan_knn(db, qc, 1);
  ASSERT_EQ(k1.size(), 1u);
  EXPECT_EQ(k1[0].id, 0u);

  auto k3 = scan_knn(db, qc, 3);
  ASSERT_EQ(k3.size(), 3u);
  EXPECT_EQ(k3[0].dist, 0u);
  EXPECT_EQ(k3[1].dist, 1u);
  EXPECT_EQ(k3[2].dist, 6u);

  EXPECT_TRUE(scan_knn(db, qc, 0).empty());
  EXPECT_THROW(scan_knn(db, qc, 4), std::invalid_argument);
}

TEST(ScanKnn, TieBreaksByIdAscending) {
  // four codes all at distance 1 from the query
  CodeDatabase db(8);
  for (uint64_t w : {2ull, 8ull, 1ull, 4ull}) db.append_words(&w);
  uint64_t q = 0;
  auto k2 = scan_knn(db, {&q, 8}, 2);
  ASSERT_EQ(k2.size(), 2u);
  EXPECT_EQ(k2[0].id, 0u);
  EXPECT_EQ(k2[1].id, 1u);
}

TEST(ScanKnn, AgreesWithSortingEverything) {
  std::mt19937_64 rng(1234);
  CodeDatabase db = gen_uniform(800, 48, 55);
  CodeDatabase queries = gen_uniform(20, 48, 56);
  for (uint64_t qi = 0; qi < queries.size(); ++qi) {
    BinaryCode q = queries.code(qi);
    std::vector<Neighbor> all;
    for (uint64_t i = 0; i < db.size(); ++i)
      all.push_back({static_cast<uint32_t>(i), hamming_distance(db.code(i), q)});
    std::sort(all.begin(), all.end(), neighbor_less);
    for (uint32_t k : {1u, 7u, 100u, 800u}) {
      auto got = scan_knn(db, q, k);
      ASSERT_EQ(got.size(), k);
      for (uint32_t i = 0; i < k; ++i) {
        EXPECT_EQ(got[i].id, all[i].id);
        EXPECT_EQ(got[i].dist, all[i].dist);
      }
    }
  }
}

TEST(ScanRange, OutputSortedAndComplete) {
  CodeDatabase db = gen_uniform(500, 32, 9);
  CodeDatabase queries = gen_uniform(5, 32, 10);
  for (uint64_t qi = 0; qi < queries.size(); ++qi) {
    BinaryCode q = queries.code(qi);
    for (uint32_t r : {0u, 8u, 12u, 16u, 32u}) {
      auto got = scan_range(db, q, r);
      EXPECT_TRUE(std::is_sorted(got.begin(), got.end(), neighbor_less));
      size_t expect = 0;
      for (uint64_t i = 0; i < db.size(); ++i)
        if (hamming_distance(db.code(i), q) <= r) ++expect;
      EXPECT_EQ(got.size(), expect);
      for (const Neighbor& nb : got) {
        EXPECT_LE(nb.dist, r);
        EXPECT_EQ(nb.dist, hamming_distance(db.code(nb.id), q));
      }
    }
  }
}

}  // namespace
}  // namespace mih
