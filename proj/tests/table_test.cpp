#include "mih/table.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace mih {
namespace {

TEST(SubstringTable, PinnedSmallExample) {
  // s=5: ids 0 and 1 share bucket 3, id 2 sits alone in bucket 17
  SubstringTable t = build_table(5, {{3, 0}, {3, 1}, {17, 2}});
  auto b3 = bucket_lookup(t, 3);
  ASSERT_EQ(b3.size(), 2u);
  EXPECT_EQ(b3[0], 0u);
  EXPECT_EQ(b3[1], 1u);
  auto b17 = bucket_lookup(t, 17);
  ASSERT_EQ(b17.size(), 1u);
  EXPECT_EQ(b17[0], 2u);
  for (uint64_t v : {0, 1, 2, 4, 16, 18, 31}) EXPECT_TRUE(bucket_lookup(t, v).empty());

  TableStats st = table_stats(t);
  EXPECT_EQ(st.non_empty_buckets, 2u);
  EXPECT_EQ(st.max_bucket_size, 2u);
  EXPECT_EQ(st.total_entries, 3u);
  // one group of 32 buckets total, one occupied: 12 + 12 + 2*4 + 3*4
  EXPECT_EQ(st.estimated_bytes, 12u + 12u + 8u + 12u);
}

TEST(SubstringTable, InsertionOrderPreservedWithinBucket) {
  // build is stable: ids come back in insertion order, not sorted
  SubstringTable t = build_table(4, {{9, 5}, {9, 2}, {9, 7}, {9, 2}});
  auto b = bucket_lookup(t, 9);
  ASSERT_EQ(b.size(), 4u);
  EXPECT_EQ(b[0], 5u);
  EXPECT_EQ(b[1], 2u);
  EXPECT_EQ(b[2], 7u);
  EXPECT_EQ(b[3], 2u);
}

TEST(SubstringTable, ValidationAndEdgeCases) {
  EXPECT_THROW(build_table(0, {}), std::invalid_argument);
  EXPECT_THROW(build_table(33, {}), std::invalid_argument);
  EXPECT_THROW(build_table(3, {{8, 0}}), std::invalid_argument);  // value needs 4 bits

  SubstringTable empty = build_table(6, {});
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_TRUE(bucket_lookup(empty, 0).empty());
  EXPECT_TRUE(bucket_lookup(empty, 63).empty());
  EXPECT_THROW(bucket_lookup(empty, 64), std::invalid_argument);

  SubstringTable unbuilt;
  EXPECT_THROW(unbuilt.bucket_lookup(0), std::logic_error);

  // s=1: the smallest table has two buckets
  SubstringTable tiny = build_table(1, {{0, 10}, {1, 11}, {0, 12}});
  EXPECT_EQ(bucket_lookup(tiny, 0).size(), 2u);
  EXPECT_EQ(bucket_lookup(tiny, 1).size(), 1u);
}

TEST(SubstringTable, MatchesBruteForceMap) {
  // randomized equivalence against a std::map reference over several widths
  std::mt19937_64 rng(31337);
  for (uint32_t s : {1u, 3u, 5u, 8u, 11u, 16u}) {
    const uint64_t space = uint64_t{1} << s;
    const size_t n = 1 + static_cast<size_t>(rng() % 3000);
    std::vector<std::pair<uint64_t, uint32_t>> pairs;
    std::map<uint64_t, std::vector<uint32_t>> ref;
    for (size_t i = 0; i < n; ++i) {
      const uint64_t v = rng() % space;
      pairs.emplace_back(v, static_cast<uint32_t>(i));
      ref[v].push_back(static_cast<uint32_t>(i));
    }
    SubstringTable t = build_table(s, pairs);
    EXPECT_EQ(t.size(), n);
    EXPECT_EQ(t.non_empty_buckets(), ref.size());
    uint64_t max_bucket = 0;
    for (const auto& [v, ids] : ref) max_bucket = std::max<uint64_t>(max_bucket, ids.size());
    EXPECT_EQ(t.max_bucket_size(), max_bucket);

    // every value of the space for small s, the touched ones plus probes otherwise
    for (uint64_t v = 0; v < std::min<uint64_t>(space, 4096); ++v) {
      auto got = bucket_lookup(t, v);
      auto it = ref.find(v);
      if (it == ref.end()) {
        EXPECT_TRUE(got.empty());
      } else {
        ASSERT_EQ(got.size(), it->second.size());
        for (size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], it->second[i]);
      }
    }
    if (space > 4096) {
      for (const auto& [v, ids] : ref) {
        auto got = bucket_lookup(t, v);
        ASSERT_EQ(got.size(), ids.size());
        for (size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], ids[i]);
      }
    }
  }
}

TEST(SubstringTable, GroupAccounting) {
  // values 0 and 40 land in groups 0 and 1; value 95 in group 2
  SubstringTable t = build_table(8, {{0, 0}, {40, 1}, {95, 2}, {95, 3}});
  EXPECT_EQ(t.num_groups(), 8u);  // 256 buckets / 32
  EXPECT_EQ(t.non_empty_groups(), 3u);
  EXPECT_EQ(t.non_empty_buckets(), 3u);
  EXPECT_EQ(t.group_mask(0), 1u);
  EXPECT_EQ(t.group_mask(1), uint32_t{1} << 8);   // 40 = 32 + 8
  EXPECT_EQ(t.group_mask(2), uint32_t{1} << 31);  // 95 = 64 + 31

  uint64_t visited = 0;
  t.for_each_non_empty_group([&](uint64_t g, uint32_t mask, std::span<const uint32_t> block) {
    EXPECT_EQ(mask, t.group_mask(g));
    const uint32_t c = static_cast<uint32_t>(std::popcount(mask));
    ASSERT_GE(block.size(), c + 1u);
    EXPECT_EQ(block.size(), c + 1u + block[c]);
    ++visited;
  });
  EXPECT_EQ(visited, 3u);
}

TEST(TableStats, ReferenceModelPins) {
  // an empty 32-bit-wide table costs 2^27 groups * 12 bytes = 1.5 GiB
  EXPECT_EQ(TableStats::estimate_bytes(32, 0, 0, 0), uint64_t{3} << 29);
  // with every group occupied the per-group cost doubles to 3 GiB before buckets
  EXPECT_EQ(TableStats::estimate_bytes(32, uint64_t{1} << 27, 0, 0), uint64_t{3} << 30);
  // entries and buckets each add 4 bytes
  EXPECT_EQ(TableStats::estimate_bytes(5, 1, 3, 10), 12u + 12u + 12u + 40u);
  // widths below the group size still have one group
  EXPECT_EQ(TableStats::estimate_bytes(3, 1, 1, 1), 12u + 12u + 4u + 4u);
}

TEST(SubstringTable, SerializationRecordsRoundTrip) {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    const uint32_t s = 2 + static_cast<uint32_t>(rng() % 12);
    const size_t n = static_cast<size_t>(rng() % 500);
    std::vector<std::pair<uint64_t, uint32_t>> pairs;
    for (size_t i = 0; i < n; ++i)
      pairs.emplace_back(rng() % (uint64_t{1} << s), static_cast<uint32_t>(rng() % 1000));
    SubstringTable t = build_table(s, pairs);

    std::vector<std::tuple<uint64_t, uint32_t, std::vector<uint32_t>>> recs;
    t.for_each_non_empty_group([&](uint64_t g, uint32_t mask, std::span<const uint32_t> block) {
      recs.emplace_back(g, mask, std::vector<uint32_t>(block.begin(), block.end()));
    });
    SubstringTable u = SubstringTable::from_groups(s, t.size(), recs);

    EXPECT_EQ(u.size(), t.size());
    EXPECT_EQ(u.non_empty_buckets(), t.non_empty_buckets());
    EXPECT_EQ(u.non_empty_groups(), t.non_empty_groups());
    EXPECT_EQ(u.max_bucket_size(), t.max_bucket_size());
    for (uint64_t v = 0; v < (uint64_t{1} << s); ++v) {
      auto a = t.bucket_lookup(v), b = u.bucket_lookup(v);
      ASSERT_EQ(a.size(), b.size());
      for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
    }
  }
}

TEST(SubstringTable, FromGroupsRejectsCorruptRecords) {
  SubstringTable t = build_table(6, {{5, 1}, {40, 2}});
  std::vector<std::tuple<uint64_t, uint32_t, std::vector<uint32_t>>> good;
  t.for_each_non_empty_group([&](uint64_t g, uint32_t mask, std::span<const uint32_t> block) {
    good.emplace_back(g, mask, std::vector<uint32_t>(block.begin(), block.end()));
  });
  ASSERT_EQ(good.size(), 2u);

  auto mutate = [&](auto fn) {
    auto bad = good;
    fn(bad);
    return bad;
  };
  using Recs = std::vector<std::tuple<uint64_t, uint32_t, std::vector<uint32_t>>>;

  // entry count mismatch against the header
  EXPECT_THROW(SubstringTable::from_groups(6, 3, good), std::invalid_argument);
  // group id out of range
  EXPECT_THROW(SubstringTable::from_groups(
                   6, 2, mutate([](Recs& r) { std::get<0>(r[1]) = 99; })),
               std::invalid_argument);
  // ids not ascending
  EXPECT_THROW(SubstringTable::from_groups(6, 2, mutate([](Recs& r) { std::swap(r[0], r[1]); })),
               std::invalid_argument);
  // zero mask
  EXPECT_THROW(SubstringTable::from_groups(6, 2, mutate([](Recs& r) { std::get<1>(r[0]) = 0; })),
               std::invalid_argument);
  // truncated block
  EXPECT_THROW(SubstringTable::from_groups(
                   6, 2, mutate([](Recs& r) { std::get<2>(r[0]).pop_back(); })),
               std::invalid_argument);
  // starts not beginning at zero
  EXPECT_THROW(SubstringTable::from_groups(
                   6, 2, mutate([](Recs& r) { std::get<2>(r[0])[0] = 1; })),
               std::invalid_argument);
}

TEST(SubstringTable, WideTableSparseProbes) {
  // s=26 stays cheap because empty groups are never touched
  std::vector<std::pair<uint64_t, uint32_t>> pairs;
  std::mt19937_64 rng(5);
  for (uint32_t i = 0; i < 2000; ++i) pairs.emplace_back(rng() % (uint64_t{1} << 26), i);
  SubstringTable t = build_table(26, pairs);
  EXPECT_EQ(t.size(), 2000u);
  for (const auto& [v, id] : pairs) {
    auto seg = t.bucket_lookup(v);
    EXPECT_TRUE(std::find(seg.begin(), seg.end(), id) != seg.end());
  }
  uint64_t hits = 0;
  for (uint64_t v = 0; v < 100000; ++v)
    if (!t.bucket_lookup(v).empty()) ++hits;
  EXPECT_LE(hits, 2000u);
}

}  // namespace
}  // namespace mih
