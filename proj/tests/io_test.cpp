#include "mih/io.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mih/scan.hpp"

namespace mih {
namespace {

class IoTest : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("mih-io-test-" + std::to_string(::getpid()) + "-" +
            testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(IoTest, CodesRoundTrip) {
  for (uint32_t bits : {1u, 8u, 64u, 70u, 128u, 257u}) {
    CodeDatabase db = gen_uniform(123, bits, bits);
    write_codes(db, path("codes.bin"));
    CodeDatabase back = read_codes(path("codes.bin"));
    EXPECT_TRUE(back == db) << "bits=" << bits;
  }
  // empty database round-trips too
  CodeDatabase empty(16);
  write_codes(empty, path("empty.bin"));
  EXPECT_TRUE(read_codes(path("empty.bin")) == empty);
}

TEST_F(IoTest, CodesFileLayoutIsStable) {
  // one 16-bit code 0xbeef: 4-byte magic, u32 version, u32 bits, u64 n, one u64 word
  CodeDatabase db(16);
  uint64_t w = 0xbeef;
  db.append_words(&w);
  write_codes(db, path("one.bin"));

  std::ifstream in(path("one.bin"), std::ios::binary);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(raw.size(), 4u + 4u + 4u + 8u + 8u);
  EXPECT_EQ(std::string(raw.data(), 4), "BMIH");
  EXPECT_EQ(raw[4], 1);  // version 1 little-endian
  EXPECT_EQ(static_cast<unsigned char>(raw[8]), 16u);
  EXPECT_EQ(static_cast<unsigned char>(raw[12]), 1u);  // n = 1
  EXPECT_EQ(static_cast<unsigned char>(raw[20]), 0xefu);
  EXPECT_EQ(static_cast<unsigned char>(raw[21]), 0xbeu);
}

TEST_F(IoTest, CodesErrorsCarryOffsets) {
  CodeDatabase db = gen_uniform(10, 70, 1);
  write_codes(db, path("c.bin"));

  // bad magic
  {
    std::fstream f(path("c.bin"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  try {
    read_codes(path("c.bin"));
    FAIL() << "bad magic accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }

  // truncation inside the payload
  write_codes(db, path("c.bin"));
  std::filesystem::resize_file(path("c.bin"), 40);
  EXPECT_THROW(read_codes(path("c.bin")), FormatError);

  // nonzero padding in record 3: bit 70 of a 70-bit code
  write_codes(db, path("c.bin"));
  {
    // header is 4+4+4+8 = 20 bytes; record i at 20 + i*16, padding in its second word
    std::fstream f(path("c.bin"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20 + 3 * 16 + 8);
    const uint64_t bad = uint64_t{1} << 6;
    uint64_t cur = 0;
    f.seekg(20 + 3 * 16 + 8);
    f.read(reinterpret_cast<char*>(&cur), 8);
    cur |= bad;
    f.seekp(20 + 3 * 16 + 8);
    f.write(reinterpret_cast<const char*>(&cur), 8);
  }
  try {
    read_codes(path("c.bin"));
    FAIL() << "nonzero padding accepted";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 20u + 3 * 16 + 8);
    EXPECT_NE(std::string(e.what()).find("record 3"), std::string::npos);
  }

  // unsupported version
  write_codes(db, path("c.bin"));
  {
    std::fstream f(path("c.bin"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const uint32_t v = 9;
    f.write(reinterpret_cast<const char*>(&v), 4);
  }
  EXPECT_THROW(read_codes(path("c.bin")), FormatError);

  // trailing garbage
  write_codes(db, path("c.bin"));
  {
    std::ofstream f(path("c.bin"), std::ios::binary | std::ios::app);
    f.write("junk", 4);
  }
  EXPECT_THROW(read_codes(path("c.bin")), FormatError);
}

TEST_F(IoTest, VectorsRoundTrip) {
  VectorData v = gen_gaussian_vectors(50, 12, 3);
  write_vectors(v, path("v.bin"));
  VectorData back = read_vectors(path("v.bin"));
  EXPECT_EQ(back.dim, v.dim);
  EXPECT_EQ(back.n, v.n);
  EXPECT_EQ(back.values, v.values);

  std::filesystem::resize_file(path("v.bin"), 100);
  EXPECT_THROW(read_vectors(path("v.bin")), FormatError);
}

TEST_F(IoTest, IndexRoundTripPreservesSearchBehavior) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    const uint32_t bits = 16 + static_cast<uint32_t>(rng() % 100);
    const uint32_t m = 2 + static_cast<uint32_t>(rng() % 6);
    if ((bits + m - 1) / m > kMaxTableBits) continue;
    CodeDatabase db = gen_uniform(300 + rng() % 500, bits, rng());
    MihIndex idx = MihIndex::build(db, consecutive_partition(bits, m));
    write_index(idx, path("idx.bin"));
    MihIndex back = read_index(path("idx.bin"));

    EXPECT_TRUE(back.db() == db);
    EXPECT_TRUE(back.partition() == idx.partition());
    CodeDatabase queries = gen_uniform(10, bits, rng());
    for (uint64_t qi = 0; qi < queries.size(); ++qi) {
      BinaryCode q = queries.code(qi);
      SearchTrace t1, t2;
      auto r1 = idx.range_search(q, bits / 4, &t1);
      auto r2 = back.range_search(q, bits / 4, &t2);
      ASSERT_EQ(r1.size(), r2.size());
      for (size_t i = 0; i < r1.size(); ++i) {
        EXPECT_EQ(r1[i].id, r2[i].id);
        EXPECT_EQ(r1[i].dist, r2[i].dist);
      }
      EXPECT_EQ(t1.lookups, t2.lookups);
      EXPECT_EQ(t1.candidates, t2.candidates);

      auto k1 = idx.knn_search(q, 5), k2 = back.knn_search(q, 5);
      ASSERT_EQ(k1.size(), k2.size());
      for (size_t i = 0; i < k1.size(); ++i) EXPECT_EQ(k1[i].id, k2[i].id);
    }
  }
}

TEST_F(IoTest, IndexRejectsCorruption) {
  CodeDatabase db = gen_uniform(200, 32, 6);
  MihIndex idx = MihIndex::build(db, consecutive_partition(32, 4));
  write_index(idx, path("idx.bin"));

  // magic from the codes format is not an index file
  {
    std::fstream f(path("idx.bin"), std::ios::in | std::ios::out | std::ios::binary);
    f.write("BMIH", 4);
  }
  EXPECT_THROW(read_index(path("idx.bin")), FormatError);

  // truncating the table area breaks structural validation
  write_index(idx, path("idx.bin"));
  const auto full = std::filesystem::file_size(path("idx.bin"));
  std::filesystem::resize_file(path("idx.bin"), full - 5);
  EXPECT_THROW(read_index(path("idx.bin")), FormatError);
}

TEST_F(IoTest, GenUniformIsSeededAndPadded) {
  CodeDatabase a = gen_uniform(500, 70, 42);
  CodeDatabase b = gen_uniform(500, 70, 42);
  CodeDatabase c = gen_uniform(500, 70, 43);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  for (uint64_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(a.code(i).words[1] & ~last_word_mask(70), 0u);

  // roughly half the bits are set
  uint64_t ones = 0;
  for (uint64_t i = 0; i < a.size(); ++i)
    for (uint32_t p = 0; p < 70; ++p) ones += a.code(i).bit(p);
  const double frac = static_cast<double>(ones) / (500.0 * 70);
  EXPECT_NEAR(frac, 0.5, 0.02);
}

TEST_F(IoTest, GenDuplicatedBitsStructure) {
  CodeDatabase db = gen_duplicated_bits(400, 24, 4, 9);
  for (uint64_t i = 0; i < db.size(); ++i) {
    BinaryCode c = db.code(i);
    for (uint32_t src = 0; src < 6; ++src)
      for (uint32_t t = 1; t < 4; ++t)
        EXPECT_EQ(c.bit(src * 4), c.bit(src * 4 + t));
  }
  EXPECT_THROW(gen_duplicated_bits(10, 24, 5, 0), std::invalid_argument);
}

TEST_F(IoTest, CorrelatedVectorsShareGroupStructure) {
  VectorData v = gen_correlated_vectors(2000, 12, 3, 0.25, 5);
  // within-group sample correlation is high, across-group near zero
  auto corr = [&](uint32_t a, uint32_t b) {
    double ma = 0, mb = 0;
    for (uint64_t i = 0; i < v.n; ++i) {
      ma += v.row(i)[a];
      mb += v.row(i)[b];
    }
    ma /= v.n;
    mb /= v.n;
    double cab = 0, ca = 0, cb = 0;
    for (uint64_t i = 0; i < v.n; ++i) {
      const double x = v.row(i)[a] - ma, y = v.row(i)[b] - mb;
      cab += x * y;
      ca += x * x;
      cb += y * y;
    }
    return cab / std::sqrt(ca * cb);
  };
  EXPECT_GT(corr(0, 1), 0.8);
  EXPECT_GT(corr(3, 5), 0.8);
  EXPECT_LT(std::abs(corr(0, 3)), 0.1);
}

TEST_F(IoTest, LshEncodingIsDeterministicAndAngular) {
  VectorData v = gen_gaussian_vectors(300, 16, 44);
  LshSpec spec = LshSpec::from_data(v, 256, 13);
  CodeDatabase a = lsh_encode(v, spec);
  CodeDatabase b = lsh_encode(v, LshSpec::from_data(v, 256, 13));
  EXPECT_TRUE(a == b);

  // a vector exactly at the center dots to zero on every row; ties map to bit 1
  LshSpec origin_spec = LshSpec::make(16, 256, 13);
  VectorData at_center;
  at_center.dim = 16;
  at_center.n = 1;
  at_center.values.assign(16, 0.0f);
  CodeDatabase mc = lsh_encode(at_center, origin_spec);
  uint32_t ones = 0;
  for (uint32_t p = 0; p < 256; ++p) ones += mc.code(0).bit(p);
  EXPECT_EQ(ones, 256u);
}

TEST_F(IoTest, LshHammingTracksAngle) {
  // two unit vectors at angle theta disagree on a random sign bit with
  // probability theta/pi; with 4096 bits the sample fraction concentrates
  const uint32_t bits = 4096, dim = 8;
  LshSpec spec = LshSpec::make(dim, bits, 99);
  for (double theta : {std::numbers::pi / 6, std::numbers::pi / 3, std::numbers::pi / 2}) {
    VectorData pair;
    pair.dim = dim;
    pair.n = 2;
    pair.values.assign(2 * dim, 0.0f);
    pair.values[0] = 1.0f;  // e0
    pair.values[dim + 0] = static_cast<float>(std::cos(theta));
    pair.values[dim + 1] = static_cast<float>(std::sin(theta));
    CodeDatabase codes = lsh_encode(pair, spec);
    const double frac =
        static_cast<double>(hamming_distance(codes.code(0), codes.code(1))) / bits;
    EXPECT_NEAR(frac, theta / std::numbers::pi, 0.03) << "theta=" << theta;
  }
}

TEST_F(IoTest, LshCodesStillAnswerExactQueries) {
  // end to end: encode correlated vectors, index the codes, verify against scan
  VectorData v = gen_correlated_vectors(2000, 16, 4, 0.3, 88);
  CodeDatabase codes = lsh_encode(v, LshSpec::from_data(v, 64, 5));
  MihIndex idx = MihIndex::build(codes, consecutive_partition(64, 4));
  CodeDatabase queries = lsh_encode(gen_correlated_vectors(20, 16, 4, 0.3, 89),
                                    LshSpec::from_data(v, 64, 5));
  for (uint64_t qi = 0; qi < queries.size(); ++qi) {
    BinaryCode q = queries.code(qi);
    auto got = idx.knn_search(q, 10);
    auto want = scan_knn(codes, q, 10);
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].id, want[i].id);
      EXPECT_EQ(got[i].dist, want[i].dist);
    }
  }
}

}  // namespace
}  // namespace mih
