#pragma once
// Dataset and index persistence, synthetic data generation, and sign-projection
// encoding of real-valued vectors into binary codes.
//
// Binary formats (all little-endian, versioned):
//   codes file:  "BMIH" | u32 version=1 | u32 bits | u64 n | n records of
//                ceil(bits/64) u64 words, bit i at word i/64 bit i%64, padding zero
//   vector file: u32 dim | u64 n | n*dim float32, row-major
//   index file:  "BMIX" | u32 version=1 | codes block (bits, n, words) |
//                partition block (u32 m, then per substring u32 len + positions) |
//                per substring table: u32 s | u64 entries | u64 groups | per group:
//                u64 group id | u32 mask | (c+1) u32 starts | entry u32 ids

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mih/codes.hpp"
#include "mih/index.hpp"
#include "mih/table.hpp"

namespace mih {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are not supported");

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, uint64_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  uint64_t offset() const { return offset_; }

 private:
  uint64_t offset_;
};

namespace detail {

constexpr char kCodesMagic[4] = {'B', 'M', 'I', 'H'};
constexpr char kIndexMagic[4] = {'B', 'M', 'I', 'X'};
constexpr uint32_t kFormatVersion = 1;

class FileWriter {
 public:
  explicit FileWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }
  template <typename T>
  void put(T v) {
    raw(&v, sizeof(T));
  }
  void raw(const void* p, size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    offset_ += n;
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed: " + path_);
  }
  uint64_t offset() const { return offset_; }

 private:
  std::string path_;
  std::ofstream out_;
  uint64_t offset_ = 0;
};

class FileReader {
 public:
  explicit FileReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
    in_.seekg(0, std::ios::end);
    size_ = static_cast<uint64_t>(in_.tellg());
    in_.seekg(0, std::ios::beg);
  }
  template <typename T>
  T get(const char* what) {
    T v;
    raw(&v, sizeof(T), what);
    return v;
  }
  void raw(void* p, uint64_t n, const char* what) {
    if (offset_ + n > size_)
      throw FormatError("truncated file " + path_ + ": reading " + what + " needs " +
                            std::to_string(n) + " bytes, " + std::to_string(size_ - offset_) +
                            " remain",
                        offset_);
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("read failed: " + path_);
    offset_ += n;
  }
  uint64_t offset() const { return offset_; }
  uint64_t size() const { return size_; }
  void expect_eof(const char* what) const {
    if (offset_ != size_)
      throw FormatError(std::string("trailing bytes after ") + what + " in " + path_ + ": expected size " +
                            std::to_string(offset_) + ", file has " + std::to_string(size_),
                        offset_);
  }

 private:
  std::string path_;
  std::ifstream in_;
  uint64_t size_ = 0;
  uint64_t offset_ = 0;
};

inline void write_codes_block(FileWriter& w, const CodeDatabase& db) {
  w.put<uint32_t>(db.bits());
  w.put<uint64_t>(db.size());
  const auto& words = db.raw_words();
  w.raw(words.data(), words.size() * sizeof(uint64_t));
}

inline CodeDatabase read_codes_block(FileReader& r) {
  const uint64_t header_at = r.offset();
  const uint32_t bits = r.get<uint32_t>("code width");
  if (bits == 0 || bits > kMaxCodeBits)
    throw FormatError("bad code width " + std::to_string(bits), header_at);
  const uint64_t n = r.get<uint64_t>("code count");
  if (n > (uint64_t{1} << 32)) throw FormatError("code count exceeds 2^32", header_at + 4);
  CodeDatabase db = CodeDatabase::zeros(bits, n);
  const uint32_t wpc = db.words_per_entry();
  const uint64_t payload_at = r.offset();
  if (n > 0) {
    std::vector<uint64_t> buf(n * wpc);
    r.raw(buf.data(), buf.size() * sizeof(uint64_t), "code words");
    const uint64_t pad = ~last_word_mask(bits);
    for (uint64_t i = 0; i < n; ++i)
      if ((buf[i * wpc + wpc - 1] & pad) != 0)
        throw FormatError("nonzero padding bits in record " + std::to_string(i),
                          payload_at + (i * wpc + wpc - 1) * 8);
    std::memcpy(db.mutable_words(0), buf.data(), buf.size() * sizeof(uint64_t));
  }
  return db;
}

}  // namespace detail

// --- codes files -------------------------------------------------------------

inline void write_codes(const CodeDatabase& db, const std::string& path) {
  detail::FileWriter w(path);
  w.raw(detail::kCodesMagic, 4);
  w.put<uint32_t>(detail::kFormatVersion);
  detail::write_codes_block(w, db);
  w.close();
}

inline CodeDatabase read_codes(const std::string& path) {
  detail::FileReader r(path);
  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, detail::kCodesMagic, 4) != 0)
    throw FormatError("not a codes file (bad magic)", 0);
  const uint32_t version = r.get<uint32_t>("version");
  if (version != detail::kFormatVersion)
    throw FormatError("unsupported codes file version " + std::to_string(version), 4);
  CodeDatabase db = detail::read_codes_block(r);
  r.expect_eof("codes payload");
  return db;
}

// --- vector files ------------------------------------------------------------

struct VectorData {
  uint32_t dim = 0;
  uint64_t n = 0;
  std::vector<float> values;  // row-major

  const float* row(uint64_t i) const { return values.data() + i * dim; }
  float* row(uint64_t i) { return values.data() + i * dim; }
};

inline void write_vectors(const VectorData& v, const std::string& path) {
  if (v.values.size() != uint64_t{v.dim} * v.n)
    throw std::invalid_argument("write_vectors: value count does not match dim*n");
  detail::FileWriter w(path);
  w.put<uint32_t>(v.dim);
  w.put<uint64_t>(v.n);
  w.raw(v.values.data(), v.values.size() * sizeof(float));
  w.close();
}

inline VectorData read_vectors(const std::string& path) {
  detail::FileReader r(path);
  VectorData v;
  v.dim = r.get<uint32_t>("vector dimension");
  if (v.dim == 0) throw FormatError("vector dimension is zero", 0);
  v.n = r.get<uint64_t>("vector count");
  v.values.resize(uint64_t{v.dim} * v.n);
  r.raw(v.values.data(), v.values.size() * sizeof(float), "vector values");
  r.expect_eof("vector payload");
  return v;
}

// --- sign-projection encoding ------------------------------------------------

// Deterministic per seed: projection rows are standard normal draws; input vectors
// are centered on `mean` and quantized by sign, with 0 mapping to bit 1.
struct LshSpec {
  uint32_t dim = 0;
  uint32_t bits = 0;
  uint64_t seed = 0;
  std::vector<double> mean;        // size dim
  std::vector<double> projection;  // row-major bits x dim

  static LshSpec make(uint32_t dim, uint32_t bits, uint64_t seed) {
    if (dim == 0) throw std::invalid_argument("LshSpec: dimension must be positive");
    if (bits == 0 || bits > kMaxCodeBits) throw std::invalid_argument("LshSpec: bad code width");
    LshSpec s;
    s.dim = dim;
    s.bits = bits;
    s.seed = seed;
    s.mean.assign(dim, 0.0);
    s.projection.resize(uint64_t{bits} * dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& c : s.projection) c = gauss(rng);
    return s;
  }

  static LshSpec from_data(const VectorData& v, uint32_t bits, uint64_t seed) {
    LshSpec s = make(v.dim, bits, seed);
    if (v.n > 0) {
      for (uint64_t i = 0; i < v.n; ++i) {
        const float* row = v.row(i);
        for (uint32_t d = 0; d < v.dim; ++d) s.mean[d] += row[d];
      }
      for (double& m : s.mean) m /= static_cast<double>(v.n);
    }
    return s;
  }
};

inline CodeDatabase lsh_encode(const VectorData& v, const LshSpec& spec) {
  if (v.dim != spec.dim)
    throw std::invalid_argument("lsh_encode: vector dimension " + std::to_string(v.dim) +
                                " does not match spec dimension " + std::to_string(spec.dim));
  CodeDatabase db = CodeDatabase::zeros(spec.bits, v.n);
  std::vector<double> centered(v.dim);
  for (uint64_t i = 0; i < v.n; ++i) {
    const float* row = v.row(i);
    for (uint32_t d = 0; d < v.dim; ++d) centered[d] = row[d] - spec.mean[d];
    for (uint32_t j = 0; j < spec.bits; ++j) {
      const double* proj = spec.projection.data() + uint64_t{j} * spec.dim;
      double dot = 0.0;
      for (uint32_t d = 0; d < v.dim; ++d) dot += proj[d] * centered[d];
      if (dot >= 0.0) db.set_bit(i, j, true);
    }
  }
  return db;
}

// --- synthetic data ----------------------------------------------------------

inline CodeDatabase gen_uniform(uint64_t n, uint32_t bits, uint64_t seed) {
  CodeDatabase db = CodeDatabase::zeros(bits, n);
  std::mt19937_64 rng(seed);
  const uint32_t wpc = db.words_per_entry();
  const uint64_t mask = last_word_mask(bits);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t* w = db.mutable_words(i);
    for (uint32_t k = 0; k < wpc; ++k) w[k] = rng();
    w[wpc - 1] &= mask;
  }
  return db;
}

// Correlated codes: consecutive blocks of `block` positions all copy one
// independent uniform source bit.
inline CodeDatabase gen_duplicated_bits(uint64_t n, uint32_t bits, uint32_t block, uint64_t seed) {
  if (block == 0 || bits % block != 0)
    throw std::invalid_argument("gen_duplicated_bits: block size must divide the code width");
  const uint32_t sources = bits / block;
  CodeDatabase db = CodeDatabase::zeros(bits, n);
  std::mt19937_64 rng(seed);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t draw = 0;
    for (uint32_t s = 0; s < sources; ++s) {
      if ((s & 63) == 0) draw = rng();
      const bool v = (draw >> (s & 63)) & 1u;
      if (v)
        for (uint32_t t = 0; t < block; ++t) db.set_bit(i, s * block + t, true);
    }
  }
  return db;
}

inline VectorData gen_gaussian_vectors(uint64_t n, uint32_t dim, uint64_t seed) {
  VectorData v;
  v.dim = dim;
  v.n = n;
  v.values.resize(uint64_t{dim} * n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (float& f : v.values) f = static_cast<float>(gauss(rng));
  return v;
}

// Correlated vectors: consecutive groups of `group` dimensions share one gaussian
// source plus independent noise at the given amplitude.
inline VectorData gen_correlated_vectors(uint64_t n, uint32_t dim, uint32_t group, double noise,
                                         uint64_t seed) {
  if (group == 0 || dim % group != 0)
    throw std::invalid_argument("gen_correlated_vectors: group size must divide the dimension");
  VectorData v;
  v.dim = dim;
  v.n = n;
  v.values.resize(uint64_t{dim} * n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (uint64_t i = 0; i < n; ++i) {
    float* row = v.row(i);
    for (uint32_t g = 0; g < dim / group; ++g) {
      const double source = gauss(rng);
      for (uint32_t t = 0; t < group; ++t)
        row[g * group + t] = static_cast<float>(source + noise * gauss(rng));
    }
  }
  return v;
}

// --- index files -------------------------------------------------------------

inline void write_index(const MihIndex& idx, const std::string& path) {
  detail::FileWriter w(path);
  w.raw(detail::kIndexMagic, 4);
  w.put<uint32_t>(detail::kFormatVersion);
  detail::write_codes_block(w, idx.db());
  const Partition& p = idx.partition();
  w.put<uint32_t>(p.m());
  for (uint32_t j = 0; j < p.m(); ++j) {
    w.put<uint32_t>(p.length(j));
    for (uint32_t pos : p.positions(j)) w.put<uint32_t>(pos);
  }
  for (uint32_t j = 0; j < idx.num_tables(); ++j) {
    const SubstringTable& t = idx.table(j);
    w.put<uint32_t>(t.s());
    w.put<uint64_t>(t.size());
    w.put<uint64_t>(t.non_empty_groups());
    t.for_each_non_empty_group([&](uint64_t g, uint32_t mask, std::span<const uint32_t> block) {
      w.put<uint64_t>(g);
      w.put<uint32_t>(mask);
      w.raw(block.data(), block.size() * sizeof(uint32_t));
    });
  }
  w.close();
}

inline MihIndex read_index(const std::string& path) {
  detail::FileReader r(path);
  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, detail::kIndexMagic, 4) != 0)
    throw FormatError("not an index file (bad magic)", 0);
  const uint32_t version = r.get<uint32_t>("version");
  if (version != detail::kFormatVersion)
    throw FormatError("unsupported index file version " + std::to_string(version), 4);

  CodeDatabase db = detail::read_codes_block(r);

  const uint64_t part_at = r.offset();
  const uint32_t m = r.get<uint32_t>("substring count");
  if (m == 0 || m > db.bits()) throw FormatError("bad substring count", part_at);
  std::vector<std::vector<uint32_t>> subs(m);
  for (uint32_t j = 0; j < m; ++j) {
    const uint32_t len = r.get<uint32_t>("substring length");
    if (len > db.bits()) throw FormatError("bad substring length", r.offset() - 4);
    subs[j].resize(len);
    if (len > 0) r.raw(subs[j].data(), uint64_t{len} * 4, "substring positions");
  }
  Partition partition = [&] {
    try {
      return Partition(db.bits(), std::move(subs));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("invalid partition: ") + e.what(), part_at);
    }
  }();

  std::vector<SubstringTable> tables;
  tables.reserve(m);
  for (uint32_t j = 0; j < m; ++j) {
    const uint64_t table_at = r.offset();
    const uint32_t s = r.get<uint32_t>("table width");
    const uint64_t entries = r.get<uint64_t>("table entry count");
    const uint64_t groups = r.get<uint64_t>("table group count");
    std::vector<std::tuple<uint64_t, uint32_t, std::vector<uint32_t>>> recs;
    recs.reserve(groups);
    for (uint64_t g = 0; g < groups; ++g) {
      const uint64_t gid = r.get<uint64_t>("group id");
      const uint32_t mask = r.get<uint32_t>("group mask");
      if (mask == 0) throw FormatError("empty group mask", r.offset() - 4);
      const uint32_t c = static_cast<uint32_t>(std::popcount(mask));
      std::vector<uint32_t> starts(c + 1);
      r.raw(starts.data(), starts.size() * 4, "group starts");
      const uint32_t e = starts[c];
      std::vector<uint32_t> block = std::move(starts);
      block.resize(uint64_t{c} + 1 + e);
      if (e > 0) r.raw(block.data() + c + 1, uint64_t{e} * 4, "group entries");
      recs.emplace_back(gid, mask, std::move(block));
    }
    try {
      tables.push_back(SubstringTable::from_groups(s, entries, recs));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("invalid table ") + std::to_string(j) + ": " + e.what(),
                        table_at);
    }
  }
  r.expect_eof("index payload");
  try {
    return MihIndex::assemble(std::move(db), std::move(partition), std::move(tables));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent index: ") + e.what(), 8);
  }
}

}  // namespace mih
