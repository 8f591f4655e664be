// Command-line front end: data generation, index builds, queries, cost-model
// curves, substring optimization, and the scan-vs-index benchmark.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 benchmark
// verification mismatch.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mih/mih.hpp"

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitMismatch = 3;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double elapsed_us(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

mih::Partition load_partition_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open partition file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("partition file is not valid JSON: " + path);
  if (!j.contains("bits") || !j.contains("substrings"))
    throw DataError("partition file needs 'bits' and 'substrings' fields: " + path);
  std::vector<std::vector<uint32_t>> subs =
      j.at("substrings").get<std::vector<std::vector<uint32_t>>>();
  return mih::Partition(j.at("bits").get<uint32_t>(), std::move(subs));
}

void save_partition_json(const mih::Partition& p, const std::string& path) {
  json j;
  j["bits"] = p.bits();
  j["substrings"] = p.substrings();
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

mih::Partition resolve_partition(uint32_t bits, uint64_t n, uint32_t tables,
                                 const std::string& partition_path) {
  if (!partition_path.empty()) {
    mih::Partition p = load_partition_json(partition_path);
    if (p.bits() != bits)
      throw DataError("partition width " + std::to_string(p.bits()) +
                      " does not match dataset width " + std::to_string(bits));
    return p;
  }
  const uint32_t m = tables > 0 ? tables : mih::choose_num_tables(bits, std::max<uint64_t>(n, 2));
  return mih::consecutive_partition(bits, m);
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
  std::string mode;
  std::string out;
  std::string dataset;  // input vectors for lsh
  uint64_t n = 0;
  uint32_t bits = 64;
  uint32_t block = 4;
  uint32_t dim = 32;
  uint32_t group = 4;
  double noise = 0.3;
  uint64_t seed = 0;
};

int run_gen(const GenArgs& a) {
  if (a.mode == "uniform") {
    mih::write_codes(mih::gen_uniform(a.n, a.bits, a.seed), a.out);
  } else if (a.mode == "correlated") {
    mih::write_codes(mih::gen_duplicated_bits(a.n, a.bits, a.block, a.seed), a.out);
  } else if (a.mode == "vectors") {
    mih::write_vectors(mih::gen_gaussian_vectors(a.n, a.dim, a.seed), a.out);
  } else if (a.mode == "correlated-vectors") {
    mih::write_vectors(mih::gen_correlated_vectors(a.n, a.dim, a.group, a.noise, a.seed), a.out);
  } else if (a.mode == "lsh") {
    if (a.dataset.empty()) throw UsageError("gen --mode lsh needs --dataset (a vector file)");
    mih::VectorData v = mih::read_vectors(a.dataset);
    mih::LshSpec spec = mih::LshSpec::from_data(v, a.bits, a.seed);
    mih::write_codes(mih::lsh_encode(v, spec), a.out);
  } else {
    throw UsageError("unknown gen mode: " + a.mode);
  }
  std::cout << "wrote " << a.out << "\n";
  return kExitOk;
}

// --- build -------------------------------------------------------------------

int run_build(const std::string& dataset, uint32_t tables, const std::string& partition_path,
              const std::string& out, bool stats) {
  mih::CodeDatabase db = mih::read_codes(dataset);
  mih::Partition p = resolve_partition(db.bits(), db.size(), tables, partition_path);
  mih::MihIndex idx = mih::MihIndex::build(std::move(db), p);
  if (stats) {
    for (uint32_t j = 0; j < idx.num_tables(); ++j) {
      mih::TableStats st = idx.table(j).stats();
      std::cout << "table " << j << ": s=" << idx.table(j).s()
                << " entries=" << st.total_entries << " buckets=" << st.non_empty_buckets
                << " max_bucket=" << st.max_bucket_size << " est_bytes=" << st.estimated_bytes
                << "\n";
    }
  }
  mih::write_index(idx, out);
  std::cout << "wrote " << out << " (n=" << idx.db().size() << ", m=" << idx.num_tables()
            << ")\n";
  return kExitOk;
}

// --- query -------------------------------------------------------------------

int run_query(const std::string& index_path, const std::string& queries_path,
              std::optional<uint32_t> k, std::optional<uint32_t> radius, const std::string& out,
              const std::string& format) {
  if (k.has_value() == radius.has_value())
    throw UsageError("query needs exactly one of --k or --radius");
  mih::MihIndex idx = mih::read_index(index_path);
  mih::CodeDatabase queries = mih::read_codes(queries_path);
  if (queries.bits() != idx.db().bits())
    throw DataError("query width " + std::to_string(queries.bits()) + " does not match index width " +
                    std::to_string(idx.db().bits()));

  mih::SearchScratch scratch;
  json report = json::array();
  std::ostringstream csv;
  csv << "query,rank,id,dist\n";
  for (uint64_t qi = 0; qi < queries.size(); ++qi) {
    mih::SearchTrace trace;
    mih::Neighbors res = k ? idx.knn_search(queries.code(qi), *k, &trace, &scratch)
                           : idx.range_search(queries.code(qi), *radius, &trace, &scratch);
    json row;
    row["query"] = qi;
    row["lookups"] = trace.lookups;
    row["unique_candidates"] = trace.unique_candidates;
    row["final_radius"] = trace.final_radius;
    json nb = json::array();
    for (size_t i = 0; i < res.size(); ++i) {
      nb.push_back({{"id", res[i].id}, {"dist", res[i].dist}});
      csv << qi << "," << i << "," << res[i].id << "," << res[i].dist << "\n";
    }
    row["neighbors"] = std::move(nb);
    report.push_back(std::move(row));
  }

  const std::string text = format == "json" ? report.dump(2) + "\n" : csv.str();
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot open for writing: " + out);
    f << text;
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

// --- benchmark ---------------------------------------------------------------

struct TimingRow {
  std::string method;
  std::string param_kind;  // "k" or "r"
  uint32_t param = 0;
  uint64_t queries = 0;
  uint64_t warmup_queries = 0;
  uint32_t threads = 1;
  double mean_us = 0, median_us = 0, p95_us = 0;
  double mean_lookups = 0, mean_unique = 0;
  double speedup = 0;  // scan mean / mih mean; 0 when not applicable
};

struct PerQueryStats {
  std::vector<double> us;
  double mean_lookups = 0, mean_unique = 0;

  void finalize_into(TimingRow& row) {
    std::sort(us.begin(), us.end());
    double sum = 0;
    for (double t : us) sum += t;
    row.queries = us.size();
    row.mean_us = us.empty() ? 0 : sum / us.size();
    row.median_us = us.empty() ? 0 : us[us.size() / 2];
    row.p95_us = us.empty() ? 0 : us[std::min(us.size() - 1, (us.size() * 95) / 100)];
    row.mean_lookups = mean_lookups;
    row.mean_unique = mean_unique;
  }
};

void emit_report(const std::vector<TimingRow>& rows, const json& config, const std::string& out,
                 const std::string& format) {
  std::ostringstream csv;
  csv << "method,param_kind,param,queries,warmup_queries,threads,mean_us,median_us,p95_us,"
         "mean_lookups,mean_unique_candidates,speedup_vs_scan\n";
  json jrows = json::array();
  for (const TimingRow& r : rows) {
    csv << r.method << "," << r.param_kind << "," << r.param << "," << r.queries << ","
        << r.warmup_queries << "," << r.threads << "," << r.mean_us << "," << r.median_us << ","
        << r.p95_us << "," << r.mean_lookups << "," << r.mean_unique << "," << r.speedup << "\n";
    jrows.push_back({{"method", r.method},
                     {"param_kind", r.param_kind},
                     {"param", r.param},
                     {"queries", r.queries},
                     {"warmup_queries", r.warmup_queries},
                     {"threads", r.threads},
                     {"mean_us", r.mean_us},
                     {"median_us", r.median_us},
                     {"p95_us", r.p95_us},
                     {"mean_lookups", r.mean_lookups},
                     {"mean_unique_candidates", r.mean_unique},
                     {"speedup_vs_scan", r.speedup}});
  }
  json full = {{"config", config}, {"rows", std::move(jrows)}};
  const std::string text = format == "json" ? full.dump(2) + "\n" : csv.str();
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot open for writing: " + out);
    f << text;
    std::cout << "wrote " << out << "\n";
  }
}

struct BenchArgs {
  std::string dataset, queries, partition, out, format = "csv";
  uint32_t tables = 0;
  std::vector<uint32_t> ks, radii;
  uint64_t warmup = 10;
  uint32_t threads = 1;
};

int run_benchmark(const BenchArgs& a) {
  if (a.ks.empty() && a.radii.empty())
    throw UsageError("benchmark needs at least one of --k or --radius");
  mih::CodeDatabase db = mih::read_codes(a.dataset);
  mih::CodeDatabase queries = mih::read_codes(a.queries);
  if (queries.bits() != db.bits()) throw DataError("query and dataset widths differ");
  for (uint32_t k : a.ks)
    if (k > db.size()) throw DataError("k=" + std::to_string(k) + " exceeds database size");

  mih::Partition p = resolve_partition(db.bits(), db.size(), a.tables, a.partition);
  const auto t0 = Clock::now();
  mih::MihIndex idx = mih::MihIndex::build(db, p);
  const auto t1 = Clock::now();
  std::cerr << "index built in " << elapsed_us(t0, t1) / 1e6 << " s (n=" << db.size()
            << ", m=" << p.m() << ")\n";

  // Correctness gate: every timed configuration must agree with the scan oracle
  // on every query before any timing is reported.
  mih::SearchScratch scratch;
  for (uint64_t qi = 0; qi < queries.size(); ++qi) {
    mih::BinaryCode q = queries.code(qi);
    for (uint32_t k : a.ks) {
      mih::Neighbors got = idx.knn_search(q, k, nullptr, &scratch);
      mih::Neighbors want = mih::scan_knn(db, q, k);
      bool ok = got.size() == want.size();
      for (size_t i = 0; ok && i < got.size(); ++i) ok = got[i].dist == want[i].dist;
      if (!ok) {
        std::cerr << "verification mismatch: knn k=" << k << " query " << qi << "\n";
        return kExitMismatch;
      }
    }
    for (uint32_t r : a.radii) {
      mih::Neighbors got = idx.range_search(q, r, nullptr, &scratch);
      mih::Neighbors want = mih::scan_range(db, q, r);
      bool ok = got.size() == want.size();
      for (size_t i = 0; ok && i < got.size(); ++i)
        ok = got[i].id == want[i].id && got[i].dist == want[i].dist;
      if (!ok) {
        std::cerr << "verification mismatch: range r=" << r << " query " << qi << "\n";
        return kExitMismatch;
      }
    }
  }
  std::cerr << "verification passed on " << queries.size() << " queries\n";

  const uint64_t warmup = std::min<uint64_t>(a.warmup, queries.size());
  std::vector<TimingRow> rows;

  auto time_param = [&](const std::string& kind, uint32_t param) {
    // warm-up pass over a prefix of the queries, untimed
    for (uint64_t qi = 0; qi < warmup; ++qi) {
      mih::BinaryCode q = queries.code(qi);
      if (kind == "k")
        idx.knn_search(q, param, nullptr, &scratch);
      else
        idx.range_search(q, param, nullptr, &scratch);
    }

    PerQueryStats mih_stats, scan_stats;
    for (uint64_t qi = 0; qi < queries.size(); ++qi) {
      mih::BinaryCode q = queries.code(qi);
      mih::SearchTrace trace;
      const auto s0 = Clock::now();
      if (kind == "k")
        idx.knn_search(q, param, &trace, &scratch);
      else
        idx.range_search(q, param, &trace, &scratch);
      const auto s1 = Clock::now();
      mih_stats.us.push_back(elapsed_us(s0, s1));
      mih_stats.mean_lookups += static_cast<double>(trace.lookups);
      mih_stats.mean_unique += static_cast<double>(trace.unique_candidates);

      const auto c0 = Clock::now();
      if (kind == "k")
        mih::scan_knn(db, q, param);
      else
        mih::scan_range(db, q, param);
      const auto c1 = Clock::now();
      scan_stats.us.push_back(elapsed_us(c0, c1));
      scan_stats.mean_lookups += static_cast<double>(db.size());
      scan_stats.mean_unique += static_cast<double>(db.size());
    }
    mih_stats.mean_lookups /= queries.size();
    mih_stats.mean_unique /= queries.size();
    scan_stats.mean_lookups /= queries.size();
    scan_stats.mean_unique /= queries.size();

    TimingRow mr, sr;
    mr.method = "mih";
    sr.method = "scan";
    mr.param_kind = sr.param_kind = kind;
    mr.param = sr.param = param;
    mr.warmup_queries = sr.warmup_queries = warmup;
    mih_stats.finalize_into(mr);
    scan_stats.finalize_into(sr);
    mr.speedup = mr.mean_us > 0 ? sr.mean_us / mr.mean_us : 0;
    rows.push_back(mr);
    rows.push_back(sr);

    // opt-in parallel mode: measured separately, never part of the speedup figure
    if (a.threads > 1) {
      std::vector<double> wall(queries.size());
      std::vector<std::thread> pool;
      std::vector<mih::SearchScratch> scratches(a.threads);
      const auto w0 = Clock::now();
      for (uint32_t t = 0; t < a.threads; ++t) {
        pool.emplace_back([&, t] {
          for (uint64_t qi = t; qi < queries.size(); qi += a.threads) {
            mih::BinaryCode q = queries.code(qi);
            const auto p0 = Clock::now();
            if (kind == "k")
              idx.knn_search(q, param, nullptr, &scratches[t]);
            else
              idx.range_search(q, param, nullptr, &scratches[t]);
            wall[qi] = elapsed_us(p0, Clock::now());
          }
        });
      }
      for (auto& th : pool) th.join();
      const double total_s = elapsed_us(w0, Clock::now()) / 1e6;
      TimingRow pr;
      pr.method = "mih-parallel";
      pr.param_kind = kind;
      pr.param = param;
      pr.threads = a.threads;
      pr.warmup_queries = warmup;
      PerQueryStats ps;
      ps.us = std::move(wall);
      ps.mean_lookups = mih_stats.mean_lookups;
      ps.mean_unique = mih_stats.mean_unique;
      ps.finalize_into(pr);
      rows.push_back(pr);
      std::cerr << "parallel pass (" << a.threads << " threads): " << total_s << " s wall\n";
    }
  };

  for (uint32_t k : a.ks) time_param("k", k);
  for (uint32_t r : a.radii) time_param("r", r);

  json config = {{"dataset", a.dataset},   {"queries", a.queries},
                 {"n", db.size()},         {"bits", db.bits()},
                 {"tables", p.m()},        {"warmup", warmup},
                 {"threads", a.threads},   {"timing", "single-threaded wall clock"},
                 {"build_seconds", elapsed_us(t0, t1) / 1e6}};
  emit_report(rows, config, a.out, a.format);
  return kExitOk;
}

// --- costmodel ---------------------------------------------------------------

int run_costmodel_ball(uint32_t bits, uint32_t radius_max, const std::string& out) {
  std::ostringstream csv;
  csv << "r,ball,entropy_bound\n";
  for (uint32_t r = 0; r <= std::min(radius_max, bits); ++r) {
    csv << r << "," << mih::ball_size(bits, r).get_str() << ",";
    const double eps = static_cast<double>(r) / bits;
    if (r == 0)
      csv << 1.0;
    else if (eps <= 0.5)
      csv << mih::binomial_sum_bound(bits, eps);
    else
      csv << "";
    csv << "\n";
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot open for writing: " + out);
    f << csv.str();
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

int run_costmodel_cost(uint32_t bits, uint32_t radius, uint64_t n, const std::string& out) {
  std::ostringstream csv;
  csv << "s,lookups,lookup_bound,cost,cost_bound,split_cost\n";
  for (uint32_t s = 1; s <= std::min(bits, 64u); ++s) {
    csv << s << ",";
    if (bits % s == 0) {
      mih::CostPoint cp = mih::expected_cost(bits, s, radius, n);
      csv << cp.lookups.get_str() << "," << cp.lookup_bound << "," << cp.cost << ","
          << cp.cost_bound << "," << mih::split_cost(bits, s, radius, n);
    } else {
      // between divisors the model still defines a cost with fractional tables
      csv << ",," << mih::cost_at_width(bits, s, radius, n) << ",,";
    }
    csv << "\n";
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot open for writing: " + out);
    f << csv.str();
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

int run_costmodel_single(const std::string& dataset, const std::string& queries_path, uint32_t k,
                         uint32_t tables, const std::string& out) {
  mih::CodeDatabase db = mih::read_codes(dataset);
  mih::CodeDatabase queries = mih::read_codes(queries_path);
  if (queries.bits() != db.bits()) throw DataError("query and dataset widths differ");
  mih::Partition p = resolve_partition(db.bits(), db.size(), tables, "");
  mih::MihIndex idx = mih::MihIndex::build(db, p);

  mih::SearchScratch scratch;
  std::vector<uint32_t> radii;
  double mean_mih_lookups = 0;
  for (uint64_t qi = 0; qi < queries.size(); ++qi) {
    mih::SearchTrace trace;
    idx.knn_search(queries.code(qi), k, &trace, &scratch);
    radii.push_back(trace.final_radius);
    mean_mih_lookups += static_cast<double>(trace.lookups);
  }
  mean_mih_lookups /= queries.size();
  mih::SingleTableSummary st = mih::single_table_lookups(db.bits(), radii);

  std::ostringstream text;
  text << "queries," << st.queries << "\n"
       << "n," << db.size() << "\n"
       << "tables," << p.m() << "\n"
       << "mean_mih_lookups," << mean_mih_lookups << "\n"
       << "mean_single_table_lookups," << st.mean << "\n"
       << "min_single_table_lookups," << st.min.get_str() << "\n"
       << "max_single_table_lookups," << st.max.get_str() << "\n"
       << "single_over_n," << st.mean / static_cast<double>(db.size()) << "\n"
       << "single_over_mih," << st.mean / mean_mih_lookups << "\n";
  if (out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot open for writing: " + out);
    f << text.str();
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

// --- optimize ----------------------------------------------------------------

int run_optimize(const std::string& dataset, uint32_t tables, uint64_t seed,
                 const std::string& out) {
  mih::CodeDatabase db = mih::read_codes(dataset);
  const uint32_t m =
      tables > 0 ? tables : mih::choose_num_tables(db.bits(), std::max<uint64_t>(db.size(), 2));
  mih::CorrelationMatrix corr = mih::estimate_correlations(db);
  mih::Partition p = mih::greedy_assign(corr, m, seed);
  save_partition_json(p, out);
  std::cout << "wrote " << out << " (m=" << m << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact nearest-neighbor search in Hamming space via substring hash tables"};
  app.require_subcommand(1);

  // gen
  GenArgs gen;
  CLI::App* cgen = app.add_subcommand("gen", "generate synthetic codes or vectors");
  cgen->add_option("--mode", gen.mode,
                   "uniform | correlated | vectors | correlated-vectors | lsh")
      ->required();
  cgen->add_option("--n", gen.n, "number of items")->default_val(0);
  cgen->add_option("--bits", gen.bits, "code width in bits");
  cgen->add_option("--block", gen.block, "duplicated-block width (correlated codes)");
  cgen->add_option("--dim", gen.dim, "vector dimension");
  cgen->add_option("--group", gen.group, "correlated dimension group size");
  cgen->add_option("--noise", gen.noise, "noise amplitude for correlated vectors");
  cgen->add_option("--seed", gen.seed, "rng seed");
  cgen->add_option("--dataset", gen.dataset, "input vector file (lsh mode)");
  cgen->add_option("--out", gen.out, "output path")->required();

  // build
  std::string b_dataset, b_partition, b_out;
  uint32_t b_tables = 0;
  bool b_stats = false;
  CLI::App* cbuild = app.add_subcommand("build", "build an index from a codes file");
  cbuild->add_option("--dataset", b_dataset, "codes file")->required();
  cbuild->add_option("--tables", b_tables, "substring count (default: heuristic)");
  cbuild->add_option("--partition", b_partition, "partition JSON file");
  cbuild->add_flag("--stats", b_stats, "print per-table statistics");
  cbuild->add_option("--out", b_out, "index output path")->required();

  // query
  std::string q_index, q_queries, q_out, q_format = "csv";
  std::optional<uint32_t> q_k, q_radius;
  CLI::App* cquery = app.add_subcommand("query", "run queries against a saved index");
  cquery->add_option("--index", q_index, "index file")->required();
  cquery->add_option("--queries", q_queries, "codes file with queries")->required();
  cquery->add_option("--k", q_k, "nearest-neighbor count");
  cquery->add_option("--radius", q_radius, "search radius");
  cquery->add_option("--out", q_out, "output path (default stdout)");
  cquery->add_option("--format", q_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  // benchmark
  BenchArgs bench;
  CLI::App* cbench = app.add_subcommand(
      "benchmark", "verify against linear scan, then time both methods");
  cbench->add_option("--dataset", bench.dataset, "codes file")->required();
  cbench->add_option("--queries", bench.queries, "codes file with queries")->required();
  cbench->add_option("--tables", bench.tables, "substring count (default: heuristic)");
  cbench->add_option("--partition", bench.partition, "partition JSON file");
  cbench->add_option("--k", bench.ks, "k values to benchmark");
  cbench->add_option("--radius", bench.radii, "radii to benchmark");
  cbench->add_option("--warmup", bench.warmup, "untimed warm-up queries per configuration");
  cbench->add_option("--threads", bench.threads, "opt-in parallel pass (reported separately)");
  cbench->add_option("--out", bench.out, "report path (default stdout)");
  cbench->add_option("--format", bench.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  // costmodel
  std::string cm_what = "cost", cm_out, cm_dataset, cm_queries;
  uint32_t cm_bits = 64, cm_radius = 8, cm_radius_max = 16, cm_k = 10, cm_tables = 0;
  uint64_t cm_n = 1000000;
  CLI::App* ccost = app.add_subcommand("costmodel", "emit analytic cost curves");
  ccost->add_option("--what", cm_what, "ball | cost | single-table")
      ->check(CLI::IsMember({"ball", "cost", "single-table"}));
  ccost->add_option("--bits", cm_bits, "code width");
  ccost->add_option("--radius", cm_radius, "search radius (cost curve)");
  ccost->add_option("--radius-max", cm_radius_max, "largest radius (ball curve)");
  ccost->add_option("--n", cm_n, "database size (cost curve)");
  ccost->add_option("--dataset", cm_dataset, "codes file (single-table mode)");
  ccost->add_option("--queries", cm_queries, "query codes file (single-table mode)");
  ccost->add_option("--k", cm_k, "k for single-table mode");
  ccost->add_option("--tables", cm_tables, "substring count (single-table mode)");
  ccost->add_option("--out", cm_out, "output path (default stdout)");

  // optimize
  std::string o_dataset, o_out;
  uint32_t o_tables = 0;
  uint64_t o_seed = 0;
  CLI::App* copt = app.add_subcommand("optimize", "fit a correlation-aware partition");
  copt->add_option("--dataset", o_dataset, "codes file")->required();
  copt->add_option("--tables", o_tables, "substring count (default: heuristic)");
  copt->add_option("--seed", o_seed, "rng seed");
  copt->add_option("--out", o_out, "partition JSON output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cgen) return run_gen(gen);
    if (*cbuild) return run_build(b_dataset, b_tables, b_partition, b_out, b_stats);
    if (*cquery) return run_query(q_index, q_queries, q_k, q_radius, q_out, q_format);
    if (*cbench) return run_benchmark(bench);
    if (*ccost) {
      if (cm_what == "ball") return run_costmodel_ball(cm_bits, cm_radius_max, cm_out);
      if (cm_what == "single-table") {
        if (cm_dataset.empty() || cm_queries.empty())
          throw UsageError("costmodel --what single-table needs --dataset and --queries");
        return run_costmodel_single(cm_dataset, cm_queries, cm_k, cm_tables, cm_out);
      }
      return run_costmodel_cost(cm_bits, cm_radius, cm_n, cm_out);
    }
    if (*copt) return run_optimize(o_dataset, o_tables, o_seed, o_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const mih::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
