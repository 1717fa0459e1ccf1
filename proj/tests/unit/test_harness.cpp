#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qsel/harness.hpp"

using namespace qsel;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qsel_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove(p);
  return p;
}

std::string run_sweep_text(SweepOptions opt) {
  std::ostringstream out, err;
  sweep(opt, out, err);
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Rows, CsvRoundTrip) {
  for (i64 n : {1, 5, 6, 34, 41}) {
    const SweepRow r = compute_row(n, 100);
    EXPECT_EQ(parse_csv(to_csv(r)), r);
  }
  const SweepRow all = compute_row(30, 50, kAllFamilies);
  EXPECT_EQ(parse_csv(to_csv(all)), all);
  EXPECT_THROW(parse_csv("1,2,3"), std::invalid_argument);
  EXPECT_THROW(parse_csv(std::string(to_csv(all)).replace(0, 2, "x,")), std::invalid_argument);
}

TEST(Rows, HeaderMatchesFieldCount) {
  const std::string h = csv_header();
  EXPECT_EQ(h.rfind("n,h,", 0), 0u);
  const std::string row = to_csv(compute_row(1, 10));
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), std::count(row.begin(), row.end(), ','));
}

TEST(Rows, JsonlCarriesSameValues) {
  const SweepRow r = compute_row(5, 100);
  const auto j = nlohmann::json::parse(to_jsonl(r));
  EXPECT_EQ(j.at("n").get<i64>(), 5);
  EXPECT_EQ(j.at("h").get<int>(), -3);
  EXPECT_EQ(j.at("rank_lo").get<int>(), 1);
}

TEST(Sweep, SmallRange) {
  std::ostringstream err;
  SweepOptions opt;
  opt.xmax = 10;
  opt.height = 100;
  const auto rows = sweep_rows(opt, err);
  std::vector<i64> ns;
  for (const auto& r : rows) ns.push_back(r.n);
  EXPECT_EQ(ns, (std::vector<i64>{1, 2, 3, 5, 6, 7, 10}));
  EXPECT_EQ(rows[0].phihat1, (FamilyCounts{2, 2, 2, 2}));
  for (const auto& r : rows) {
    EXPECT_EQ(r.h, congruence_label(r.n));
    ASSERT_TRUE(r.phihat1.sls.has_value());
    EXPECT_LE(r.phihat1.sol_lo, r.phihat1.sol_hi);
    EXPECT_LE(r.phihat1.sol_hi, *r.phihat1.sls);
    EXPECT_LE(*r.phihat1.sls, r.phihat1.ls);
    EXPECT_LE(r.phi1.sol_hi, r.phi1.ls);
  }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  SweepOptions opt;
  opt.xmax = 150;
  opt.height = 60;
  const std::string one = run_sweep_text(opt);
  EXPECT_EQ(one, run_sweep_text(opt));
  opt.threads = 4;
  EXPECT_EQ(one, run_sweep_text(opt));
  opt.format = Format::kJsonl;
  const std::string jsonl = run_sweep_text(opt);
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), std::count(one.begin(), one.end(), '\n') - 1);
}

TEST(Sweep, RejectsBadOptions) {
  SweepOptions opt;
  opt.xmax = 0;
  std::ostringstream out, err;
  EXPECT_THROW(sweep(opt, out, err), std::invalid_argument);
  opt.xmax = 5;
  opt.threads = 0;
  EXPECT_THROW(sweep(opt, out, err), std::invalid_argument);
}

TEST(Cache, ResumeServesStoredRows) {
  const fs::path path = temp_file("resume.csv");
  SweepOptions opt;
  opt.xmax = 60;
  opt.height = 40;
  opt.cache_path = path.string();
  const std::string first = run_sweep_text(opt);
  const std::string stored = slurp(path);
  EXPECT_EQ(first, run_sweep_text(opt));
  EXPECT_EQ(slurp(path), stored);  // nothing recomputed, nothing appended

  // A smaller height is served from the larger stored rows.
  opt.height = 20;
  std::ostringstream out, err;
  const SweepStats s = sweep(opt, out, err);
  EXPECT_EQ(s.from_cache, s.rows);
  fs::remove(path);
}

TEST(Cache, CorruptRecordIsReportedAndRecomputed) {
  const fs::path path = temp_file("corrupt.csv");
  SweepOptions opt;
  opt.xmax = 30;
  opt.height = 40;
  opt.cache_path = path.string();
  const std::string clean = run_sweep_text(opt);
  std::string bytes = slurp(path);
  const std::size_t second_line = bytes.find('\n') + 1;
  bytes[second_line + 12] = bytes[second_line + 12] == '7' ? '8' : '7';
  { std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes; }

  const RowCache cache(path.string());
  ASSERT_EQ(cache.corrupt().size(), 1u);
  EXPECT_EQ(cache.corrupt()[0].offset, second_line);

  std::ostringstream out, err;
  const SweepStats s = sweep(opt, out, err);
  EXPECT_EQ(s.corrupt, 1u);
  EXPECT_EQ(out.str(), clean);
  EXPECT_NE(err.str().find("corrupt record at byte " + std::to_string(second_line)), std::string::npos);
  fs::remove(path);
}

TEST(Cache, TruncatedTailIsCorruptNotFatal) {
  const fs::path path = temp_file("tail.csv");
  SweepOptions opt;
  opt.xmax = 12;
  opt.height = 30;
  opt.cache_path = path.string();
  const std::string clean = run_sweep_text(opt);
  std::string bytes = slurp(path);
  bytes.resize(bytes.size() - 5);
  { std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes; }
  EXPECT_EQ(RowCache(path.string()).corrupt().size(), 1u);
  EXPECT_EQ(run_sweep_text(opt), clean);
  fs::remove(path);
}

TEST(Cache, RecheckReplacesWrongRow) {
  const fs::path path = temp_file("recheck.csv");
  SweepRow bad = compute_row(101, 30);
  bad.rank_lo = bad.rank_hi + 1;  // impossible, but well formed
  {
    std::ofstream out(path, std::ios::binary);
    out << RowCache::encode(kIndexOneFamilies, bad) << '\n';
  }
  SweepOptions opt;
  opt.xmax = 101;
  opt.height = 30;
  opt.cache_path = path.string();
  std::ostringstream err;
  const auto rows = sweep_rows(opt, err);
  EXPECT_EQ(rows.back().n, 101);
  EXPECT_EQ(rows.back(), compute_row(101, 30));
  EXPECT_NE(err.str().find("n=101"), std::string::npos);
  fs::remove(path);
}

TEST(Reports, RatioExamples) {
  const std::vector<SweepRow> one{compute_row(1, 100)};
  const std::vector<i64> grid{1};
  const RatioReport t42 = ratio_report(one, Theorem::kT42, grid);
  ASSERT_EQ(t42.lines.size(), 1u);
  EXPECT_EQ(t42.lines[0].ratio_lo, 1.0);
  EXPECT_EQ(t42.lines[0].ratio_hi, 1.0);
  const RatioReport t61 = ratio_report(one, Theorem::kT61, grid);
  EXPECT_EQ(t61.lines[0].numerator_lo, 2);
  EXPECT_EQ(t61.lines[0].denominator, 2);
  EXPECT_EQ(t61.lines[0].ratio_lo, 1.0);
  const std::vector<i64> too_far{2};
  EXPECT_THROW(ratio_report(one, Theorem::kT42, too_far), CoverageError);
}

TEST(Reports, IntervalCollapsesWithoutUnknowns) {
  std::ostringstream err;
  SweepOptions opt;
  opt.xmax = 200;
  opt.height = 100;
  const auto rows = sweep_rows(opt, err);
  const std::vector<i64> grid{50, 100, 200};
  for (Theorem t : {Theorem::kT42, Theorem::kT55, Theorem::kT61}) {
    const RatioReport r = ratio_report(rows, t, grid);
    for (const RatioLine& l : r.lines) {
      EXPECT_LE(l.ratio_lo, l.ratio_hi);
      EXPECT_GE(l.ratio_lo, 0.0);
      EXPECT_LE(l.ratio_hi, 1.0);
      if (l.numerator_lo == l.numerator_hi) EXPECT_EQ(l.ratio_lo, l.ratio_hi);
    }
  }
}

TEST(Reports, AverageExamples) {
  std::ostringstream err;
  SweepOptions opt;
  opt.xmax = 10;
  opt.height = 50;
  const auto rows = sweep_rows(opt, err);
  const std::vector<i64> g1{1};
  const auto a1 = average_report(std::span(rows).first(1), g1);
  ASSERT_EQ(a1.size(), 1u);
  EXPECT_EQ(a1[0].h, 1);
  EXPECT_EQ(a1[0].mean_sel[0], 2.0);
  EXPECT_EQ(a1[0].mean_s[0], -1.0);

  const std::vector<i64> g10{10};
  const auto a10 = average_report(rows, g10);
  double total = 0, weighted = 0;
  i64 count = 0;
  for (const auto& l : a10) {
    count += l.count;
    weighted += l.mean_sel2 * static_cast<double>(l.count);
  }
  for (const auto& r : rows) total += std::ldexp(1.0, r.dim_sel2);
  EXPECT_EQ(count, 7);
  EXPECT_DOUBLE_EQ(weighted / 7, total / 7);
}

TEST(Reports, WriteFormats) {
  const std::vector<SweepRow> one{compute_row(1, 10)};
  const std::vector<i64> grid{1};
  std::ostringstream csv, jsonl;
  write_report(ratio_report(one, Theorem::kT61, grid), Format::kCsv, csv);
  write_report(ratio_report(one, Theorem::kT61, grid), Format::kJsonl, jsonl);
  EXPECT_NE(csv.str().find("1.000000"), std::string::npos);
  const auto j = nlohmann::json::parse(jsonl.str().substr(0, jsonl.str().find('\n')));
  EXPECT_EQ(j.at("X").get<i64>(), 1);
}

TEST(Verify, CleanAndFaulty) {
  std::ostringstream log;
  EXPECT_TRUE(verify(50, false, log).empty()) << log.str();
  std::ostringstream log2;
  const auto v = verify(50, true, log2);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v[0].what.find("("), std::string::npos);
  std::ostringstream log3;
  EXPECT_TRUE(verify(0, false, log3).empty());
}
