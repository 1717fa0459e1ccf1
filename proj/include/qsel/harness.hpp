#pragma once

// Sweeps over squarefree n, the resumable row cache, and the ratio and
// average reports built from the rows.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsel/solubility.hpp"

namespace qsel {

// Bump whenever a change can alter any row.
inline constexpr std::string_view kCodeVersion = "qsel-4";

struct SweepRow {
  i64 n = 1;
  int h = 1;
  std::array<int, kIsogenyCount> dim_sel{};  // phi1, phi1hat, phi2, ...
  int dim_sel2 = 0;
  FamilyCounts phi1;
  FamilyCounts phihat1;
  int rank_lo = 0;
  int rank_hi = 0;
  i64 height = kSweepHeight;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

SweepRow make_row(const Analysis& a);
SweepRow compute_row(i64 n, i64 H, FamilyMask mask = kIndexOneFamilies);

std::string csv_header();
std::string to_csv(const SweepRow& r);
std::string to_jsonl(const SweepRow& r);
/// Inverse of to_csv; throws std::invalid_argument on malformed input.
SweepRow parse_csv(std::string_view line);

enum class Format { kCsv, kJsonl };

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorruptRecord {
  std::uint64_t offset = 0;
  std::string reason;
};

// Append-only cache: one line per row, "version,mask,<csv row>,crc32".
class RowCache {
 public:
  /// Reads every record of path (missing file = empty cache). Bad records
  /// are collected in corrupt(), not thrown.
  explicit RowCache(std::string path);

  const std::vector<CorruptRecord>& corrupt() const { return corrupt_; }
  /// A stored row for (n, mask) with height >= H, preferring the largest height.
  std::optional<SweepRow> find(i64 n, FamilyMask mask, i64 H) const;
  /// All current-version rows, best height per (n, mask).
  std::vector<std::pair<FamilyMask, SweepRow>> rows() const;
  /// Throws CacheError if the file cannot be written.
  void append(FamilyMask mask, const SweepRow& row);

  static std::string encode(FamilyMask mask, const SweepRow& row);

 private:
  std::string path_;
  std::map<std::pair<i64, FamilyMask>, SweepRow> rows_;
  std::vector<CorruptRecord> corrupt_;
};

struct SweepOptions {
  i64 xmax = 1;
  FamilyMask mask = kIndexOneFamilies;
  i64 height = kSweepHeight;
  int threads = 1;
  std::optional<std::string> cache_path;
  Format format = Format::kCsv;
};

struct SweepStats {
  std::size_t rows = 0;
  std::size_t from_cache = 0;
  std::size_t corrupt = 0;
  std::size_t recheck_failures = 0;
};

/// Rows for every squarefree n <= xmax in ascending order, written to out
/// (with a header line for CSV). Diagnostics go to err.
SweepStats sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);
/// Same rows, returned instead of printed.
std::vector<SweepRow> sweep_rows(const SweepOptions& opt, std::ostream& err);

enum class Theorem { kT42, kT55, kT61 };
std::optional<Theorem> parse_theorem(std::string_view text);

struct RatioLine {
  i64 x = 0;
  i64 numerator_lo = 0;
  i64 numerator_hi = 0;
  i64 denominator = 0;
  double ratio_lo = 0;
  double ratio_hi = 0;
  // Squarefree n = 5, 6, 7 mod 8 with rank_lo >= 1, as a fraction of all such n.
  i64 rank_positive = 0;
  i64 rank_candidates = 0;
  double rank_fraction = 0;
};

struct RatioReport {
  Theorem theorem = Theorem::kT42;
  std::vector<RatioLine> lines;
};

struct CoverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// rows must contain every squarefree n up to the largest grid point.
RatioReport ratio_report(std::span<const SweepRow> rows, Theorem t, std::span<const i64> grid);

struct AverageLine {
  i64 x = 0;
  int h = 1;
  i64 count = 0;
  std::array<double, kIsogenyCount> mean_sel{};
  double mean_sel2 = 0;
  std::array<double, 3> mean_s{};  // dim Sel^phihat_i - 2
  double ref_loglog = 0;           // (log log X) / 2
};

std::vector<AverageLine> average_report(std::span<const SweepRow> rows, std::span<const i64> grid);

void write_report(const RatioReport& r, Format f, std::ostream& out);
void write_report(std::span<const AverageLine> lines, Format f, std::ostream& out);

inline const std::vector<i64> kDefaultGrid{1000, 10000, 100000};

struct Violation {
  i64 n = 0;
  std::string what;
};

/// Cross-module consistency checks for every squarefree n <= xmax. With
/// inject_fault the first symbol evaluation is negated.
std::vector<Violation> verify(i64 xmax, bool inject_fault, std::ostream& log);

}  // namespace qsel
