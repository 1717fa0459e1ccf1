#include "qsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

namespace qsel {

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 19> kColumns{
    "n",           "h",          "dim_sel_phi1",   "dim_sel_phihat1", "dim_sel_phi2",   "dim_sel_phihat2",
    "dim_sel_phi3", "dim_sel_phihat3", "dim_sel2",  "ls_phi1",         "sol_lo_phi1",    "sol_hi_phi1",
    "ls_phihat1",  "sls_phihat1", "sol_lo_phihat1", "sol_hi_phihat1", "rank_lo",        "rank_hi",
    "H"};

std::array<i64, 19> fields(const SweepRow& r) {
  return {r.n,
          r.h,
          r.dim_sel[0],
          r.dim_sel[1],
          r.dim_sel[2],
          r.dim_sel[3],
          r.dim_sel[4],
          r.dim_sel[5],
          r.dim_sel2,
          r.phi1.ls,
          r.phi1.sol_lo,
          r.phi1.sol_hi,
          r.phihat1.ls,
          r.phihat1.sls.value_or(0),
          r.phihat1.sol_lo,
          r.phihat1.sol_hi,
          r.rank_lo,
          r.rank_hi,
          r.height};
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

i64 parse_int(std::string_view s) {
  i64 v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return v;
}

std::string crc_hex(std::string_view s) {
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << crc.checksum();
  return os.str();
}

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

// Cached rows are re-derived for this share of n on every run.
bool recheck_sample(i64 n) { return n % 100 == 1; }

}  // namespace

SweepRow make_row(const Analysis& a) {
  SweepRow r;
  r.n = a.descent.n;
  r.h = congruence_label(r.n);
  for (int i = 0; i < kIsogenyCount; ++i) r.dim_sel[i] = a.descent.selmer[i].dim();
  r.dim_sel2 = a.descent.sel2.dim();
  r.phi1 = a.of(Isogeny::kPhi1).counts;
  r.phihat1 = a.of(Isogeny::kPhiHat1).counts;
  r.rank_lo = a.rank.rank_lower;
  r.rank_hi = a.rank.rank_upper;
  r.height = a.height;
  return r;
}

SweepRow compute_row(i64 n, i64 H, FamilyMask mask) { return make_row(analyze(n, H, mask)); }

std::string csv_header() {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) out += ',';
    out += kColumns[i];
  }
  return out;
}

std::string to_csv(const SweepRow& r) {
  std::string out;
  const auto f = fields(r);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(f[i]);
  }
  return out;
}

std::string to_jsonl(const SweepRow& r) {
  json j;
  const auto f = fields(r);
  for (std::size_t i = 0; i < f.size(); ++i) j[std::string(kColumns[i])] = f[i];
  return j.dump();
}

SweepRow parse_csv(std::string_view line) {
  const auto parts = split(line, ',');
  if (parts.size() != kColumns.size())
    throw std::invalid_argument("expected " + std::to_string(kColumns.size()) + " fields, got " +
                                std::to_string(parts.size()));
  std::array<i64, 19> v{};
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_int(parts[i]);
  SweepRow r;
  r.n = v[0];
  r.h = static_cast<int>(v[1]);
  for (int i = 0; i < kIsogenyCount; ++i) r.dim_sel[i] = static_cast<int>(v[2 + i]);
  r.dim_sel2 = static_cast<int>(v[8]);
  r.phi1 = {static_cast<int>(v[9]), std::nullopt, static_cast<int>(v[10]), static_cast<int>(v[11])};
  r.phihat1 = {static_cast<int>(v[12]), static_cast<int>(v[13]), static_cast<int>(v[14]), static_cast<int>(v[15])};
  r.rank_lo = static_cast<int>(v[16]);
  r.rank_hi = static_cast<int>(v[17]);
  r.height = v[18];
  if (r.n < 1 || r.height < 1) throw std::invalid_argument("n and H must be positive");
  return r;
}

// ---- cache ----

std::string RowCache::encode(FamilyMask mask, const SweepRow& row) {
  const std::string body = std::string(kCodeVersion) + "," + std::to_string(mask) + "," + to_csv(row);
  return body + "," + crc_hex(body);
}

RowCache::RowCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  std::size_t pos = 0;
  while (pos < data.size()) {
    const std::size_t end = data.find('\n', pos);
    const std::uint64_t offset = pos;
    if (end == std::string::npos) {
      corrupt_.push_back({offset, "truncated record"});
      break;
    }
    const std::string_view line(data.data() + pos, end - pos);
    pos = end + 1;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos || crc_hex(line.substr(0, comma)) != line.substr(comma + 1)) {
      corrupt_.push_back({offset, "checksum mismatch"});
      continue;
    }
    const std::string_view body = line.substr(0, comma);
    const std::size_t c1 = body.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      corrupt_.push_back({offset, "missing key fields"});
      continue;
    }
    if (body.substr(0, c1) != kCodeVersion) continue;  // rows of other code versions are ignored
    try {
      const auto mask = static_cast<FamilyMask>(parse_int(body.substr(c1 + 1, c2 - c1 - 1)));
      SweepRow row = parse_csv(body.substr(c2 + 1));
      auto [it, fresh] = rows_.try_emplace({row.n, mask}, row);
      if (!fresh && row.height > it->second.height) it->second = row;
    } catch (const std::invalid_argument& e) {
      corrupt_.push_back({offset, e.what()});
    }
  }
}

std::optional<SweepRow> RowCache::find(i64 n, FamilyMask mask, i64 H) const {
  const auto it = rows_.find({n, mask});
  if (it == rows_.end() || it->second.height < H) return std::nullopt;
  return it->second;
}

std::vector<std::pair<FamilyMask, SweepRow>> RowCache::rows() const {
  std::vector<std::pair<FamilyMask, SweepRow>> out;
  for (const auto& [key, row] : rows_) out.emplace_back(key.second, row);
  return out;
}

void RowCache::append(FamilyMask mask, const SweepRow& row) {
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << encode(mask, row) << '\n';
  out.flush();
  if (!out) throw CacheError("cannot write cache " + path_);
  auto [it, fresh] = rows_.try_emplace({row.n, mask}, row);
  if (!fresh && row.height >= it->second.height) it->second = row;
}

// ---- sweep ----

namespace {

struct Emitter {
  Format format;
  std::ostream& out;
  void header() {
    if (format == Format::kCsv) out << csv_header() << '\n';
  }
  void row(const SweepRow& r) { out << (format == Format::kCsv ? to_csv(r) : to_jsonl(r)) << '\n'; }
};

SweepStats run_sweep(const SweepOptions& opt, std::ostream& err, const std::function<void(const SweepRow&)>& emit) {
  if (opt.xmax < 1) throw std::invalid_argument("sweep: xmax must be at least 1");
  if (opt.height < 1) throw std::invalid_argument("sweep: height must be positive");
  if (opt.threads < 1) throw std::invalid_argument("sweep: threads must be at least 1");
  if (opt.mask == 0) throw std::invalid_argument("sweep: empty family mask");

  std::optional<RowCache> cache;
  if (opt.cache_path) {
    cache.emplace(*opt.cache_path);
    std::ofstream probe(*opt.cache_path, std::ios::binary | std::ios::app);
    if (!probe) throw CacheError("cannot write cache " + *opt.cache_path);
    for (const auto& c : cache->corrupt())
      err << "cache " << *opt.cache_path << ": corrupt record at byte " << c.offset << " (" << c.reason
          << "), recomputing\n";
  }

  SweepStats stats;
  if (cache) stats.corrupt = cache->corrupt().size();
  const std::vector<i64> ns = enumerate_squarefree(opt.xmax);
  std::vector<std::optional<SweepRow>> cached(ns.size());
  if (cache)
    for (std::size_t i = 0; i < ns.size(); ++i) cached[i] = cache->find(ns[i], opt.mask, opt.height);

  std::vector<std::optional<SweepRow>> done(ns.size());
  std::vector<char> fresh(ns.size(), 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= ns.size()) return;
      std::optional<SweepRow> row = cached[i];
      bool computed = false;
      try {
        if (!row) {
          row = compute_row(ns[i], opt.height, opt.mask);
          computed = true;
        } else if (recheck_sample(ns[i])) {
          SweepRow again = compute_row(ns[i], row->height, opt.mask);
          if (again != *row) {
            std::lock_guard lock(mu);
            err << "cache row for n=" << ns[i] << " differs from a fresh computation, replacing it\n";
            ++stats.recheck_failures;
            row = again;
            computed = true;
          }
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = ns.size();
        cv.notify_all();
        return;
      }
      std::lock_guard lock(mu);
      done[i] = std::move(row);
      fresh[i] = computed;
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  const int extra = opt.threads - 1;
  for (int t = 0; t < extra; ++t) pool.emplace_back(worker);

  // The calling thread works too when single-threaded; otherwise it is the writer.
  if (extra == 0) worker();
  std::exception_ptr write_failure;
  try {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      SweepRow row;
      bool computed = false;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[i].has_value() || failure; });
        if (failure) break;
        row = *done[i];
        computed = fresh[i];
        done[i].reset();
      }
      if (cache && computed) cache->append(opt.mask, row);
      if (!computed) ++stats.from_cache;
      ++stats.rows;
      emit(row);
    }
  } catch (...) {
    write_failure = std::current_exception();
    std::lock_guard lock(mu);
    next = ns.size();
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  if (write_failure) std::rethrow_exception(write_failure);
  return stats;
}

}  // namespace

SweepStats sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  Emitter e{opt.format, out};
  e.header();
  return run_sweep(opt, err, [&](const SweepRow& r) { e.row(r); });
}

std::vector<SweepRow> sweep_rows(const SweepOptions& opt, std::ostream& err) {
  std::vector<SweepRow> rows;
  run_sweep(opt, err, [&](const SweepRow& r) { rows.push_back(r); });
  return rows;
}

// ---- reports ----

std::optional<Theorem> parse_theorem(std::string_view text) {
  if (text == "t42" || text == "T42") return Theorem::kT42;
  if (text == "t55" || text == "T55") return Theorem::kT55;
  if (text == "t61" || text == "T61") return Theorem::kT61;
  return std::nullopt;
}

namespace {

void check_coverage(std::span<const SweepRow> rows, std::span<const i64> grid) {
  if (grid.empty()) throw std::invalid_argument("report: empty grid");
  const i64 top = *std::max_element(grid.begin(), grid.end());
  if (top < 1) throw std::invalid_argument("report: grid points must be positive");
  std::set<i64> seen;
  for (const SweepRow& r : rows) {
    if (r.n > top) continue;
    if (!seen.insert(r.n).second) throw std::invalid_argument("report: duplicate row for n=" + std::to_string(r.n));
  }
  for (i64 n : enumerate_squarefree(top))
    if (!seen.count(n)) throw CoverageError("report: no row for n=" + std::to_string(n));
}

}  // namespace

RatioReport ratio_report(std::span<const SweepRow> rows, Theorem t, std::span<const i64> grid) {
  check_coverage(rows, grid);
  RatioReport out;
  out.theorem = t;
  for (i64 x : grid) {
    RatioLine line;
    line.x = x;
    for (const SweepRow& r : rows) {
      if (r.n > x) continue;
      const FamilyCounts& c = t == Theorem::kT42 ? r.phi1 : r.phihat1;
      line.numerator_lo += c.sol_lo;
      line.numerator_hi += c.sol_hi;
      line.denominator += t == Theorem::kT61 ? c.sls.value_or(0) : c.ls;
      if (r.n % 8 >= 5) {
        ++line.rank_candidates;
        if (r.rank_lo >= 1) ++line.rank_positive;
      }
    }
    if (line.denominator > 0) {
      line.ratio_lo = static_cast<double>(line.numerator_lo) / static_cast<double>(line.denominator);
      line.ratio_hi = static_cast<double>(line.numerator_hi) / static_cast<double>(line.denominator);
    }
    if (line.rank_candidates > 0)
      line.rank_fraction = static_cast<double>(line.rank_positive) / static_cast<double>(line.rank_candidates);
    out.lines.push_back(line);
  }
  return out;
}

std::vector<AverageLine> average_report(std::span<const SweepRow> rows, std::span<const i64> grid) {
  check_coverage(rows, grid);
  std::vector<AverageLine> out;
  for (i64 x : grid)
    for (int h : {-3, -2, -1, 1, 2, 3}) {
      AverageLine line;
      line.x = x;
      line.h = h;
      for (const SweepRow& r : rows) {
        if (r.n > x || r.h != h) continue;
        ++line.count;
        for (int i = 0; i < kIsogenyCount; ++i) line.mean_sel[i] += std::ldexp(1.0, r.dim_sel[i]);
        line.mean_sel2 += std::ldexp(1.0, r.dim_sel2);
        for (int i = 0; i < 3; ++i) line.mean_s[i] += r.dim_sel[2 * i + 1] - 2;
      }
      if (line.count == 0) continue;
      const double c = static_cast<double>(line.count);
      for (double& m : line.mean_sel) m /= c;
      line.mean_sel2 /= c;
      for (double& m : line.mean_s) m /= c;
      line.ref_loglog = std::log(std::log(static_cast<double>(x))) / 2;
      out.push_back(line);
    }
  return out;
}

void write_report(const RatioReport& r, Format f, std::ostream& out) {
  const bool t61 = r.theorem == Theorem::kT61;
  if (f == Format::kCsv) {
    out << "X,numerator_lo,numerator_hi,denominator,ratio_lo,ratio_hi";
    if (t61) out << ",rank_positive_567,count_567,fraction_567";
    out << '\n';
  }
  for (const RatioLine& l : r.lines) {
    if (f == Format::kCsv) {
      out << l.x << ',' << l.numerator_lo << ',' << l.numerator_hi << ',' << l.denominator << ','
          << fixed6(l.ratio_lo) << ',' << fixed6(l.ratio_hi);
      if (t61) out << ',' << l.rank_positive << ',' << l.rank_candidates << ',' << fixed6(l.rank_fraction);
      out << '\n';
    } else {
      json j{{"X", l.x},
             {"numerator_lo", l.numerator_lo},
             {"numerator_hi", l.numerator_hi},
             {"denominator", l.denominator},
             {"ratio_lo", l.ratio_lo},
             {"ratio_hi", l.ratio_hi}};
      if (t61) {
        j["rank_positive_567"] = l.rank_positive;
        j["count_567"] = l.rank_candidates;
        j["fraction_567"] = l.rank_fraction;
      }
      out << j.dump() << '\n';
    }
  }
}

void write_report(std::span<const AverageLine> lines, Format f, std::ostream& out) {
  static constexpr std::array<std::string_view, kIsogenyCount> names{
      "mean_sel_phi1", "mean_sel_phihat1", "mean_sel_phi2", "mean_sel_phihat2", "mean_sel_phi3", "mean_sel_phihat3"};
  if (f == Format::kCsv) {
    out << "X,h,count";
    for (auto n : names) out << ',' << n;
    out << ",mean_sel2,mean_s_phihat1,mean_s_phihat2,mean_s_phihat3,ref_one,ref_twelve,ref_loglog\n";
  }
  for (const AverageLine& l : lines) {
    if (f == Format::kCsv) {
      out << l.x << ',' << l.h << ',' << l.count;
      for (double m : l.mean_sel) out << ',' << fixed6(m);
      out << ',' << fixed6(l.mean_sel2);
      for (double m : l.mean_s) out << ',' << fixed6(m);
      out << ",1,12," << fixed6(l.ref_loglog) << '\n';
    } else {
      json j{{"X", l.x}, {"h", l.h}, {"count", l.count}};
      for (int i = 0; i < kIsogenyCount; ++i) j[std::string(names[i])] = l.mean_sel[i];
      j["mean_sel2"] = l.mean_sel2;
      for (int i = 0; i < 3; ++i) j["mean_s_phihat" + std::to_string(i + 1)] = l.mean_s[i];
      j["ref_one"] = 1;
      j["ref_twelve"] = 12;
      j["ref_loglog"] = l.ref_loglog;
      out << j.dump() << '\n';
    }
  }
}

// ---- verify ----

std::vector<Violation> verify(i64 xmax, bool inject_fault, std::ostream& log) {
  std::vector<Violation> out;
  bool fault_pending = inject_fault;
  auto fail = [&](i64 n, std::string what) {
    log << "violation at n=" << n << ": " << what << '\n';
    out.push_back({n, std::move(what)});
  };
  auto closed = [](const std::vector<SquareClass>& g) {
    if (!std::binary_search(g.begin(), g.end(), SquareClass{})) return false;
    for (const auto& a : g)
      for (const auto& b : g)
        if (!std::binary_search(g.begin(), g.end(), a * b)) return false;
    return true;
  };

  if (xmax < 1) return out;
  for (i64 n : enumerate_squarefree(xmax)) {
    const std::vector<i64> primes = factor(n).primes();

    if (n % 2 == 1) {
      for (const CoveringQuadruple& q : all_quadruples(n))
        for (i64 p : primes) {
          bool symbol = quadruple_qp_soluble_symbols(q, p);
          if (fault_pending) {
            symbol = !symbol;
            fault_pending = false;
          }
          if (symbol != quadruple_qp_soluble_search(q, p))
            fail(n, "symbol criterion disagrees with the disc search for quadruple (" + std::to_string(q.d1) + "," +
                        std::to_string(q.d2) + "," + std::to_string(q.d3) + "," + std::to_string(q.d4) +
                        ") at p=" + std::to_string(p));
        }
    }

    const Analysis a = analyze(n, kSweepHeight, kAllFamilies);
    const DescentData& dd = a.descent;
    for (const Isogeny id : {Isogeny::kPhi1, Isogeny::kPhiHat1, Isogeny::kPhi2, Isogeny::kPhiHat2, Isogeny::kPhi3,
                             Isogeny::kPhiHat3}) {
      const SelmerSet& s = dd.of(id);
      const std::string tag(name(id));
      if (!closed(s.classes)) fail(n, "Sel^" + tag + " is not a group");
      for (const SquareClass& d : s.classes)
        if ((2 * n) % std::abs(d.rep()) != 0) fail(n, "class " + std::to_string(d.rep()) + " of Sel^" + tag + " does not divide 2n");
      for (const SquareClass& t : torsion_images(n, id))
        if (!s.contains(t)) fail(n, "torsion class " + std::to_string(t.rep()) + " missing from Sel^" + tag);
      const FamilyResult& fr = a.of(id);
      const bool hat = descriptor(id).hat;
      const auto& strict = hat ? dd.strict[descriptor(id).index - 1] : s.classes;
      for (const Classification& c : fr.forms) {
        const SquareClass d = SquareClass::of_fraction(c.form.a.numerator(), c.form.a.denominator());
        if (c.status == Status::kSoluble) {
          if (!std::binary_search(strict.begin(), strict.end(), d))
            fail(n, "soluble class " + std::to_string(d.rep()) + " outside the strict classes of " + tag);
          if (!c.witness || !c.witness->verifies(c.form)) fail(n, "bad witness for " + c.form.render());
        }
      }
      for (const SquareClass& d : strict)
        if (!s.contains(d)) fail(n, "strict class " + std::to_string(d.rep()) + " outside Sel^" + tag);
      const FamilyCounts& k = fr.counts;
      if (k.sol_lo > k.sol_hi || k.sol_hi > (k.sls ? *k.sls : k.ls))
        fail(n, "count chain broken for " + tag);
    }
    if (!dd.sel2.contains({})) fail(n, "2-Selmer group lacks the identity");
    bool sel2_closed = true;
    for (const Sel2Pair& e : dd.sel2.pairs)
      for (const Sel2Pair& f : dd.sel2.pairs)
        sel2_closed = sel2_closed && dd.sel2.contains({e.delta1 * f.delta1, e.delta2 * f.delta2});
    if (!sel2_closed) fail(n, "2-Selmer pairs are not closed under multiplication");
    if (static_cast<int>(dd.strict[0].size()) > static_cast<int>(dd.sel2.pairs.size()))
      fail(n, "more strict classes than 2-Selmer elements");
    if (dd.sel2.dim() > dd.of(Isogeny::kPhi1).dim() + dd.of(Isogeny::kPhiHat1).dim())
      fail(n, "dim Sel2 exceeds dim Sel^phi1 + dim Sel^phi1hat");
    if (a.rank.rank_lower > a.rank.rank_upper) fail(n, "rank bounds crossed");
    if (n % 2 == 1 && 4 * sel2_quadruples(n).size() != dd.sel2.pairs.size())
      fail(n, "4 * #quadruples = " + std::to_string(4 * sel2_quadruples(n).size()) + " but #Sel2 = " +
                  std::to_string(dd.sel2.pairs.size()));
  }
  return out;
}

}  // namespace qsel
