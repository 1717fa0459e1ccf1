// Command-line front end: selmer, classify, sweep, report, verify.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsel/harness.hpp"

namespace {

using namespace qsel;

constexpr int kOk = 0;
constexpr int kBadArgs = 2;
constexpr int kCorruptCache = 3;
constexpr int kVerifyFailed = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Isogeny isogeny_arg(const std::string& text) {
  const auto id = parse_isogeny(text);
  if (!id) throw UsageError("unknown map '" + text + "' (expected phi1, phi1hat, ..., phi3hat)");
  return *id;
}

Format format_arg(const std::string& text) {
  if (text == "csv") return Format::kCsv;
  if (text == "jsonl") return Format::kJsonl;
  throw UsageError("unknown format '" + text + "' (expected csv or jsonl)");
}

void require_squarefree(i64 n) {
  if (n < 1 || !is_squarefree(n)) throw UsageError("n must be a squarefree positive integer");
}

int run_selmer(i64 n, const std::string& map) {
  require_squarefree(n);
  const Isogeny id = isogeny_arg(map);
  const SelmerSet s = selmer_isogeny(n, id);
  std::cout << name(id) << " n=" << n << " dim=" << s.dim() << " classes=";
  for (std::size_t i = 0; i < s.classes.size(); ++i) std::cout << (i ? "," : "") << s.classes[i].rep();
  std::cout << '\n';
  return kOk;
}

int run_classify(i64 a, i64 b, i64 c, i64 n, i64 height) {
  require_squarefree(n);
  if (a == 0 || c == 0) throw UsageError("a and c must be nonzero");
  if (height < 1) throw UsageError("height must be positive");
  for (const IsogenyDescriptor& d : descriptors()) {
    const FamilySpec spec = d.family(n);
    if (spec.B != b || static_cast<i128>(a) * c != static_cast<i128>(spec.M)) continue;
    const BinaryQuartic f{Rational(a), b, Rational(c)};
    std::cout << name(d.id) << ' ' << classify_form(f, n, d.id, height).render() << '\n';
    return kOk;
  }
  throw UsageError("form " + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                   " belongs to no quartic family at n=" + std::to_string(n));
}

FamilyMask mask_arg(const std::vector<std::string>& families) {
  if (families.empty()) return kIndexOneFamilies;
  FamilyMask mask = 0;
  for (const auto& f : families) mask |= bit(isogeny_arg(f));
  return mask;
}

std::vector<SweepRow> cached_rows(const std::string& path, bool& corrupt) {
  const RowCache cache(path);
  for (const auto& c : cache.corrupt())
    std::cerr << "cache " << path << ": corrupt record at byte " << c.offset << " (" << c.reason << ")\n";
  corrupt = !cache.corrupt().empty();
  // One row per n: the largest height, then the widest family mask.
  std::map<i64, std::pair<FamilyMask, SweepRow>> best;
  for (const auto& [mask, row] : cache.rows()) {
    auto [it, fresh] = best.try_emplace(row.n, mask, row);
    if (fresh) continue;
    const auto& [m, r] = it->second;
    if (row.height > r.height || (row.height == r.height && mask > m)) it->second = {mask, row};
  }
  std::vector<SweepRow> out;
  for (const auto& [n, entry] : best) out.push_back(entry.second);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selmer groups and solubility of quartic families for y^2 = x^3 - n^2 x"};
  app.require_subcommand(1);

  i64 n = 1;
  std::string map;
  auto* selmer = app.add_subcommand("selmer", "Selmer group of one 2-isogeny");
  selmer->add_option("--n", n, "squarefree n")->required();
  selmer->add_option("--map", map, "phi1|phi1hat|phi2|phi2hat|phi3|phi3hat")->required();

  i64 a = 0, b = 0, c = 0;
  i64 height = kQueryHeight;
  auto* classify = app.add_subcommand("classify", "Classify a*x^4 + b*x^2*y^2 + c*y^4");
  classify->add_option("--a", a)->required();
  classify->add_option("--b", b)->required();
  classify->add_option("--c", c)->required();
  classify->add_option("--n", n)->required();
  classify->add_option("--height", height, "point search height");

  SweepOptions sopt;
  std::vector<std::string> families;
  std::string cache_path;
  std::string format = "csv";
  auto* sweep_cmd = app.add_subcommand("sweep", "One row per squarefree n <= X");
  sweep_cmd->add_option("--xmax", sopt.xmax)->required();
  sweep_cmd->add_option("--families", families, "families to classify (index-1 pair always)")->delimiter(',');
  sweep_cmd->add_option("--height", sopt.height, "point search height")->default_val(kSweepHeight);
  sweep_cmd->add_option("--threads", sopt.threads)->default_val(1);
  sweep_cmd->add_option("--cache", cache_path, "append-only row cache");
  sweep_cmd->add_option("--format", format, "csv|jsonl");

  std::string theorem;
  std::vector<i64> grid = kDefaultGrid;
  auto* report = app.add_subcommand("report", "Ratios and averages from a cache");
  report->add_option("--cache", cache_path)->required();
  report->add_option("--theorem", theorem, "t42|t55|t61|averages")->required();
  report->add_option("--grid", grid)->delimiter(',');
  report->add_option("--format", format, "csv|jsonl");

  i64 xmax = 0;
  bool inject = false;
  auto* verify_cmd = app.add_subcommand("verify", "Cross-check the local and global computations");
  verify_cmd->add_option("--xmax", xmax)->required();
  verify_cmd->add_flag("--inject-fault", inject, "flip the first symbol result");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadArgs;
  }

  try {
    if (*selmer) return run_selmer(n, map);
    if (*classify) return run_classify(a, b, c, n, height);
    if (*sweep_cmd) {
      sopt.mask = mask_arg(families);
      sopt.format = format_arg(format);
      if (!cache_path.empty()) sopt.cache_path = cache_path;
      if (sopt.xmax < 1) throw UsageError("xmax must be at least 1");
      if (sopt.height < 1) throw UsageError("height must be positive");
      if (sopt.threads < 1) throw UsageError("threads must be at least 1");
      std::ios::sync_with_stdio(false);
      sweep(sopt, std::cout, std::cerr);
      return kOk;
    }
    if (*report) {
      const Format f = format_arg(format);
      bool corrupt = false;
      const std::vector<SweepRow> rows = cached_rows(cache_path, corrupt);
      const auto t = parse_theorem(theorem);
      if (!t && theorem != "averages") throw UsageError("unknown theorem '" + theorem + "'");
      // A damaged record only matters when no intact row for its n remains.
      try {
        if (t)
          write_report(ratio_report(rows, *t, grid), f, std::cout);
        else
          write_report(average_report(rows, grid), f, std::cout);
      } catch (const CoverageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return corrupt ? kCorruptCache : kBadArgs;
      }
      return kOk;
    }
    if (*verify_cmd) {
      const auto violations = verify(xmax, inject, std::cerr);
      if (!violations.empty()) {
        std::cerr << violations.size() << " violation(s)\n";
        return kVerifyFailed;
      }
      std::cout << "verify: no violations up to " << xmax << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const CacheError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const CoverageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  }
  return kBadArgs;
}
