#pragma once

// Global solubility of z^2 = f(x, y): point search, rank bounds from the
// 2-isogeny exact sequence, and classification of whole families.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsel/descent.hpp"

namespace qsel {

inline constexpr i64 kSweepHeight = 1000;
inline constexpr i64 kQueryHeight = 100000;

struct Witness {
  BigInt x, y, z;

  bool verifies(const BinaryQuartic& f) const;
  std::string str() const;
  friend bool operator==(const Witness&, const Witness&) = default;
};

/// First (x, y) with x, y >= 0, max(x, y) <= H, in order of max(x, y) and then
/// lexicographically, at which f is a square. The first hit is always primitive.
std::optional<Witness> point_search(const IntegralQuartic& f, i64 H);

struct SearchHit {
  std::size_t form = 0;
  Witness witness;
};

/// Scans once for several forms; at each (x, y) the forms are tried in order.
std::optional<SearchHit> point_search_any(std::span<const IntegralQuartic> forms, i64 H);

struct RankInfo {
  i64 n = 1;
  int rank_lower = 0;
  int rank_upper = 0;
  bool certified_zero = false;
};

enum class Status { kSoluble, kInsoluble, kUnknown };

enum class Reason {
  kNone,
  kNotLocallySoluble,
  kRankZeroNonTorsion,
  // Locally soluble, but outside the projection of the 2-Selmer group.
  kNotStrictlyLocallySoluble,
  // The known soluble classes already fill the largest group the rank bound allows.
  kMordellWeilBound,
};

std::string_view name(Status s);
std::string_view name(Reason r);

struct Classification {
  BinaryQuartic form;
  Status status = Status::kUnknown;
  Reason reason = Reason::kNone;
  std::optional<Witness> witness;
  bool torsion = false;

  /// "a,B,c status witness"
  std::string render() const;
};

struct FamilyCounts {
  int ls = 0;
  std::optional<int> sls;
  int sol_lo = 0;
  int sol_hi = 0;

  friend bool operator==(const FamilyCounts&, const FamilyCounts&) = default;
};

struct FamilyResult {
  Isogeny id = Isogeny::kPhi1;
  FamilySpec spec;
  std::vector<Classification> forms;  // every form of the family, ordered by a
  FamilyCounts counts;
};

using FamilyMask = unsigned;
inline constexpr FamilyMask bit(Isogeny id) { return 1u << static_cast<int>(id); }
inline constexpr FamilyMask kIndexOneFamilies = bit(Isogeny::kPhi1) | bit(Isogeny::kPhiHat1);
inline constexpr FamilyMask kAllFamilies = (1u << kIsogenyCount) - 1;

struct Analysis {
  DescentData descent;
  i64 height = kSweepHeight;
  RankInfo rank;
  std::array<std::optional<FamilyResult>, kIsogenyCount> families;
  // Rational points of y^2 = x^3 - n^2 x found on the way (non-torsion).
  std::vector<Point> points;

  const FamilyResult& of(Isogeny id) const;
};

/// Search height for the full 2-coverings when the quartic search uses H.
i64 cover_height(i64 H);

/// Full per-n analysis. The index-1 pair is always classified (it carries the
/// rank bounds); other pairs when any member is in the mask.
Analysis analyze(i64 n, i64 H, FamilyMask mask = kIndexOneFamilies);

RankInfo rank_info(i64 n, i64 H = kSweepHeight);

/// f must belong to the family of the descriptor at n (same B, a*c = M).
Classification classify_form(const BinaryQuartic& f, i64 n, Isogeny id, i64 H = kQueryHeight);

FamilyCounts count_family(i64 n, Isogeny id, i64 H = kSweepHeight);

/// Quartic-point witness for a point on the family curve y^2 = x^3 + B x^2 + M x.
Witness witness_from_point(const Curve& family_curve, const Point& p);
/// Inverse direction for a form (d, B, M/d).
Point point_from_witness(const IntegralQuartic& f, const Witness& w);

}  // namespace qsel
