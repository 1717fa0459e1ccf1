#pragma once

// Point search on the full 2-coverings of y^2 = x^3 - n^2 x. A pair
// (d1, d2) gives the conic d1 u^2 - d2 v^2 = n w^2; after parametrising it by
// binary quadratics in (s, r), the remaining condition is that
// g(s, r) = d1 d2 (d1 u^2 + n w^2) is a square. Points found this way have
// x = d1 u^2 / w^2 with (s, r) roughly the fourth root of the height of x.

#include <array>
#include <optional>
#include <span>

#include "qsel/descent.hpp"

namespace qsel::detail {

/// Nontrivial integer solution of a x^2 + b y^2 + c z^2 = 0, if one exists.
std::optional<std::array<BigInt, 3>> solve_legendre(i64 a, i64 b, i64 c);

struct CoverQuartic {
  Sel2Pair pair;
  i64 n = 1;
  // u, v, w as quadratic forms: coefficient k multiplies s^k r^(2-k).
  std::array<std::array<BigInt, 3>, 3> param;
  // g(s, r) with coefficient k multiplying s^k r^(4-k).
  std::array<BigInt, 5> g;
};

/// nullopt when the conic has no rational point.
std::optional<CoverQuartic> cover_quartic(const Sel2Pair& pair, i64 n);

struct CoverHit {
  std::size_t cover = 0;
  Point point;  // on y^2 = x^3 - n^2 x
};

/// Scans primitive (s, r) with r >= 0 and max(|s|, r) <= H in a fixed order.
std::optional<CoverHit> cover_search(std::span<const CoverQuartic> covers, i64 H);

}  // namespace qsel::detail
