#pragma once

// Local solubility over R and Q_p for z^2 = f(x, y) and for the two
// intersections of quadrics used by the 2-descent.

#include <array>
#include <optional>
#include <span>

#include "qsel/arith.hpp"
#include "qsel/quartic.hpp"

namespace qsel {

/// Binary form of even degree (2 or 4). coeffs[k] multiplies x^k y^(degree-k).
struct BinaryForm {
  int degree = 0;
  std::array<i128, 5> coeffs{};

  static BinaryForm quartic(const IntegralQuartic& f);
  /// alpha x^2 + beta y^2
  static BinaryForm diagonal_quadratic(i128 alpha, i128 beta);
};

/// Whether some (x : y) in P^1(Q_p) makes every form take a square value in
/// Q_p (zero counts as a square). Exact: the search refines residue discs
/// until every form is certified square or non-square on each disc.
bool simultaneously_square(std::span<const BinaryForm> forms, i64 p);

/// D1 X^2 + D4 W^2 = D2 Y^2, D1 X^2 - D4 W^2 = D3 Z^2 with positive, pairwise
/// coprime, squarefree D_i.
struct CoveringQuadruple {
  i64 d1 = 1, d2 = 1, d3 = 1, d4 = 1;

  i64 n() const { return d1 * d2 * d3 * d4; }
  /// Throws std::invalid_argument unless the invariants hold.
  void validate() const;
  std::array<BinaryForm, 2> forms() const;

  friend auto operator<=>(const CoveringQuadruple&, const CoveringQuadruple&) = default;
};

/// Torsor d1 u^2 - d2 v^2 = n w^2, d1 u^2 - d1 d2 t^2 = -n w^2 attached to the
/// pair (class of x, class of x - n) on y^2 = x^3 - n^2 x.
struct PairTorsor {
  SquareClass delta1;
  SquareClass delta2;
  i64 n = 1;

  /// Throws std::invalid_argument if a class is ramified outside 2n.
  void validate() const;
  std::array<BinaryForm, 2> forms() const;
};

bool real_soluble_quartic(const IntegralQuartic& f);
bool real_soluble_quartic(const BinaryQuartic& f);

/// z^2 = f(x, y) over Q_p for integral nondegenerate f.
bool qp_soluble_quartic(const IntegralQuartic& f, i64 p);

/// Residue-symbol criterion for the quadruple covering at an odd prime;
/// nullopt stands for the real place.
bool quadruple_qp_soluble_symbols(const CoveringQuadruple& q, std::optional<i64> p);

/// Generic disc search for the quadruple covering at any prime.
bool quadruple_qp_soluble_search(const CoveringQuadruple& q, i64 p);

bool quadruple_q2_soluble(const CoveringQuadruple& q);

/// Points over R and every Q_p on the pair torsor.
bool pair_torsor_locally_soluble(const PairTorsor& t);
bool pair_torsor_real_soluble(const PairTorsor& t);
bool pair_torsor_qp_soluble(const PairTorsor& t, i64 p);

}  // namespace qsel
