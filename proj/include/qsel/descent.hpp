#pragma once

// Isogeny Selmer groups and the 2-Selmer group of y^2 = x^3 - n^2 x.
//
// Every isogeny here is a 2-isogeny between curves y^2 = x^3 + a2 x^2 + a4 x
// whose coefficients are integer multiples of n and n^2. For phi: E -> E'
// the Selmer classes are x-classes of points on E' (suitably translated), and
// the class d corresponds to the quartic d X^4 + B X^2 Y^2 + (M/d) Y^4 where
// y^2 = x^3 + B x^2 + M x is that translated curve.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qsel/arith.hpp"
#include "qsel/localsolve.hpp"
#include "qsel/quartic.hpp"

namespace qsel {

enum class Isogeny { kPhi1 = 0, kPhiHat1, kPhi2, kPhiHat2, kPhi3, kPhiHat3 };
inline constexpr int kIsogenyCount = 6;

std::string_view name(Isogeny id);
/// Accepts phi1, phi1hat, ..., phi3hat.
std::optional<Isogeny> parse_isogeny(std::string_view text);

/// y^2 = x^3 + a2 x^2 + a4 x.
struct Curve {
  i64 a2 = 0;
  i64 a4 = 0;
  friend bool operator==(const Curve&, const Curve&) = default;
};

struct Point {
  bool infinity = true;
  BigRational x;
  BigRational y;

  static Point at_infinity() { return {}; }
  static Point affine(BigRational x, BigRational y) { return {false, std::move(x), std::move(y)}; }
  friend bool operator==(const Point&, const Point&) = default;
};

bool on_curve(const Curve& e, const Point& p);
Point negate(const Point& p);
Point add(const Curve& e, const Point& p, const Point& q);
/// Moves the curve and point so that x -> x - shift.
Curve translate(const Curve& e, i64 shift);
Point translate(const Point& p, i64 shift);

/// One row of the correspondence between 2-isogenies and quartic families.
struct IsogenyDescriptor {
  Isogeny id;
  int index;  // 1, 2, 3
  bool hat;
  // Coefficients as multiples of (n, n^2).
  Curve source_per_n;
  Curve target_per_n;
  i64 kernel_x_per_n;  // kernel generator (k n, 0) on the source
  // The family curve is the target with x replaced by x - shift n; for the
  // dual maps this puts the kernel of the forward map at (0, 0).
  i64 family_shift_per_n;

  Curve source(i64 n) const;
  Curve target(i64 n) const;
  Curve family_curve(i64 n) const;
  FamilySpec family(i64 n) const;
};

const IsogenyDescriptor& descriptor(Isogeny id);
std::span<const IsogenyDescriptor> descriptors();

/// Image of p under the isogeny; the point at infinity for kernel points.
/// Throws std::invalid_argument if p is not on the source curve.
Point apply_isogeny(const Point& p, Isogeny id, i64 n);

/// Class of x (x = 0 maps to the class of M) for a point on y^2 = x^3 + B x^2 + M x.
SquareClass x_class(const Curve& family_curve, const Point& p);

/// Rational torsion of the family curve. Only 2-power torsion of order <= 4
/// occurs in this isogeny class; the points returned are the 2-torsion and
/// its halves.
std::vector<Point> torsion_points(const Curve& e);

std::vector<SquareClass> torsion_images(i64 n, Isogeny id);

struct SelmerSet {
  i64 n = 1;
  Isogeny id = Isogeny::kPhi1;
  std::vector<SquareClass> classes;  // sorted

  int dim() const;
  bool contains(SquareClass d) const;
};

/// Classes of squarefree divisors d of M whose quartic is soluble over R and
/// every Q_p with p | 2n.
SelmerSet selmer_isogeny(i64 n, Isogeny id);
SelmerSet selmer_isogeny(i64 n, std::span<const i64> primes_of_n, Isogeny id);

/// (class of x, class of x - n) for a point of y^2 = x^3 - n^2 x; at a
/// 2-torsion point the vanishing factor is replaced by the product of the other two.
struct Sel2Pair {
  SquareClass delta1;
  SquareClass delta2;
  friend auto operator<=>(const Sel2Pair&, const Sel2Pair&) = default;
};

Sel2Pair pair_of_point(const Point& p, i64 n);
std::vector<Sel2Pair> torsion_pairs(i64 n);

struct Sel2Set {
  i64 n = 1;
  std::vector<Sel2Pair> pairs;  // sorted

  int dim() const;
  bool contains(const Sel2Pair& e) const;
};

/// Pairs passing the torsor test, searched inside the product of the dual
/// Selmer groups (delta1 in Sel^phihat1, delta2 in Sel^phihat2, product in Sel^phihat3).
Sel2Set sel2_pairs(i64 n);
Sel2Set sel2_pairs(i64 n, std::span<const i64> primes_of_n, const SelmerSet& hat1, const SelmerSet& hat2,
                   const SelmerSet& hat3);
/// Same group by brute enumeration of every pair supported on 2n and -1.
Sel2Set sel2_pairs_full(i64 n);

std::vector<CoveringQuadruple> sel2_quadruples(i64 n);
/// Every coprime positive factorization of n into four parts.
std::vector<CoveringQuadruple> all_quadruples(i64 n);

/// Projection to the class of x (index 1), x - n (index 2) or x + n (index 3).
SquareClass pi_projection(const Sel2Pair& e, int index = 1);
std::vector<SquareClass> strict_classes(const Sel2Set& sel2, int index = 1);
std::vector<SquareClass> strict_classes(i64 n, int index = 1);

/// Everything the classifier and the sweep need for one n.
struct DescentData {
  i64 n = 1;
  std::vector<i64> primes;
  std::array<SelmerSet, kIsogenyCount> selmer;
  Sel2Set sel2;
  std::array<std::vector<SquareClass>, 3> strict;  // strict[i - 1] projects to Sel^phihat_i

  const SelmerSet& of(Isogeny id) const { return selmer[static_cast<int>(id)]; }
};

DescentData compute_descent(i64 n);

/// log2 of a group order (throws std::logic_error unless a power of two).
int dimension(std::size_t order);

/// Subgroup of Q*/Q*^2 generated by the given classes, sorted.
std::vector<SquareClass> generated_subgroup(std::span<const SquareClass> generators);

}  // namespace qsel
