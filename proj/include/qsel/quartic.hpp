#pragma once

// Binary quartic forms a x^4 + B x^2 y^2 + c y^4.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qsel/arith.hpp"

namespace qsel {

using Rational = boost::rational<i64>;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// The pair (B, M) fixing a family W^B_M: all forms with middle coefficient B and a*c = M.
struct FamilySpec {
  i64 B = 0;
  i64 M = 0;

  bool degenerate() const;
  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

/// Quartic with integer coefficients; the workhorse type of the descent code.
struct IntegralQuartic {
  i64 a = 0;
  i64 b = 0;
  i64 c = 0;

  FamilySpec family() const { return {b, a * c}; }
  /// Exact value a x^4 + b x^2 y^2 + c y^4 (throws on 128-bit overflow).
  i128 operator()(i64 x, i64 y) const;
  std::string render() const;

  friend bool operator==(const IntegralQuartic&, const IntegralQuartic&) = default;
  friend auto operator<=>(const IntegralQuartic&, const IntegralQuartic&) = default;
};

struct BinaryQuartic {
  Rational a;
  i64 B = 0;
  Rational c;

  Rational M() const { return a * c; }
  bool is_integral() const { return a.denominator() == 1 && c.denominator() == 1; }
  std::optional<IntegralQuartic> integral() const;
  /// "a,B,c" with rationals written p/q.
  std::string render() const;

  static BinaryQuartic from(const IntegralQuartic& f) { return {Rational(f.a), f.b, Rational(f.c)}; }
  friend bool operator==(const BinaryQuartic&, const BinaryQuartic&) = default;
};

/// 16 M (B^2 - 4M)^2.
BigInt discriminant(const FamilySpec& spec);

/// max(B^2, |M|).
i64 bh_height(const FamilySpec& spec);

struct CanonicalForm {
  BinaryQuartic form;
  bool integral = false;
};

/// Unique equivalent form (a -> s^2 a, c -> c / s^2) whose leading coefficient
/// is squarefree. A non-integral result means the class is not locally soluble.
CanonicalForm canonical_rep(Rational a, const FamilySpec& spec);

/// All forms in the family with squarefree leading coefficient (either sign)
/// and integral c = M / a, ordered by a.
std::vector<IntegralQuartic> family_forms(const FamilySpec& spec);

/// Same, when the prime divisors of M are already known.
std::vector<IntegralQuartic> family_forms(const FamilySpec& spec, std::span<const i64> primes_of_m);

BigRational evaluate(const BinaryQuartic& f, i64 x, i64 y);

/// Parses "a,B,c" (a and c may be p/q).
BinaryQuartic parse_quartic(const std::string& text);

std::string render(const Rational& r);

}  // namespace qsel
