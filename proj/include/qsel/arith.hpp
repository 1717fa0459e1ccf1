#pragma once

// Exact integer and modular arithmetic: factorization, square classes,
// residue symbols and squarefree enumeration.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qsel {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

struct PrimePower {
  i64 prime;
  int exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  i64 value = 1;
  int sign = 1;
  std::vector<PrimePower> factors;  // strictly increasing primes

  std::vector<i64> primes() const;
  i64 recompose() const;
};

/// Element of Q*/Q*^2, stored as its signed squarefree representative.
class SquareClass {
 public:
  SquareClass() = default;
  /// Reduces any nonzero integer to its class.
  static SquareClass of(i64 m);
  /// Class of num/den (both nonzero).
  static SquareClass of_fraction(i64 num, i64 den);
  /// Wraps a representative already known to be squarefree.
  static SquareClass from_rep(i64 squarefree_rep);

  i64 rep() const { return rep_; }
  bool is_identity() const { return rep_ == 1; }

  friend SquareClass operator*(SquareClass x, SquareClass y);
  SquareClass& operator*=(SquareClass other) { return *this = *this * other; }
  friend auto operator<=>(const SquareClass&, const SquareClass&) = default;

  std::string str() const { return std::to_string(rep_); }

 private:
  explicit SquareClass(i64 rep) : rep_(rep) {}
  i64 rep_ = 1;
};

/// Trial-division factorization. Throws std::invalid_argument on m == 0.
Factorization factor(i64 m);

/// m = rep * s^2 with rep squarefree.
std::pair<SquareClass, i64> squarefree_kernel(i64 m);

bool is_squarefree(i64 m);

/// Number of distinct prime divisors of |m|.
int omega(i64 m);

/// Jacobi symbol (a/m) for odd m >= 1.
int jacobi(i64 a, i64 m);

/// Whether a p-adic unit u is a square in Z_p (p prime).
bool is_unit_square_zp(i64 u, i64 p);

/// Subgroup of Q*/Q*^2 generated by the primes dividing n, and also by -1
/// and 2 when the flag is set. Output sorted by representative.
std::vector<SquareClass> squarefree_divisor_classes(i64 n, bool include_two_and_sign);

/// Same group, from an already-known list of prime divisors.
std::vector<SquareClass> classes_generated_by(std::span<const i64> generators);

/// Squarefree 1 <= m <= x, optionally restricted to m = h mod 8 with
/// h in {+-1, +-2, +-3}. Ascending.
std::vector<i64> enumerate_squarefree(i64 x, std::optional<int> h = std::nullopt);

/// Signed representative of n mod 8 in {+-1, +-2, +-3} for squarefree n >= 1.
int congruence_label(i64 n);

// ---- modular helpers (p odd prime unless stated) ----

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
u64 powmod(u64 base, u64 exp, u64 m);
inline u64 reduce_mod(i64 a, u64 m) {
  i64 r = a % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}
u64 invmod(u64 a, u64 p);
/// Square root of a quadratic residue a mod p (Tonelli-Shanks); nullopt for non-residues.
std::optional<u64> sqrt_mod(u64 a, u64 p);

/// p-adic valuation of a nonzero integer.
int valuation(i64 m, i64 p);
int valuation(i128 m, i64 p);

/// Primes up to the built-in sieve limit, ascending.
std::span<const i64> small_primes();

std::string to_string(i128 v);

}  // namespace qsel
