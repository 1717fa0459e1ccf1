#include "qsel/arith.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qsel {

namespace {

constexpr i64 kSieveLimit = 1 << 20;

const std::vector<i64>& prime_table() {
  static const std::vector<i64> table = [] {
    std::vector<bool> composite(kSieveLimit + 1, false);
    std::vector<i64> out;
    for (i64 i = 2; i <= kSieveLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (i64 j = i * i; j <= kSieveLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return table;
}

u64 abs_u64(i64 m) { return m < 0 ? static_cast<u64>(-(m + 1)) + 1 : static_cast<u64>(m); }

}  // namespace

std::span<const i64> small_primes() { return prime_table(); }

std::vector<i64> Factorization::primes() const {
  std::vector<i64> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(f.prime);
  return out;
}

i64 Factorization::recompose() const {
  i64 v = sign;
  for (const auto& f : factors)
    for (int e = 0; e < f.exponent; ++e) v *= f.prime;
  return v;
}

Factorization factor(i64 m) {
  if (m == 0) throw std::invalid_argument("factor: argument must be nonzero");
  Factorization out;
  out.value = m;
  out.sign = m < 0 ? -1 : 1;
  u64 rest = abs_u64(m);
  auto strip = [&](u64 p) {
    if (rest % p != 0) return;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    out.factors.push_back({static_cast<i64>(p), e});
  };
  for (i64 p : prime_table()) {
    if (static_cast<u64>(p) * static_cast<u64>(p) > rest) break;
    strip(static_cast<u64>(p));
  }
  // Past the table: plain odd trial division (only reached for huge cofactors).
  for (u64 d = static_cast<u64>(kSieveLimit) + 1; d * d <= rest; d += 2) strip(d);
  if (rest > 1) out.factors.push_back({static_cast<i64>(rest), 1});
  return out;
}

std::pair<SquareClass, i64> squarefree_kernel(i64 m) {
  Factorization f = factor(m);
  i64 rep = f.sign;
  i64 s = 1;
  for (const auto& pp : f.factors) {
    if (pp.exponent % 2) rep *= pp.prime;
    for (int e = 0; e < pp.exponent / 2; ++e) s *= pp.prime;
  }
  return {SquareClass::from_rep(rep), s};
}

bool is_squarefree(i64 m) {
  if (m == 0) return false;
  for (const auto& pp : factor(m).factors)
    if (pp.exponent > 1) return false;
  return true;
}

int omega(i64 m) { return static_cast<int>(factor(m).factors.size()); }

SquareClass SquareClass::of(i64 m) { return squarefree_kernel(m).first; }

SquareClass SquareClass::of_fraction(i64 num, i64 den) {
  if (num == 0 || den == 0) throw std::invalid_argument("SquareClass: zero is not a square class");
  return of(num) * of(den);
}

SquareClass SquareClass::from_rep(i64 rep) {
  if (rep == 0) throw std::invalid_argument("SquareClass: zero is not a square class");
  return SquareClass(rep);
}

SquareClass operator*(SquareClass x, SquareClass y) {
  // For squarefree x, y: kernel(xy) = xy / gcd(x, y)^2.
  i64 g = std::gcd(x.rep_, y.rep_);
  return SquareClass((x.rep_ / g) * (y.rep_ / g));
}

int jacobi(i64 a, i64 m) {
  if (m <= 0 || m % 2 == 0) throw std::invalid_argument("jacobi: modulus must be odd and positive");
  u64 n = static_cast<u64>(m);
  u64 x = reduce_mod(a, n);
  int result = 1;
  while (x != 0) {
    while (x % 2 == 0) {
      x /= 2;
      u64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(x, n);
    if (x % 4 == 3 && n % 4 == 3) result = -result;
    x %= n;
  }
  return n == 1 ? result : 0;
}

bool is_unit_square_zp(i64 u, i64 p) {
  if (p < 2) throw std::invalid_argument("is_unit_square_zp: p must be prime");
  if (u % p == 0) throw std::invalid_argument("is_unit_square_zp: u must be a p-adic unit");
  if (p == 2) return reduce_mod(u, 8) == 1;
  return jacobi(u, p) == 1;
}

std::vector<SquareClass> classes_generated_by(std::span<const i64> generators) {
  std::vector<SquareClass> group{SquareClass::from_rep(1)};
  for (i64 g : generators) {
    SquareClass gc = SquareClass::of(g);
    if (std::find(group.begin(), group.end(), gc) != group.end()) continue;
    const std::size_t size = group.size();
    for (std::size_t i = 0; i < size; ++i) group.push_back(group[i] * gc);
  }
  std::sort(group.begin(), group.end());
  return group;
}

std::vector<SquareClass> squarefree_divisor_classes(i64 n, bool include_two_and_sign) {
  if (n < 1 || !is_squarefree(n))
    throw std::invalid_argument("squarefree_divisor_classes: n must be a squarefree positive integer");
  std::vector<i64> gens;
  if (include_two_and_sign) {
    gens.push_back(-1);
    gens.push_back(2);
  }
  for (i64 p : factor(n).primes())
    if (!(include_two_and_sign && p == 2)) gens.push_back(p);
  return classes_generated_by(gens);
}

std::vector<i64> enumerate_squarefree(i64 x, std::optional<int> h) {
  if (x < 1) throw std::invalid_argument("enumerate_squarefree: X must be positive");
  int residue = 0;
  if (h) {
    int v = *h;
    if (v != 1 && v != -1 && v != 2 && v != -2 && v != 3 && v != -3)
      throw std::invalid_argument("enumerate_squarefree: h must lie in {+-1, +-2, +-3}");
    residue = ((v % 8) + 8) % 8;
  }
  std::vector<i64> out;
  constexpr i64 kSegment = 1 << 16;
  std::vector<char> bad(kSegment);
  for (i64 lo = 1; lo <= x; lo += kSegment) {
    const i64 hi = std::min(x, lo + kSegment - 1);
    std::fill(bad.begin(), bad.end(), 0);
    for (i64 p = 2; p * p <= hi; ++p) {
      const i64 q = p * p;
      for (i64 k = ((lo + q - 1) / q) * q; k <= hi; k += q) bad[k - lo] = 1;
    }
    for (i64 m = lo; m <= hi; ++m) {
      if (bad[m - lo]) continue;
      if (h && m % 8 != residue) continue;
      out.push_back(m);
    }
  }
  return out;
}

int congruence_label(i64 n) {
  const int r = static_cast<int>(n % 8);
  return r <= 3 ? r : r - 8;
}

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 invmod(u64 a, u64 p) {
  if (a % p == 0) throw std::invalid_argument("invmod: not invertible");
  return powmod(a, p - 2, p);
}

std::optional<u64> sqrt_mod(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  u64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  u64 c = powmod(z, q, p);
  u64 r = powmod(a, (q + 1) / 2, p);
  u64 t = powmod(a, q, p);
  int m = s;
  while (t != 1) {
    int i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (int j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    r = mulmod(r, b, p);
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    m = i;
  }
  return r;
}

int valuation(i64 m, i64 p) {
  if (m == 0) throw std::invalid_argument("valuation: zero has infinite valuation");
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

int valuation(i128 m, i64 p) {
  if (m == 0) throw std::invalid_argument("valuation: zero has infinite valuation");
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

}  // namespace qsel
