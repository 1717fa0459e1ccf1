#include "qsel/localsolve.hpp"

#include <numeric>
#include <stdexcept>

namespace qsel {

namespace {

int legendre(i64 a, i64 p) { return jacobi(static_cast<i64>(reduce_mod(a, static_cast<u64>(p))), p); }

bool supported_on(i64 rep, i64 two_n) {
  i64 r = rep < 0 ? -rep : rep;
  for (const auto& pp : factor(r).factors)
    if (two_n % pp.prime != 0) return false;
  return true;
}

}  // namespace

BinaryForm BinaryForm::quartic(const IntegralQuartic& f) {
  return {4, {f.c, 0, f.b, 0, f.a}};
}

BinaryForm BinaryForm::diagonal_quadratic(i128 alpha, i128 beta) {
  return {2, {beta, 0, alpha, 0, 0}};
}

void CoveringQuadruple::validate() const {
  const std::array<i64, 4> d{d1, d2, d3, d4};
  for (i64 x : d) {
    if (x <= 0) throw std::invalid_argument("quadruple entries must be positive");
    if (!is_squarefree(x)) throw std::invalid_argument("quadruple entries must be squarefree");
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::gcd(d[i], d[j]) != 1) throw std::invalid_argument("quadruple entries must be pairwise coprime");
  i64 prod = 1;
  for (i64 x : d)
    if (__builtin_mul_overflow(prod, x, &prod)) throw std::invalid_argument("quadruple product overflows");
}

// In the variables (X : W): D2 (D1 X^2 + D4 W^2) = (D2 Y)^2 and
// D3 (D1 X^2 - D4 W^2) = (D3 Z)^2.
std::array<BinaryForm, 2> CoveringQuadruple::forms() const {
  return {BinaryForm::diagonal_quadratic(static_cast<i128>(d2) * d1, static_cast<i128>(d2) * d4),
          BinaryForm::diagonal_quadratic(static_cast<i128>(d3) * d1, -static_cast<i128>(d3) * d4)};
}

void PairTorsor::validate() const {
  if (n < 1 || !is_squarefree(n)) throw std::invalid_argument("pair torsor: n must be squarefree and positive");
  const i64 two_n = 2 * n;
  if (!supported_on(delta1.rep(), two_n) || !supported_on(delta2.rep(), two_n))
    throw std::invalid_argument("pair torsor: class ramified outside 2n");
}

// In (u : w): d2 v^2 = d1 u^2 - n w^2 and d1 d2 t^2 = d1 u^2 + n w^2, each
// multiplied through by the coefficient on the left.
std::array<BinaryForm, 2> PairTorsor::forms() const {
  const i128 a = delta1.rep();
  const i128 b = delta2.rep();
  return {BinaryForm::diagonal_quadratic(b * a, -b * n), BinaryForm::diagonal_quadratic(a * a * b, a * b * n)};
}

bool real_soluble_quartic(const IntegralQuartic& f) {
  if (f.a >= 0 || f.c >= 0) return true;
  return f.b > 0 && static_cast<i128>(f.b) * f.b >= 4 * static_cast<i128>(f.a) * f.c;
}

bool real_soluble_quartic(const BinaryQuartic& f) {
  if (f.a.numerator() >= 0 || f.c.numerator() >= 0) return true;
  return f.B > 0 && Rational(f.B) * f.B >= 4 * f.a * f.c;
}

bool qp_soluble_quartic(const IntegralQuartic& f, i64 p) {
  const FamilySpec spec = f.family();
  if (spec.degenerate()) throw std::invalid_argument("qp_soluble_quartic: degenerate quartic");
  if (p != 2) {
    const i128 m = spec.M;
    const i128 inner = static_cast<i128>(spec.B) * spec.B - 4 * m;
    if (m % p != 0 && inner % p != 0) return true;
  }
  const BinaryForm form = BinaryForm::quartic(f);
  return simultaneously_square(std::span(&form, 1), p);
}

bool quadruple_qp_soluble_symbols(const CoveringQuadruple& q, std::optional<i64> p) {
  q.validate();
  if (!p) return true;
  if (*p == 2) throw std::invalid_argument("quadruple_qp_soluble_symbols: use quadruple_q2_soluble at 2");
  const i64 pr = *p;
  if (q.n() % pr != 0) return true;
  auto both = [&](i64 x, i64 y) { return legendre(x, pr) == 1 && legendre(y, pr) == 1; };
  // Products below are reduced first so nothing overflows.
  auto mul = [&](i64 x, i64 y) { return static_cast<i64>(mulmod(reduce_mod(x, pr), reduce_mod(y, pr), pr)); };
  if (q.d1 % pr == 0) return both(mul(q.d4, q.d2), -mul(q.d4, q.d3));
  if (q.d2 % pr == 0) return both(-mul(q.d1, q.d4), mul(2 * (q.d1 % pr), q.d3));
  if (q.d3 % pr == 0) return both(mul(q.d1, q.d4), mul(2 * (q.d1 % pr), q.d2));
  return both(mul(q.d1, q.d2), mul(q.d1, q.d3));
}

bool quadruple_qp_soluble_search(const CoveringQuadruple& q, i64 p) {
  q.validate();
  const auto f = q.forms();
  return simultaneously_square(f, p);
}

bool quadruple_q2_soluble(const CoveringQuadruple& q) { return quadruple_qp_soluble_search(q, 2); }

bool pair_torsor_real_soluble(const PairTorsor& t) { return t.delta1.rep() * t.delta2.rep() > 0; }

bool pair_torsor_qp_soluble(const PairTorsor& t, i64 p) {
  const auto f = t.forms();
  return simultaneously_square(f, p);
}

bool pair_torsor_locally_soluble(const PairTorsor& t) {
  t.validate();
  if (!pair_torsor_real_soluble(t)) return false;
  if (!pair_torsor_qp_soluble(t, 2)) return false;
  for (const auto& pp : factor(t.n).factors)
    if (pp.prime != 2 && !pair_torsor_qp_soluble(t, pp.prime)) return false;
  return true;
}

}  // namespace qsel
