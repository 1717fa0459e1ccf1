#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracle {

namespace {

i64 mod(i128 v, i64 m) {
  i128 r = v % m;
  if (r < 0) r += m;
  return static_cast<i64>(r);
}

int val(i128 v, i64 p) {
  if (v == 0) return 1 << 20;
  int k = 0;
  while (v % p == 0) {
    v /= p;
    ++k;
  }
  return k;
}

using Vec = std::array<i64, 4>;

struct State {
  Vec v;
  int unit;  // index normalized to 1
};

i128 form(const std::array<i64, 4>& c, const Vec& v) {
  i128 s = 0;
  for (int i = 0; i < 4; ++i) s += static_cast<i128>(c[i]) * v[i] * v[i];
  return s;
}

// Smallest valuation among the 2x2 minors of the Jacobian at v.
int minor_valuation(const DiagonalPair& q, const Vec& v, i64 p) {
  int best = 1 << 20;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const i128 gi0 = 2 * static_cast<i128>(q[0][i]) * v[i], gj0 = 2 * static_cast<i128>(q[0][j]) * v[j];
      const i128 gi1 = 2 * static_cast<i128>(q[1][i]) * v[i], gj1 = 2 * static_cast<i128>(q[1][j]) * v[j];
      best = std::min(best, val(gi0 * gj1 - gj0 * gi1, p));
    }
  return best;
}

bool solves(const DiagonalPair& q, const Vec& v, i64 pk) {
  return mod(form(q[0], v), pk) == 0 && mod(form(q[1], v), pk) == 0;
}

bool is_square_unit(i64 u, i64 p) {
  if (p == 2) return mod(u, 8) == 1;
  const i64 r = mod(u, p);
  for (i64 t = 1; t < p; ++t)
    if (t * t % p == r) return true;
  return false;
}

// Square class of v in Q_p when it is fixed by v mod p^k, else nullopt.
std::optional<bool> determined_square(i128 v, i64 p, int k) {
  if (v == 0) return true;
  const int e = val(v, p);
  const int need = p == 2 ? 3 : 1;
  if (e + need > k) return std::nullopt;
  i128 u = v;
  for (int i = 0; i < e; ++i) u /= p;
  return e % 2 == 0 && is_square_unit(mod(u, p == 2 ? 8 : p), p);
}

i64 ipow(i64 p, int k) {
  i64 r = 1;
  while (k-- > 0) r *= p;
  return r;
}

}  // namespace

std::optional<bool> quadrics_soluble_zp(const DiagonalPair& q_in, i64 p, int max_k, std::size_t max_states) {
  // Dividing a quadric by a power of p does not change its zeros.
  DiagonalPair q = q_in;
  for (auto& row : q)
    while (std::all_of(row.begin(), row.end(), [&](i64 c) { return c % p == 0; }))
      for (i64& c : row) c /= p;
  std::vector<State> cur;
  // Level 1: the first unit coordinate is scaled to 1, earlier ones vanish mod p.
  for (int unit = 0; unit < 4; ++unit) {
    const int free = 3 - unit;
    i64 count = ipow(p, free);
    for (i64 idx = 0; idx < count; ++idx) {
      Vec v{0, 0, 0, 0};
      v[unit] = 1;
      i64 t = idx;
      for (int i = unit + 1; i < 4; ++i) {
        v[i] = t % p;
        t /= p;
      }
      if (!solves(q, v, p)) continue;
      if (minor_valuation(q, v, p) == 0) return true;
      cur.push_back({v, unit});
      if (cur.size() > max_states) return std::nullopt;
    }
  }
  i64 pk = p;
  for (int k = 1; k < max_k; ++k) {
    if (cur.empty()) return false;
    std::vector<State> next;
    const i64 pk1 = pk * p;
    for (const State& s : cur) {
      // Coordinates other than the normalized one move by multiples of p^k.
      const i64 count = p * p * p;
      for (i64 idx = 0; idx < count; ++idx) {
        Vec v = s.v;
        i64 t = idx;
        for (int i = 0; i < 4; ++i) {
          if (i == s.unit) continue;
          v[i] += (t % p) * pk;
          t /= p;
        }
        if (!solves(q, v, pk1)) continue;
        const int m = minor_valuation(q, v, p);
        if (k + 1 >= 2 * m + 1) return true;
        next.push_back({v, s.unit});
        if (next.size() > max_states) return std::nullopt;
      }
    }
    cur = std::move(next);
    pk = pk1;
  }
  if (cur.empty()) return false;
  return std::nullopt;
}

DiagonalPair quadruple_quadrics(i64 d1, i64 d2, i64 d3, i64 d4) {
  // (X, W, Y, Z): D1 X^2 + D4 W^2 - D2 Y^2 = 0, D1 X^2 - D4 W^2 - D3 Z^2 = 0.
  return {{{d1, d4, -d2, 0}, {d1, -d4, 0, -d3}}};
}

DiagonalPair pair_quadrics(i64 delta1, i64 delta2, i64 n) {
  // (u, v, w, t): delta1 u^2 - delta2 v^2 - n w^2 = 0, delta1 u^2 - delta1 delta2 t^2 + n w^2 = 0.
  return {{{delta1, -delta2, -n, 0}, {delta1, 0, n, -delta1 * delta2}}};
}

bool pair_real_soluble(i64 delta1, i64 delta2, i64 n) {
  // w = 0: delta1 u^2 = delta2 v^2 = delta1 delta2 t^2 with u != 0.
  if (delta1 > 0 && delta2 > 0) return true;
  // w = 1, s = u^2 >= 0: need (delta1 s - n) / delta2 >= 0 and (delta1 s + n) / (delta1 delta2) >= 0.
  double lo = 0, hi = INFINITY;
  auto constrain = [&](double slope, double offset, double denom) {
    // (slope s + offset) / denom >= 0
    const double a = slope / denom, b = offset / denom;
    if (a > 0) lo = std::max(lo, -b / a);
    else if (a < 0) hi = std::min(hi, -b / a);
    else if (b < 0) hi = -1;
  };
  constrain(static_cast<double>(delta1), static_cast<double>(-n), static_cast<double>(delta2));
  constrain(static_cast<double>(delta1), static_cast<double>(n), static_cast<double>(delta1) * delta2);
  return lo <= hi;
}

std::optional<bool> quartic_soluble_qp(i64 a, i64 b, i64 c, i64 p, int max_k) {
  struct Node {
    i64 x;
    int k;
    bool second;  // chart (1, y) with y in pZ_p
  };
  std::vector<Node> stack;
  for (i64 x = 0; x < p; ++x) stack.push_back({x, 1, false});
  stack.push_back({0, 1, true});
  bool open = false;
  while (!stack.empty()) {
    const Node nd = stack.back();
    stack.pop_back();
    const i128 x = nd.x;
    const i128 v = nd.second ? a + b * x * x + c * x * x * x * x : a * x * x * x * x + b * x * x + c;
    if (const auto s = determined_square(v, p, nd.k)) {
      if (*s) return true;
      continue;
    }
    if (nd.k >= max_k) {
      open = true;
      continue;
    }
    const i64 pk = ipow(p, nd.k);
    for (i64 t = 0; t < p; ++t) stack.push_back({nd.x + t * pk, nd.k + 1, nd.second});
  }
  if (open) return std::nullopt;
  return false;
}

bool quartic_soluble_real(i64 a, i64 b, i64 c) {
  // max over t = x^2 / y^2 >= 0 of a t^2 + b t + c, plus the point y = 0.
  if (a > 0 || c > 0) return true;
  const long double A = a, B = b, C = c;
  if (a == 0) return B > 0 || C >= 0;
  const long double t = std::max<long double>(0, -B / (2 * A));
  return A * t * t + B * t + C >= 0;
}

std::vector<i64> selmer_brute(i64 B, i64 m, i64 n) {
  std::vector<i64> primes = qsel::factor(2 * n).primes();
  std::vector<i64> out;
  const i64 am = m < 0 ? -m : m;
  for (i64 d = 1; d <= am; ++d) {
    if (am % d != 0 || !qsel::is_squarefree(d)) continue;
    for (i64 s : {d, -d}) {
      const i64 c = m / s;
      if (!quartic_soluble_real(s, B, c)) continue;
      bool ok = true;
      for (i64 p : primes) {
        const auto r = quartic_soluble_qp(s, B, c, p);
        if (!r) throw std::runtime_error("quartic oracle inconclusive");
        if (!*r) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<i64, i64>> sel2_brute(i64 n) {
  const std::vector<i64> primes = qsel::factor(2 * n).primes();
  std::vector<i64> classes;
  for (i64 d = 1; d <= 2 * n; ++d)
    if ((2 * n) % d == 0 && qsel::is_squarefree(d)) {
      classes.push_back(d);
      classes.push_back(-d);
    }
  std::vector<std::pair<i64, i64>> out;
  for (i64 d1 : classes)
    for (i64 d2 : classes) {
      if (!pair_real_soluble(d1, d2, n)) continue;
      bool ok = true;
      for (i64 p : primes) {
        const auto r = quadrics_soluble_zp(pair_quadrics(d1, d2, n), p);
        if (!r) throw std::runtime_error("quadric oracle inconclusive");
        if (!*r) {
          ok = false;
          break;
        }
      }
      if (ok) out.emplace_back(d1, d2);
    }
  std::sort(out.begin(), out.end());
  return out;
}

int jacobi_euler(i64 a, i64 m) {
  int result = 1;
  for (const auto& pp : qsel::factor(m).factors) {
    const i64 p = pp.prime;
    const i64 r = mod(a, p);
    int sym;
    if (r == 0) {
      sym = 0;
    } else {
      i128 acc = 1, base = r;
      for (i64 e = (p - 1) / 2; e > 0; e >>= 1) {
        if (e & 1) acc = acc * base % p;
        base = base * base % p;
      }
      sym = acc == 1 ? 1 : -1;
    }
    for (int i = 0; i < pp.exponent; ++i) result *= sym;
  }
  return result;
}

std::optional<std::array<i64, 3>> first_point(i64 a, i64 b, i64 c, i64 H) {
  auto test = [&](i64 x, i64 y) -> std::optional<std::array<i64, 3>> {
    const i128 v = static_cast<i128>(a) * x * x * x * x + static_cast<i128>(b) * x * x * y * y +
                   static_cast<i128>(c) * y * y * y * y;
    if (v < 0) return std::nullopt;
    i64 z = static_cast<i64>(std::sqrt(static_cast<long double>(v)));
    while (static_cast<i128>(z) * z > v) --z;
    while (static_cast<i128>(z + 1) * (z + 1) <= v) ++z;
    if (static_cast<i128>(z) * z != v) return std::nullopt;
    return std::array<i64, 3>{x, y, z};
  };
  for (i64 m = 1; m <= H; ++m) {
    for (i64 x = 0; x < m; ++x)
      if (auto r = test(x, m)) return r;
    for (i64 y = 0; y <= m; ++y)
      if (auto r = test(m, y)) return r;
  }
  return std::nullopt;
}

}  // namespace oracle
