#include "polymod.hpp"

#include <algorithm>
#include <stdexcept>

namespace qsel::detail {

namespace {

using Vec = std::vector<u64>;

void trim(Vec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Vec sub(Vec a, const Vec& b, u64 p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
  trim(a);
  return a;
}

Vec multiply(const Vec& a, const Vec& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  Vec r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  trim(r);
  return r;
}

// Quotient and remainder of a by b (b nonzero).
std::pair<Vec, Vec> divmod(Vec a, const Vec& b, u64 p) {
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  const u64 inv = invmod(b.back(), p);
  Vec q(a.size() - b.size() + 1, 0);
  for (std::size_t i = a.size(); i-- >= b.size();) {
    const u64 coef = mulmod(a[i], inv, p);
    q[i - (b.size() - 1)] = coef;
    if (coef == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t k = i - (b.size() - 1) + j;
      a[k] = (a[k] + p - mulmod(coef, b[j], p)) % p;
    }
  }
  trim(a);
  trim(q);
  return {q, a};
}

Vec monic(Vec a, u64 p) {
  trim(a);
  if (a.empty()) return a;
  const u64 inv = invmod(a.back(), p);
  for (auto& x : a) x = mulmod(x, inv, p);
  return a;
}

Vec gcd(Vec a, Vec b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Vec r = divmod(a, b, p).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

Vec powmod_poly(Vec base, u64 e, const Vec& f, u64 p) {
  Vec result{1};
  base = divmod(base, f, p).second;
  while (e) {
    if (e & 1) result = divmod(multiply(result, base, p), f, p).second;
    base = divmod(multiply(base, base, p), f, p).second;
    e >>= 1;
  }
  return result;
}

void split_linear(const Vec& g, u64 p, std::vector<u64>& out) {
  if (g.size() <= 1) return;
  if (g.size() == 2) {
    out.push_back((p - g[0]) % p);  // g monic: x + g0
    return;
  }
  for (u64 delta = 0; delta < p; ++delta) {
    Vec h = powmod_poly({delta % p, 1}, (p - 1) / 2, g, p);
    h = sub(h, {1}, p);
    Vec d = gcd(g, h, p);
    if (d.size() > 1 && d.size() < g.size()) {
      split_linear(d, p, out);
      split_linear(monic(divmod(g, d, p).first, p), p, out);
      return;
    }
  }
  throw std::logic_error("roots: failed to split a product of linear factors");
}

void quadratic_roots(u64 a, u64 b, u64 c, u64 p, std::vector<u64>& out) {
  if (a == 0) {
    if (b != 0) out.push_back(mulmod(p - c % p, invmod(b, p), p));
    return;
  }
  const u64 disc = (mulmod(b, b, p) + p - mulmod(4 % p, mulmod(a, c, p), p)) % p;
  const auto s = sqrt_mod(disc, p);
  if (!s) return;
  const u64 inv2a = invmod(mulmod(2, a, p), p);
  out.push_back(mulmod((p - b + *s) % p, inv2a, p));
  out.push_back(mulmod((2 * p - b - *s) % p, inv2a, p));
}

}  // namespace

ModPoly mul(const ModPoly& f, const ModPoly& g, u64 p) {
  ModPoly r;
  if (f.deg < 0 || g.deg < 0) return r;
  if (f.deg + g.deg > ModPoly::kMaxDegree) throw std::logic_error("ModPoly: degree overflow");
  for (int i = 0; i <= f.deg; ++i)
    for (int j = 0; j <= g.deg; ++j) r.c[i + j] = (r.c[i + j] + mulmod(f.c[i], g.c[j], p)) % p;
  r.deg = f.deg + g.deg;
  r.trim();
  return r;
}

std::optional<u64> square_part(const ModPoly& f, u64 p) {
  if (f.deg < 0 || f.deg % 2 != 0) return std::nullopt;
  const u64 lambda = f.c[f.deg];
  const u64 inv = invmod(lambda, p);
  const int m = f.deg / 2;
  std::array<u64, ModPoly::kMaxDegree + 1> g{};
  for (int k = 0; k <= f.deg; ++k) g[k] = mulmod(f.c[k], inv, p);
  std::array<u64, ModPoly::kMaxDegree / 2 + 1> h{};
  h[m] = 1;
  const u64 inv2 = invmod(2, p);
  // Match coefficients of h^2 from the top down.
  for (int k = 1; k <= m; ++k) {
    u64 s = 0;
    for (int i = m - k + 1; i <= m - 1; ++i) {
      const int j = 2 * m - k - i;
      if (j > m - k && j < m) s = (s + mulmod(h[i], h[j], p)) % p;
    }
    h[m - k] = mulmod((g[2 * m - k] + p - s) % p, inv2, p);
  }
  for (int k = 0; k <= f.deg; ++k) {
    u64 s = 0;
    for (int i = std::max(0, k - m); i <= std::min(k, m); ++i) s = (s + mulmod(h[i], h[k - i], p)) % p;
    if (s != g[k]) return std::nullopt;
  }
  return lambda;
}

std::vector<u64> roots(const ModPoly& f, u64 p) {
  if (f.deg < 0) throw std::invalid_argument("roots: zero polynomial");
  if (f.deg > 4) throw std::invalid_argument("roots: degree above 4");
  std::vector<u64> out;
  if (f.deg == 0) return out;
  if (f.deg <= 2) {
    quadratic_roots(f.deg == 2 ? f.c[2] : 0, f.c[1], f.c[0], p, out);
  } else if (f.is_even()) {
    std::vector<u64> squares;
    quadratic_roots(f.c[4], f.c[2], f.c[0], p, squares);
    for (u64 s : squares) {
      if (auto r = sqrt_mod(s, p)) {
        out.push_back(*r);
        out.push_back((p - *r) % p);
      }
    }
  } else {
    Vec g(f.c.begin(), f.c.begin() + f.deg + 1);
    g = monic(g, p);
    Vec xp = powmod_poly({0, 1}, p, g, p);
    Vec lin = gcd(g, sub(xp, {0, 1}, p), p);
    split_linear(lin, p, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace qsel::detail
