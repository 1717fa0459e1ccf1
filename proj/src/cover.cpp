#include "cover.hpp"

#include <numeric>
#include <stdexcept>

namespace qsel::detail {

namespace {

using Solution = std::array<BigInt, 3>;

BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

void make_primitive(Solution& s) {
  BigInt g = gcd(gcd(abs_big(s[0]), abs_big(s[1])), abs_big(s[2]));
  if (g > 1)
    for (auto& x : s) x /= g;
}

// t with t^2 = a mod m for squarefree m >= 2, assembled prime by prime.
std::optional<i128> sqrt_mod_squarefree(i64 a, i64 m) {
  i128 t = 0;
  i128 modulus = 1;
  for (i64 p : factor(m).primes()) {
    const auto r = sqrt_mod(reduce_mod(a, static_cast<u64>(p)), static_cast<u64>(p));
    if (!r) return std::nullopt;
    const u64 cur = static_cast<u64>(t % p);
    const u64 inv = invmod(static_cast<u64>(modulus % p), static_cast<u64>(p));
    const u64 step = mulmod((*r + p - cur) % p, inv, static_cast<u64>(p));
    t += modulus * static_cast<i128>(step);
    modulus *= p;
  }
  return t;
}

// Z^2 = A X^2 + B Y^2 for squarefree A, B, by Lagrange's descent.
std::optional<Solution> solve_norm(i64 A, i64 B) {
  if (A == 1) return Solution{1, 1, 0};
  if (B == 1) return Solution{1, 0, 1};
  if (A < 0 && B < 0) return std::nullopt;
  if ((A < 0 ? -A : A) > (B < 0 ? -B : B)) {
    auto s = solve_norm(B, A);
    if (s) std::swap((*s)[1], (*s)[2]);
    return s;
  }
  const i64 mod = B < 0 ? -B : B;
  auto t0 = sqrt_mod_squarefree(A, mod);
  if (!t0) return std::nullopt;
  i128 t = *t0 % mod;
  if (2 * t > mod) t -= mod;
  const i128 num = t * t - A;
  if (num % B != 0) throw std::logic_error("solve_norm: bad square root");
  const i128 k = num / B;
  if (k == 0) throw std::logic_error("solve_norm: A is a square");
  const auto [kc, m] = squarefree_kernel(static_cast<i64>(k));
  const i64 k1 = kc.rep();
  auto sub = solve_norm(A, k1);
  if (!sub) return std::nullopt;
  const BigInt tb = static_cast<i64>(t);
  const auto& [z1, x1, y1] = *sub;
  Solution out{tb * z1 + A * x1, z1 + tb * x1, BigInt(k1) * m * y1};
  make_primitive(out);
  return out;
}

BigInt eval2(const std::array<BigInt, 3>& q, const BigInt& s, const BigInt& r) {
  return q[0] * r * r + q[1] * s * r + q[2] * s * s;
}

std::array<BigInt, 5> mul2(const std::array<BigInt, 3>& a, const std::array<BigInt, 3>& b) {
  std::array<BigInt, 5> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::optional<BigInt> exact_sqrt(const BigInt& v) {
  if (v < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(v);
  if (r * r != v) return std::nullopt;
  return r;
}

// Three independent filters; squares pass all of them, other values rarely do.
constexpr u64 kModA = 63 * 65 * 11;
constexpr u64 kModB = 17 * 19 * 23 * 29;

struct Filters {
  std::array<bool, 64> sq64{};
  std::vector<char> sqa, sqb;
  Filters() : sqa(kModA, 0), sqb(kModB, 0) {
    for (u64 t = 0; t < 64; ++t) sq64[t * t % 64] = true;
    for (u64 t = 0; t < kModA; ++t) sqa[t * t % kModA] = 1;
    for (u64 t = 0; t < kModB; ++t) sqb[t * t % kModB] = 1;
  }
};

const Filters& filters() {
  static const Filters f;
  return f;
}

u64 residue(const BigInt& v, u64 m) {
  BigInt r = v % m;
  if (r < 0) r += m;
  return r.convert_to<u64>();
}

u64 low64(const BigInt& v) {
  static const BigInt two64 = BigInt(1) << 64;
  BigInt r = v % two64;
  if (r < 0) r += two64;
  return r.convert_to<u64>();
}

struct PreparedCover {
  std::array<u64, 5> g64, ga, gb;
};

}  // namespace

std::optional<std::array<BigInt, 3>> solve_legendre(i64 a, i64 b, i64 c) {
  if (a == 0 || b == 0 || c == 0) throw std::invalid_argument("solve_legendre: zero coefficient");
  // (c z)^2 = -a c x^2 - b c y^2.
  i64 A, B;
  if (__builtin_mul_overflow(-a, c, &A) || __builtin_mul_overflow(-b, c, &B))
    throw std::overflow_error("solve_legendre: coefficients too large");
  const auto [ka, alpha] = squarefree_kernel(A);
  const auto [kb, beta] = squarefree_kernel(B);
  auto s = solve_norm(ka.rep(), kb.rep());
  if (!s) return std::nullopt;
  const auto& [Z, X, Y] = *s;
  const BigInt x = X * beta, y = Y * alpha, z = Z * alpha * beta;
  Solution out{x * c, y * c, z};
  make_primitive(out);
  if (a * out[0] * out[0] + b * out[1] * out[1] + c * out[2] * out[2] != 0)
    throw std::logic_error("solve_legendre: solution check failed");
  return out;
}

std::optional<CoverQuartic> cover_quartic(const Sel2Pair& pair, i64 n) {
  const i64 d1 = pair.delta1.rep(), d2 = pair.delta2.rep();
  const std::array<i64, 3> q{d1, -d2, -n};
  const auto p0 = solve_legendre(q[0], q[1], q[2]);
  if (!p0) return std::nullopt;
  const Solution& P = *p0;
  int j = 2;
  while (P[j] == 0) --j;
  const int i1 = j == 0 ? 1 : 0;
  const int i2 = j == 2 ? 1 : 2;
  // Line through P0 in direction R = (s, r) on the coordinates i1, i2:
  // X = Q(R) P0 - 2 B(P0, R) R.
  const BigInt ls = q[i1] * P[i1];
  const BigInt lr = q[i2] * P[i2];
  CoverQuartic out;
  out.pair = pair;
  out.n = n;
  auto& u = out.param;
  u[j] = {q[i2] * P[j], 0, q[i1] * P[j]};
  u[i1] = {q[i2] * P[i1], -2 * lr, q[i1] * P[i1] - 2 * ls};
  u[i2] = {q[i2] * P[i2] - 2 * lr, -2 * ls, q[i1] * P[i2]};
  BigInt content = 0;
  for (const auto& f : u)
    for (const auto& c : f) content = gcd(content, abs_big(c));
  if (content > 1)
    for (auto& f : u)
      for (auto& c : f) c /= content;

  const auto uu = mul2(u[0], u[0]);
  const auto ww = mul2(u[2], u[2]);
  BigInt g_content = 0;
  for (int k = 0; k < 5; ++k) {
    out.g[k] = BigInt(d1) * d2 * (d1 * uu[k] + n * ww[k]);
    g_content = gcd(g_content, abs_big(out.g[k]));
  }
  // Square factors of the content do not change which values are squares.
  for (i64 p : small_primes()) {
    const BigInt p2 = BigInt(p) * p;
    if (p2 > g_content) break;
    while (g_content % p2 == 0) {
      g_content /= p2;
      for (auto& c : out.g) c /= p2;
    }
  }
  return out;
}

std::optional<CoverHit> cover_search(std::span<const CoverQuartic> covers, i64 H) {
  if (H < 1) throw std::invalid_argument("cover_search: height must be positive");
  if (covers.empty()) return std::nullopt;
  const Filters& fl = filters();
  std::vector<PreparedCover> prep(covers.size());
  for (std::size_t i = 0; i < covers.size(); ++i)
    for (int k = 0; k < 5; ++k) {
      prep[i].g64[k] = low64(covers[i].g[k]);
      prep[i].ga[k] = residue(covers[i].g[k], kModA);
      prep[i].gb[k] = residue(covers[i].g[k], kModB);
    }

  auto try_pair = [&](i64 s, i64 r) -> std::optional<CoverHit> {
    if (std::gcd(s, r) != 1) return std::nullopt;
    std::array<u64, 5> p64, pa, pb;
    {
      const u64 s64 = static_cast<u64>(s), r64 = static_cast<u64>(r);
      const u64 sa = reduce_mod(s, kModA), ra = static_cast<u64>(r) % kModA;
      const u64 sb = reduce_mod(s, kModB), rb = static_cast<u64>(r) % kModB;
      std::array<u64, 5> s64p{1}, r64p{1}, sap{1}, rap{1}, sbp{1}, rbp{1};
      for (int k = 1; k < 5; ++k) {
        s64p[k] = s64p[k - 1] * s64;
        r64p[k] = r64p[k - 1] * r64;
        sap[k] = sap[k - 1] * sa % kModA;
        rap[k] = rap[k - 1] * ra % kModA;
        sbp[k] = sbp[k - 1] * sb % kModB;
        rbp[k] = rbp[k - 1] * rb % kModB;
      }
      for (int k = 0; k < 5; ++k) {
        p64[k] = s64p[k] * r64p[4 - k];
        pa[k] = sap[k] * rap[4 - k] % kModA;
        pb[k] = sbp[k] * rbp[4 - k] % kModB;
      }
    }
    for (std::size_t i = 0; i < prep.size(); ++i) {
      const PreparedCover& c = prep[i];
      u64 v64 = 0, va = 0, vb = 0;
      for (int k = 0; k < 5; ++k) v64 += c.g64[k] * p64[k];
      if (!fl.sq64[v64 & 63]) continue;
      for (int k = 0; k < 5; ++k) va += c.ga[k] * pa[k] % kModA;
      if (!fl.sqa[va % kModA]) continue;
      for (int k = 0; k < 5; ++k) vb += c.gb[k] * pb[k] % kModB;
      if (!fl.sqb[vb % kModB]) continue;

      const CoverQuartic& cq = covers[i];
      const BigInt bs = s, br = r;
      BigInt g = 0;
      for (int k = 0; k < 5; ++k) g += cq.g[k] * pow(bs, k) * pow(br, 4 - k);
      if (!exact_sqrt(g)) continue;
      const BigInt u = eval2(cq.param[0], bs, br);
      const BigInt w = eval2(cq.param[2], bs, br);
      if (w == 0) continue;
      const BigRational x = BigRational(cq.pair.delta1.rep()) * BigRational(u * u) / BigRational(w * w);
      const BigRational y2 = x * x * x - BigRational(cq.n) * cq.n * x;
      const auto yn = exact_sqrt(numerator(y2));
      const auto yd = exact_sqrt(denominator(y2));
      if (!yn || !yd) throw std::logic_error("cover_search: covering point does not map to the curve");
      return CoverHit{i, Point::affine(x, BigRational(*yn) / BigRational(*yd))};
    }
    return std::nullopt;
  };

  for (i64 m = 1; m <= H; ++m) {
    for (i64 r = 0; r < m; ++r)
      for (i64 s : {-m, m}) {
        if (r == 0 && s < 0) continue;
        if (auto hit = try_pair(s, r)) return hit;
      }
    for (i64 s = -m; s <= m; ++s)
      if (auto hit = try_pair(s, m)) return hit;
  }
  return std::nullopt;
}

}  // namespace qsel::detail
