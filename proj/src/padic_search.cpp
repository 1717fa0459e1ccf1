// Residue-disc search deciding whether binary forms take square values
// simultaneously somewhere on P^1(Q_p).
//
// A disc is a polynomial G(s), s in Z_p, together with an exponent e such
// that the form's value on the disc is p^e G(s) and G is primitive. For odd p
// a residue r with G(r) != 0 mod p fixes the square class on r + pZ_p, so only
// residues at roots of G mod p are refined. For p = 2 a disc is decided once
// the non-constant coefficients vanish mod 8.

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <vector>

#include "polymod.hpp"
#include "qsel/localsolve.hpp"

namespace qsel {

namespace {

struct Overflow {};

// 128-bit integer whose arithmetic throws Overflow instead of wrapping.
struct Checked128 {
  i128 v = 0;
  Checked128() = default;
  Checked128(i128 x) : v(x) {}  // NOLINT(google-explicit-constructor)

  friend Checked128 operator+(Checked128 a, Checked128 b) {
    i128 r;
    if (__builtin_add_overflow(a.v, b.v, &r)) throw Overflow{};
    return r;
  }
  friend Checked128 operator*(Checked128 a, Checked128 b) {
    i128 r;
    if (__builtin_mul_overflow(a.v, b.v, &r)) throw Overflow{};
    return r;
  }
};

u64 mod_u(const Checked128& x, u64 m) {
  i128 r = x.v % static_cast<i128>(m);
  return static_cast<u64>(r < 0 ? r + m : r);
}
void div_exact(Checked128& x, u64 p) { x.v /= static_cast<i128>(p); }

u64 mod_u(const BigInt& x, u64 m) {
  BigInt r = x % m;
  if (r < 0) r += m;
  return r.convert_to<u64>();
}
void div_exact(BigInt& x, u64 p) { x /= p; }

template <class Int>
Int lift(i128 x);
template <>
Checked128 lift<Checked128>(i128 x) {
  return x;
}
template <>
BigInt lift<BigInt>(i128 x) {
  const bool neg = x < 0;
  u128 u = neg ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
  BigInt r = static_cast<u64>(u >> 64);
  r <<= 64;
  r += static_cast<u64>(u);
  return neg ? BigInt(-r) : r;
}

template <class Int>
struct Poly {
  std::array<Int, 5> c{};
  int deg = 0;
};

constexpr int kMaxForms = 2;
constexpr u64 kScanLimit = 256;  // above this, Weil bounds replace residue scans
constexpr int kMaxDepth = 256;

template <class Int>
class DiscSearch {
 public:
  DiscSearch(u64 p, std::span<const BinaryForm> forms) : p_(p), k_(static_cast<int>(forms.size())) {
    if (k_ < 1 || k_ > kMaxForms) throw std::invalid_argument("simultaneously_square: one or two forms");
    for (int i = 0; i < k_; ++i) {
      const BinaryForm& f = forms[i];
      if (f.degree != 2 && f.degree != 4) throw std::invalid_argument("simultaneously_square: degree must be 2 or 4");
      Poly<Int>& c1 = affine_.g[i];
      Poly<Int>& c2 = infinite_.g[i];
      c1.deg = c2.deg = f.degree;
      Int pj = lift<Int>(1);
      for (int j = 0; j <= f.degree; ++j) {
        c1.c[j] = lift<Int>(f.coeffs[j]);
        c2.c[j] = lift<Int>(f.coeffs[f.degree - j]) * pj;
        pj = pj * lift<Int>(static_cast<i128>(p));
      }
    }
    if (p_ > 2 && p_ < kScanLimit) {
      residue_.assign(p_, 0);
      for (u64 t = 1; t < p_; ++t) residue_[mulmod(t, t, p_)] = 1;
    }
  }

  bool run() {
    normalize(affine_);
    normalize(infinite_);
    return visit(affine_, 0) || visit(infinite_, 0);
  }

 private:
  struct Disc {
    std::array<Poly<Int>, kMaxForms> g{};
    std::array<int, kMaxForms> e{};
  };

  bool is_qr(u64 v) const { return residue_.empty() ? jacobi(static_cast<i64>(v), static_cast<i64>(p_)) == 1 : residue_[v]; }

  void normalize(Disc& d) const {
    for (int i = 0; i < k_; ++i) {
      Poly<Int>& g = d.g[i];
      for (;;) {
        bool divisible = true;
        for (int j = 0; j <= g.deg && divisible; ++j) divisible = mod_u(g.c[j], p_) == 0;
        if (!divisible) break;
        for (int j = 0; j <= g.deg; ++j) div_exact(g.c[j], p_);
        ++d.e[i];
      }
    }
  }

  // Disc r + p Z_p of d, re-expressed in a fresh variable.
  Disc child(const Disc& d, u64 r) const {
    Disc out = d;
    const Int shift = lift<Int>(static_cast<i128>(r));
    const Int pp = lift<Int>(static_cast<i128>(p_));
    for (int i = 0; i < k_; ++i) {
      Poly<Int>& g = out.g[i];
      if (r != 0)
        for (int a = 0; a < g.deg; ++a)
          for (int j = g.deg - 1; j >= a; --j) g.c[j] = g.c[j] + shift * g.c[j + 1];
      Int pj = pp;
      for (int j = 1; j <= g.deg; ++j) {
        g.c[j] = g.c[j] * pj;
        pj = pj * pp;
      }
    }
    normalize(out);
    return out;
  }

  bool visit(const Disc& d, int depth) {
    if (depth > kMaxDepth) throw std::runtime_error("p-adic search exceeded its depth bound (degenerate input?)");
    return p_ == 2 ? visit_two(d, depth) : visit_odd(d, depth);
  }

  detail::ModPoly reduce(const Poly<Int>& g) const {
    detail::ModPoly out;
    out.deg = g.deg;
    for (int j = 0; j <= g.deg; ++j) out.c[j] = mod_u(g.c[j], p_);
    out.trim();
    return out;
  }

  bool exists_good_residue(const std::array<detail::ModPoly, kMaxForms>& bar) const {
    auto chi_one = [&](u64 v) { return is_qr(v); };
    const auto s1 = detail::square_part(bar[0], p_);
    if (k_ == 1) return !s1 || chi_one(*s1);
    const auto s2 = detail::square_part(bar[1], p_);
    if (s1 && s2) return chi_one(*s1) && chi_one(*s2);
    if (s1) return chi_one(*s1);
    if (s2) return chi_one(*s2);
    const auto s12 = detail::square_part(detail::mul(bar[0], bar[1], p_), p_);
    if (s12) return chi_one(*s12);
    return true;
  }

  bool visit_odd(const Disc& d, int depth) {
    std::array<detail::ModPoly, kMaxForms> bar;
    bool all_even = true;
    for (int i = 0; i < k_; ++i) {
      bar[i] = reduce(d.g[i]);
      all_even = all_even && d.e[i] % 2 == 0;
    }
    auto rejected_at = [&](u64 r, bool& has_root) {
      has_root = false;
      bool rejected = false;
      for (int i = 0; i < k_; ++i) {
        const u64 v = bar[i](r, p_);
        if (v == 0)
          has_root = true;
        else if (d.e[i] % 2 != 0 || !is_qr(v))
          rejected = true;
      }
      return rejected;
    };

    std::vector<u64> refine;
    if (p_ < kScanLimit) {
      for (u64 r = 0; r < p_; ++r) {
        bool has_root;
        if (rejected_at(r, has_root)) continue;
        if (!has_root) return true;
        refine.push_back(r);
      }
    } else {
      if (all_even && exists_good_residue(bar)) return true;
      std::vector<u64> candidates;
      for (int i = 0; i < k_; ++i) {
        auto rs = detail::roots(bar[i], p_);
        candidates.insert(candidates.end(), rs.begin(), rs.end());
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      for (u64 r : candidates) {
        bool has_root;
        if (!rejected_at(r, has_root)) refine.push_back(r);
      }
    }
    for (u64 r : refine)
      if (visit(child(d, r), depth + 1)) return true;
    return false;
  }

  enum class Status { kSquare, kNonSquare, kOpen };

  Status decide_two(const Poly<Int>& g, int e) const {
    const u64 c0 = mod_u(g.c[0], 8);
    if (c0 % 2 == 0) return Status::kOpen;
    u64 tail = 0;  // gcd-like: OR of the non-constant coefficients mod 8
    for (int j = 1; j <= g.deg; ++j) tail |= mod_u(g.c[j], 8);
    if (tail % 2 != 0) return Status::kOpen;
    // Every value on the disc is a unit times 2^e.
    if (e % 2 != 0) return Status::kNonSquare;
    if (tail == 0) return c0 == 1 ? Status::kSquare : Status::kNonSquare;
    if (tail % 4 == 0 && c0 % 4 == 3) return Status::kNonSquare;
    return Status::kOpen;
  }

  // Breadth-first: a depth-first walk can follow the 2-adic digits of a root
  // forever while a decidable sibling disc waits.
  bool visit_two(const Disc& start, int depth) {
    std::deque<std::pair<Disc, int>> queue;
    queue.emplace_back(start, depth);
    while (!queue.empty()) {
      auto [d, level] = std::move(queue.front());
      queue.pop_front();
      if (level > kMaxDepth) throw std::runtime_error("p-adic search exceeded its depth bound (degenerate input?)");
      bool all_square = true;
      bool rejected = false;
      for (int i = 0; i < k_ && !rejected; ++i) {
        const Status s = decide_two(d.g[i], d.e[i]);
        rejected = s == Status::kNonSquare;
        all_square = all_square && s == Status::kSquare;
      }
      if (rejected) continue;
      if (all_square) return true;
      queue.emplace_back(child(d, 0), level + 1);
      queue.emplace_back(child(d, 1), level + 1);
    }
    return false;
  }

  u64 p_;
  int k_;
  Disc affine_{};
  Disc infinite_{};
  std::vector<char> residue_;
};

}  // namespace

bool simultaneously_square(std::span<const BinaryForm> forms, i64 p) {
  if (p < 2) throw std::invalid_argument("simultaneously_square: p must be prime");
  try {
    return DiscSearch<Checked128>(static_cast<u64>(p), forms).run();
  } catch (const Overflow&) {
    return DiscSearch<BigInt>(static_cast<u64>(p), forms).run();
  }
}

}  // namespace qsel
