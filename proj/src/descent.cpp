#include "qsel/descent.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qsel {

namespace {

constexpr std::array<IsogenyDescriptor, kIsogenyCount> kTable{{
    {Isogeny::kPhi1, 1, false, {0, -1}, {0, 4}, 0, 0},
    {Isogeny::kPhiHat1, 1, true, {0, 4}, {0, -1}, 0, 0},
    // The kernel of phi2 is (n, 0): with the kernel at -n the image would be
    // y^2 = x^3 + 6n x^2 + n^2 x, the phi3 curve.
    {Isogeny::kPhi2, 2, false, {0, -1}, {-6, 1}, 1, 0},
    {Isogeny::kPhiHat2, 2, true, {-6, 1}, {0, -1}, 0, 1},
    {Isogeny::kPhi3, 3, false, {0, -1}, {6, 1}, -1, 0},
    {Isogeny::kPhiHat3, 3, true, {6, 1}, {0, -1}, 0, -1},
}};

constexpr std::array<std::string_view, kIsogenyCount> kNames{"phi1", "phi1hat", "phi2", "phi2hat", "phi3", "phi3hat"};

Curve scale(const Curve& per_n, i64 n) {
  i64 a4;
  if (__builtin_mul_overflow(per_n.a4, n * n, &a4) || n > 3'000'000'000LL)
    throw std::overflow_error("curve coefficients overflow");
  return {per_n.a2 * n, a4};
}

std::optional<BigInt> exact_sqrt(const BigInt& v) {
  if (v < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(v);
  if (r * r != v) return std::nullopt;
  return r;
}

BigRational rhs(const Curve& e, const BigRational& x) { return x * x * x + e.a2 * x * x + e.a4 * x; }

// Class of a rational whose class is known to lie in the group generated by
// -1 and the given primes (x-classes of rational points always do).
SquareClass class_of(const BigRational& q, std::span<const i64> support) {
  BigInt num = numerator(q);
  BigInt den = denominator(q);
  if (num == 0) throw std::invalid_argument("square class of zero");
  SquareClass acc = SquareClass::of(num < 0 ? -1 : 1);
  if (num < 0) num = -num;
  for (i64 p : support) {
    int e = 0;
    while (num % p == 0) {
      num /= p;
      ++e;
    }
    while (den % p == 0) {
      den /= p;
      ++e;
    }
    if (e % 2) acc *= SquareClass::of(p);
  }
  if (!exact_sqrt(num) || !exact_sqrt(den)) throw std::logic_error("square class outside the expected support");
  return acc;
}

std::vector<i64> support_of(i64 m) { return factor(m).primes(); }

std::vector<i64> primes_with_two(std::span<const i64> primes_of_n) {
  std::vector<i64> out(primes_of_n.begin(), primes_of_n.end());
  if (std::find(out.begin(), out.end(), 2) == out.end()) out.insert(out.begin(), 2);
  return out;
}

}  // namespace

std::string_view name(Isogeny id) { return kNames[static_cast<int>(id)]; }

std::optional<Isogeny> parse_isogeny(std::string_view text) {
  for (int i = 0; i < kIsogenyCount; ++i)
    if (kNames[i] == text) return static_cast<Isogeny>(i);
  return std::nullopt;
}

bool on_curve(const Curve& e, const Point& p) { return p.infinity || p.y * p.y == rhs(e, p.x); }

Point negate(const Point& p) { return p.infinity ? p : Point::affine(p.x, -p.y); }

Point add(const Curve& e, const Point& p, const Point& q) {
  if (p.infinity) return q;
  if (q.infinity) return p;
  BigRational lambda;
  if (p.x == q.x) {
    if (p.y != q.y || p.y == 0) return Point::at_infinity();
    lambda = (3 * p.x * p.x + 2 * e.a2 * p.x + e.a4) / (2 * p.y);
  } else {
    lambda = (q.y - p.y) / (q.x - p.x);
  }
  BigRational x = lambda * lambda - e.a2 - p.x - q.x;
  BigRational y = lambda * (p.x - x) - p.y;
  return Point::affine(std::move(x), std::move(y));
}

Curve translate(const Curve& e, i64 shift) {
  const i128 s = shift;
  const i128 a2 = e.a2 + 3 * s;
  const i128 a4 = 3 * s * s + 2 * static_cast<i128>(e.a2) * s + e.a4;
  // The constant term s^3 + a2 s^2 + a4 s must vanish: shifts are roots.
  if (s * s * s + e.a2 * s * s + e.a4 * s != 0) throw std::invalid_argument("translate: shift is not a root");
  return {static_cast<i64>(a2), static_cast<i64>(a4)};
}

Point translate(const Point& p, i64 shift) { return p.infinity ? p : Point::affine(p.x - shift, p.y); }

Curve IsogenyDescriptor::source(i64 n) const { return scale(source_per_n, n); }
Curve IsogenyDescriptor::target(i64 n) const { return scale(target_per_n, n); }
Curve IsogenyDescriptor::family_curve(i64 n) const { return translate(target(n), family_shift_per_n * n); }
FamilySpec IsogenyDescriptor::family(i64 n) const {
  const Curve c = family_curve(n);
  return {c.a2, c.a4};
}

const IsogenyDescriptor& descriptor(Isogeny id) { return kTable[static_cast<int>(id)]; }
std::span<const IsogenyDescriptor> descriptors() { return kTable; }

Point apply_isogeny(const Point& p, Isogeny id, i64 n) {
  const IsogenyDescriptor& d = descriptor(id);
  const Curve src = d.source(n);
  if (!on_curve(src, p)) throw std::invalid_argument("apply_isogeny: point not on the source curve");
  if (p.infinity) return p;
  const i64 k = d.kernel_x_per_n * n;
  const Curve shifted = translate(src, k);
  const BigRational x = p.x - k;
  if (x == 0) return Point::at_infinity();
  // (x, y) -> (y^2/x^2, y (b - x^2)/x^2) onto y^2 = x^3 - 2a x^2 + (a^2 - 4b) x.
  BigRational u = p.y * p.y / (x * x);
  BigRational v = p.y * (shifted.a4 - x * x) / (x * x);
  if (d.hat) {
    // The image curve is the target scaled by 2 and translated.
    u = u / 4 + d.family_shift_per_n * n;
    v = v / 8;
  }
  Point out = Point::affine(std::move(u), std::move(v));
  if (!on_curve(d.target(n), out)) throw std::logic_error("apply_isogeny: image off the target curve");
  return out;
}

SquareClass x_class(const Curve& family_curve, const Point& p) {
  if (p.infinity) return SquareClass{};
  if (p.x == 0) return SquareClass::of(family_curve.a4);
  return class_of(p.x, support_of(family_curve.a4));
}

std::vector<Point> torsion_points(const Curve& e) {
  std::vector<Point> two{Point::at_infinity(), Point::affine(0, 0)};
  const BigInt disc = BigInt(e.a2) * e.a2 - 4 * BigInt(e.a4);
  if (auto r = exact_sqrt(disc); r && *r != 0) {
    two.push_back(Point::affine(BigRational(-e.a2 + *r) / 2, 0));
    two.push_back(Point::affine(BigRational(-e.a2 - *r) / 2, 0));
  }
  std::vector<Point> out = two;
  for (std::size_t i = 1; i < two.size(); ++i) {
    // Halves of (t, 0): after moving t to 0 they have x^2 = a4'.
    const BigRational t = two[i].x;
    if (denominator(t) != 1) continue;
    const i64 ti = numerator(t).convert_to<i64>();
    const Curve c = translate(e, ti);
    const auto s = exact_sqrt(BigInt(c.a4));
    if (!s || *s == 0) continue;
    for (const BigInt& x : {*s, BigInt(-*s)}) {
      const BigInt y2 = x * x * x + c.a2 * x * x + c.a4 * x;
      if (auto y = exact_sqrt(y2)) {
        out.push_back(Point::affine(BigRational(x + ti), BigRational(*y)));
        out.push_back(Point::affine(BigRational(x + ti), BigRational(-*y)));
      }
    }
  }
  return out;
}

std::vector<SquareClass> torsion_images(i64 n, Isogeny id) {
  const Curve fam = descriptor(id).family_curve(n);
  std::vector<SquareClass> out;
  for (const Point& p : torsion_points(fam)) out.push_back(x_class(fam, p));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int dimension(std::size_t order) {
  if (order == 0 || (order & (order - 1)) != 0) throw std::logic_error("group order is not a power of two");
  return std::countr_zero(order);
}

std::vector<SquareClass> generated_subgroup(std::span<const SquareClass> generators) {
  std::vector<SquareClass> group{SquareClass{}};
  for (const SquareClass& g : generators) {
    if (std::find(group.begin(), group.end(), g) != group.end()) continue;
    const std::size_t size = group.size();
    for (std::size_t i = 0; i < size; ++i) group.push_back(group[i] * g);
  }
  std::sort(group.begin(), group.end());
  return group;
}

int SelmerSet::dim() const { return dimension(classes.size()); }
bool SelmerSet::contains(SquareClass d) const { return std::binary_search(classes.begin(), classes.end(), d); }

SelmerSet selmer_isogeny(i64 n, std::span<const i64> primes_of_n, Isogeny id) {
  const FamilySpec spec = descriptor(id).family(n);
  const std::vector<i64> places = primes_with_two(primes_of_n);
  SelmerSet out{n, id, {}};
  for (const IntegralQuartic& f : family_forms(spec, places)) {
    if (!real_soluble_quartic(f)) continue;
    bool ok = true;
    // Odd primes first: they are cheaper and reject most classes.
    for (auto it = places.rbegin(); it != places.rend() && ok; ++it) ok = qp_soluble_quartic(f, *it);
    if (ok) out.classes.push_back(SquareClass::of(f.a));
  }
  std::sort(out.classes.begin(), out.classes.end());
  return out;
}

SelmerSet selmer_isogeny(i64 n, Isogeny id) {
  if (n < 1 || !is_squarefree(n)) throw std::invalid_argument("n must be a squarefree positive integer");
  return selmer_isogeny(n, factor(n).primes(), id);
}

Sel2Pair pair_of_point(const Point& p, i64 n) {
  if (p.infinity) return {};
  const BigRational& x = p.x;
  const auto support = primes_with_two(support_of(n));
  auto cls = [&](const BigRational& v) { return class_of(v, support); };
  const BigRational xm = x - n;
  const BigRational xp = x + n;
  const SquareClass d1 = x == 0 ? cls(xm * xp) : cls(x);
  const SquareClass d2 = xm == 0 ? cls(x * xp) : cls(xm);
  return {d1, d2};
}

std::vector<Sel2Pair> torsion_pairs(i64 n) {
  std::vector<Sel2Pair> out;
  for (const BigRational& x : {BigRational(0), BigRational(n), BigRational(-n)})
    out.push_back(pair_of_point(Point::affine(x, 0), n));
  out.push_back({});
  std::sort(out.begin(), out.end());
  return out;
}

int Sel2Set::dim() const { return dimension(pairs.size()); }
bool Sel2Set::contains(const Sel2Pair& e) const { return std::binary_search(pairs.begin(), pairs.end(), e); }

Sel2Set sel2_pairs(i64 n, std::span<const i64> primes_of_n, const SelmerSet& hat1, const SelmerSet& hat2,
                   const SelmerSet& hat3) {
  (void)primes_of_n;
  Sel2Set out{n, {}};
  for (const SquareClass& d1 : hat1.classes)
    for (const SquareClass& d2 : hat2.classes) {
      if (!hat3.contains(d1 * d2)) continue;
      const PairTorsor t{d1, d2, n};
      if (pair_torsor_locally_soluble(t)) out.pairs.push_back({d1, d2});
    }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

Sel2Set sel2_pairs(i64 n) {
  if (n < 1 || !is_squarefree(n)) throw std::invalid_argument("n must be a squarefree positive integer");
  const auto primes = factor(n).primes();
  return sel2_pairs(n, primes, selmer_isogeny(n, primes, Isogeny::kPhiHat1),
                    selmer_isogeny(n, primes, Isogeny::kPhiHat2), selmer_isogeny(n, primes, Isogeny::kPhiHat3));
}

Sel2Set sel2_pairs_full(i64 n) {
  const auto support = squarefree_divisor_classes(n, true);
  Sel2Set out{n, {}};
  for (const SquareClass& d1 : support)
    for (const SquareClass& d2 : support)
      if (pair_torsor_locally_soluble({d1, d2, n})) out.pairs.push_back({d1, d2});
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

std::vector<CoveringQuadruple> all_quadruples(i64 n) {
  if (n < 1 || !is_squarefree(n)) throw std::invalid_argument("n must be a squarefree positive integer");
  const auto primes = factor(n).primes();
  std::vector<CoveringQuadruple> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < primes.size(); ++i) total *= 4;
  for (std::size_t code = 0; code < total; ++code) {
    std::array<i64, 4> d{1, 1, 1, 1};
    std::size_t c = code;
    for (i64 p : primes) {
      d[c % 4] *= p;
      c /= 4;
    }
    out.push_back({d[0], d[1], d[2], d[3]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CoveringQuadruple> sel2_quadruples(i64 n) {
  std::vector<CoveringQuadruple> out;
  const auto primes = factor(n).primes();
  for (const CoveringQuadruple& q : all_quadruples(n)) {
    bool ok = true;
    for (i64 p : primes)
      if (p != 2 && !quadruple_qp_soluble_symbols(q, p)) ok = false;
    if (ok && quadruple_q2_soluble(q)) out.push_back(q);
  }
  return out;
}

SquareClass pi_projection(const Sel2Pair& e, int index) {
  switch (index) {
    case 1:
      return e.delta1;
    case 2:
      return e.delta2;
    case 3:
      return e.delta1 * e.delta2;
    default:
      throw std::invalid_argument("pi_projection: index must be 1, 2 or 3");
  }
}

std::vector<SquareClass> strict_classes(const Sel2Set& sel2, int index) {
  std::vector<SquareClass> out;
  for (const Sel2Pair& e : sel2.pairs) out.push_back(pi_projection(e, index));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SquareClass> strict_classes(i64 n, int index) { return strict_classes(sel2_pairs(n), index); }

DescentData compute_descent(i64 n) {
  if (n < 1 || !is_squarefree(n)) throw std::invalid_argument("n must be a squarefree positive integer");
  DescentData out;
  out.n = n;
  out.primes = factor(n).primes();
  for (int i = 0; i < kIsogenyCount; ++i) out.selmer[i] = selmer_isogeny(n, out.primes, static_cast<Isogeny>(i));
  out.sel2 = sel2_pairs(n, out.primes, out.of(Isogeny::kPhiHat1), out.of(Isogeny::kPhiHat2),
                        out.of(Isogeny::kPhiHat3));
  for (int i = 1; i <= 3; ++i) out.strict[i - 1] = strict_classes(out.sel2, i);
  return out;
}

}  // namespace qsel
