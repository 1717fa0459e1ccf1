#include "qsel/solubility.hpp"

#include "cover.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsel {

namespace {

// Squares modulo 64 and modulo 63 * 65 * 11 reject all but ~1% of
// non-square values before any 128-bit arithmetic.
constexpr u64 kOddModulus = 63 * 65 * 11;

struct ResidueFilter {
  std::array<bool, 64> square64{};
  std::vector<char> square_odd;

  ResidueFilter() : square_odd(kOddModulus, 0) {
    for (u64 t = 0; t < 64; ++t) square64[t * t % 64] = true;
    for (u64 t = 0; t < kOddModulus; ++t) square_odd[t * t % kOddModulus] = 1;
  }
};

const ResidueFilter& filter() {
  static const ResidueFilter f;
  return f;
}

std::optional<u128> exact_isqrt(i128 v) {
  if (v < 0) return std::nullopt;
  const u128 u = static_cast<u128>(v);
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(u)));
  while (r > 0 && r * r > u) --r;
  while ((r + 1) * (r + 1) <= u) ++r;
  if (r * r != u) return std::nullopt;
  return r;
}

BigInt big(u128 v) {
  BigInt r = static_cast<u64>(v >> 64);
  r <<= 64;
  r += static_cast<u64>(v);
  return r;
}

struct Prepared {
  const IntegralQuartic* form;
  u64 a64, b64, c64;
  u64 a_odd, b_odd, c_odd;
};

Prepared prepare(const IntegralQuartic& f) {
  return {&f,
          static_cast<u64>(f.a),
          static_cast<u64>(f.b),
          static_cast<u64>(f.c),
          reduce_mod(f.a, kOddModulus),
          reduce_mod(f.b, kOddModulus),
          reduce_mod(f.c, kOddModulus)};
}

std::optional<BigInt> exact_sqrt(const BigInt& v) {
  if (v < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(v);
  if (r * r != v) return std::nullopt;
  return r;
}

BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

// Known soluble classes of one family, closed under multiplication, each
// with a rational point on the family curve.
struct Side {
  Isogeny id;
  Curve curve;
  const SelmerSet* selmer = nullptr;
  std::vector<SquareClass> allowed;  // classes a soluble one could be
  std::vector<std::pair<SquareClass, Point>> known;
  std::vector<SquareClass> torsion;

  bool has(SquareClass d) const {
    return std::any_of(known.begin(), known.end(), [&](const auto& k) { return k.first == d; });
  }
  int dim() const { return dimension(known.size()); }

  void add(SquareClass d, const Point& p) {
    if (has(d)) return;
    if (!std::binary_search(allowed.begin(), allowed.end(), d))
      throw std::logic_error("soluble class outside the Selmer bound for " + std::string(name(id)));
    const std::size_t size = known.size();
    for (std::size_t i = 0; i < size; ++i)
      known.emplace_back(known[i].first * d, qsel::add(curve, known[i].second, p));
  }
};

}  // namespace

bool Witness::verifies(const BinaryQuartic& f) const {
  if (x == 0 && y == 0) return false;
  const BigRational a(BigInt(f.a.numerator()), BigInt(f.a.denominator()));
  const BigRational c(BigInt(f.c.numerator()), BigInt(f.c.denominator()));
  const BigInt x2 = x * x;
  const BigInt y2 = y * y;
  return BigRational(z * z) == a * BigRational(x2 * x2) + BigRational(f.B * x2 * y2) + c * BigRational(y2 * y2);
}

std::string Witness::str() const { return "(" + x.str() + "," + y.str() + "," + z.str() + ")"; }

std::optional<SearchHit> point_search_any(std::span<const IntegralQuartic> forms, i64 H) {
  if (H < 1) throw std::invalid_argument("point_search: height must be positive");
  if (forms.empty()) return std::nullopt;
  const ResidueFilter& rf = filter();
  std::vector<Prepared> prep;
  prep.reserve(forms.size());
  for (const auto& f : forms) prep.push_back(prepare(f));

  auto test = [&](i64 x, i64 y) -> std::optional<SearchHit> {
    const u64 x2 = static_cast<u64>(x) * static_cast<u64>(x);
    const u64 y2 = static_cast<u64>(y) * static_cast<u64>(y);
    const u64 x4 = x2 * x2, y4 = y2 * y2, xy = x2 * y2;
    const u64 xo = x2 % kOddModulus, yo = y2 % kOddModulus;
    const u64 x4o = xo * xo % kOddModulus, y4o = yo * yo % kOddModulus, xyo = xo * yo % kOddModulus;
    for (std::size_t i = 0; i < prep.size(); ++i) {
      const Prepared& p = prep[i];
      if (!rf.square64[(p.a64 * x4 + p.b64 * xy + p.c64 * y4) & 63]) continue;
      if (!rf.square_odd[(p.a_odd * x4o + p.b_odd * xyo % kOddModulus + p.c_odd * y4o) % kOddModulus]) continue;
      const i128 v = (*p.form)(x, y);
      if (auto r = exact_isqrt(v)) return SearchHit{i, {BigInt(x), BigInt(y), big(*r)}};
    }
    return std::nullopt;
  };

  for (i64 m = 1; m <= H; ++m) {
    for (i64 x = 0; x < m; ++x)
      if (auto hit = test(x, m)) return hit;
    for (i64 y = 0; y <= m; ++y)
      if (auto hit = test(m, y)) return hit;
  }
  return std::nullopt;
}

std::optional<Witness> point_search(const IntegralQuartic& f, i64 H) {
  auto hit = point_search_any(std::span(&f, 1), H);
  if (!hit) return std::nullopt;
  return hit->witness;
}

std::string_view name(Status s) {
  switch (s) {
    case Status::kSoluble:
      return "soluble";
    case Status::kInsoluble:
      return "insoluble";
    case Status::kUnknown:
      return "unknown";
  }
  return "?";
}

std::string_view name(Reason r) {
  switch (r) {
    case Reason::kNone:
      return "";
    case Reason::kNotLocallySoluble:
      return "not-locally-soluble";
    case Reason::kRankZeroNonTorsion:
      return "rank-zero-non-torsion";
    case Reason::kNotStrictlyLocallySoluble:
      return "not-strictly-locally-soluble";
    case Reason::kMordellWeilBound:
      return "mordell-weil-bound";
  }
  return "?";
}

std::string Classification::render() const {
  std::string out = form.render() + " " + std::string(name(status));
  if (status == Status::kInsoluble) out += "(" + std::string(name(reason)) + ")";
  if (witness) out += " " + witness->str();
  if (torsion) out += " torsion";
  return out;
}

Witness witness_from_point(const Curve& family_curve, const Point& p) {
  if (p.infinity) return {1, 0, 1};
  const SquareClass d = x_class(family_curve, p);
  const i64 rep = d.rep();
  if (p.x == 0) {
    auto s = exact_sqrt(BigInt(family_curve.a4 / rep));
    if (!s || family_curve.a4 % rep != 0) throw std::logic_error("witness_from_point: M/d is not a square");
    return {0, 1, *s};
  }
  const BigRational q = p.x / rep;
  const auto xs = exact_sqrt(numerator(q));
  const auto ys = exact_sqrt(denominator(q));
  if (!xs || !ys) throw std::logic_error("witness_from_point: x/d is not a square");
  const BigRational z = p.y * BigRational(*ys * *ys * *ys) / (BigRational(rep) * BigRational(*xs));
  if (denominator(z) != 1) throw std::logic_error("witness_from_point: non-integral z");
  return {*xs, *ys, abs_big(numerator(z))};
}

Point point_from_witness(const IntegralQuartic& f, const Witness& w) {
  if (w.y == 0) return Point::at_infinity();
  const BigRational X(w.x), Y(w.y);
  const BigRational x = BigRational(f.a) * X * X / (Y * Y);
  const BigRational y = BigRational(f.a) * X * BigRational(w.z) / (Y * Y * Y);
  return Point::affine(x, y);
}

const FamilyResult& Analysis::of(Isogeny id) const {
  const auto& r = families[static_cast<int>(id)];
  if (!r) throw std::invalid_argument("family " + std::string(name(id)) + " was not analysed");
  return *r;
}

namespace {

// Points of y^2 = x^3 - n^2 x found so far, closed under addition, one per
// element of their image in the 2-Selmer group.
struct PointGroup {
  i64 n = 1;
  Curve curve;
  std::vector<std::pair<Sel2Pair, Point>> elems;

  explicit PointGroup(i64 n_) : n(n_), curve{0, -n_ * n_} {
    elems.emplace_back(Sel2Pair{}, Point::at_infinity());
    for (i64 x : {i64{0}, n_, -n_}) add(Point::affine(x, 0));
  }

  int dim() const { return dimension(elems.size()); }
  bool has(const Sel2Pair& e) const {
    return std::any_of(elems.begin(), elems.end(), [&](const auto& k) { return k.first == e; });
  }

  bool add(const Point& p) {
    const Sel2Pair e = pair_of_point(p, n);
    if (has(e)) return false;
    const std::size_t size = elems.size();
    for (std::size_t i = 0; i < size; ++i)
      elems.emplace_back(Sel2Pair{elems[i].first.delta1 * e.delta1, elems[i].first.delta2 * e.delta2},
                         qsel::add(curve, elems[i].second, p));
    return true;
  }
};

std::optional<BigRational> rational_sqrt(const BigRational& v) {
  const auto a = exact_sqrt(numerator(v));
  const auto b = exact_sqrt(denominator(v));
  if (!a || !b) return std::nullopt;
  return BigRational(*a) / BigRational(*b);
}

// A point Q of the source of the dual map with hat(Q) = p; p must be a
// non-torsion point in the image.
Point lift_through_dual(const Point& p, Isogeny hat, i64 n) {
  const IsogenyDescriptor& d = descriptor(hat);
  const Curve src = d.source(n);
  const BigRational X = p.x - d.family_shift_per_n * n;
  const BigRational b = BigRational(src.a2) - 4 * X;
  const auto r = rational_sqrt(b * b - 4 * BigRational(src.a4));
  const auto s = rational_sqrt(X);
  if (!r || !s) throw std::logic_error("lift_through_dual: point is not in the image");
  for (int root : {1, -1})
    for (int sign : {1, -1}) {
      const BigRational x = (-b + root * *r) / 2;
      if (x == 0) continue;
      const Point q = Point::affine(x, 2 * sign * x * *s);
      if (apply_isogeny(q, hat, n) == p) return q;
    }
  throw std::logic_error("lift_through_dual: no preimage found");
}

}  // namespace

i64 cover_height(i64 H) {
  if (H < 1) throw std::invalid_argument("cover_height: height must be positive");
  return std::max<i64>(8, H / 8);
}

Analysis analyze(i64 n, i64 H, FamilyMask mask) {
  Analysis out;
  out.descent = compute_descent(n);
  out.height = H;
  const DescentData& dd = out.descent;
  const int rank_upper = dd.sel2.dim() - 2;
  out.rank = {n, 0, rank_upper, rank_upper == 0};

  PointGroup group(n);
  auto add_point = [&](const Point& p) {
    if (!group.add(p)) throw std::logic_error("search hit adds nothing at n=" + std::to_string(n));
    if (!dd.sel2.contains(group.elems.back().first))
      throw std::logic_error("point outside the 2-Selmer group at n=" + std::to_string(n));
    out.points.push_back(p);
  };

  // Whole 2-coverings first: each hit is a new point of y^2 = x^3 - n^2 x.
  std::vector<detail::CoverQuartic> covers;
  std::vector<detail::CoverQuartic> all_covers;
  for (const Sel2Pair& e : dd.sel2.pairs) {
    if (group.has(e)) continue;
    auto c = detail::cover_quartic(e, n);
    if (!c) throw std::logic_error("2-Selmer conic without a rational point at n=" + std::to_string(n));
    all_covers.push_back(std::move(*c));
  }
  const i64 cover_h = cover_height(H);
  while (group.dim() < dd.sel2.dim()) {
    covers.clear();
    for (const auto& c : all_covers)
      if (!group.has(c.pair)) covers.push_back(c);
    const auto hit = detail::cover_search(covers, cover_h);
    if (!hit) break;
    add_point(hit->point);
  }

  std::vector<int> indices{1};
  for (int index = 2; index <= 3; ++index)
    if (mask & (bit(static_cast<Isogeny>(2 * (index - 1))) | bit(static_cast<Isogeny>(2 * index - 1))))
      indices.push_back(index);

  struct Pair {
    int index;
    std::array<Side, 2> sides;  // forward, dual
  };
  std::vector<Pair> pairs;
  auto rebuild = [&] {
    pairs.clear();
    for (int index : indices) {
      Pair& pr = pairs.emplace_back();
      pr.index = index;
      for (int s = 0; s < 2; ++s) {
        Side& side = pr.sides[s];
        side.id = static_cast<Isogeny>(2 * (index - 1) + s);
        side.curve = descriptor(side.id).family_curve(n);
        side.selmer = &dd.of(side.id);
        side.allowed = s == 1 ? dd.strict[index - 1] : side.selmer->classes;
        side.known.emplace_back(SquareClass{}, Point::at_infinity());
        for (const Point& t : torsion_points(side.curve)) {
          const SquareClass c = x_class(side.curve, t);
          side.add(c, t);
          side.torsion.push_back(c);
        }
      }
      const Isogeny hat = pr.sides[1].id;
      const i64 shift = descriptor(hat).family_shift_per_n * n;
      for (const auto& [e, p] : group.elems) {
        if (p.infinity || p.y == 0) continue;
        const Point q = translate(p, shift);
        const SquareClass c = x_class(pr.sides[1].curve, q);
        pr.sides[1].add(c, q);
        if (c == SquareClass{}) {
          const Point lift = lift_through_dual(p, hat, n);
          pr.sides[0].add(x_class(pr.sides[0].curve, lift), lift);
        }
      }
    }
  };

  auto bound = [&](const Side& side, const Side& other) {
    const int allowed = dimension(side.allowed.size());
    return std::min(allowed, rank_upper + 2 - other.dim());
  };

  // Then the quartics of the isogeny families for whatever is still open.
  for (;;) {
    rebuild();
    std::vector<IntegralQuartic> forms;
    std::vector<std::pair<const Pair*, int>> owners;
    for (const Pair& pr : pairs)
      for (int s : {1, 0}) {
        const Side& side = pr.sides[s];
        const Side& other = pr.sides[1 - s];
        const int b = bound(side, other);
        if (side.dim() > b) throw std::logic_error("soluble classes exceed the rank bound at n=" + std::to_string(n));
        if (side.dim() == b) continue;
        for (const SquareClass& d : side.allowed) {
          if (side.has(d)) continue;
          forms.push_back({d.rep(), side.curve.a2, side.curve.a4 / d.rep()});
          owners.emplace_back(&pr, s);
        }
      }
    if (forms.empty()) break;
    const auto hit = point_search_any(forms, H);
    if (!hit) break;
    const auto [pr, s] = owners[hit->form];
    const Point q = point_from_witness(forms[hit->form], hit->witness);
    const Isogeny hat = pr->sides[1].id;
    if (s == 1)
      add_point(translate(q, -descriptor(hat).family_shift_per_n * n));
    else
      add_point(apply_isogeny(q, hat, n));
  }

  out.rank.rank_lower = group.dim() - 2;
  for (const Pair& pr : pairs)
    out.rank.rank_lower = std::max(out.rank.rank_lower, pr.sides[0].dim() + pr.sides[1].dim() - 2);
  if (out.rank.rank_lower > rank_upper) throw std::logic_error("rank bounds crossed at n=" + std::to_string(n));

  std::vector<i64> places = dd.primes;
  if (places.empty() || places.front() != 2) places.insert(places.begin(), 2);
  for (const Pair& pr : pairs) {
    for (int s = 0; s < 2; ++s) {
      const Side& side = pr.sides[s];
      const bool full = side.dim() == bound(side, pr.sides[1 - s]);
      FamilyResult res;
      res.id = side.id;
      res.spec = descriptor(side.id).family(n);
      int unknown = 0;
      for (const IntegralQuartic& f : family_forms(res.spec, places)) {
        Classification c;
        c.form = BinaryQuartic::from(f);
        const SquareClass d = SquareClass::of(f.a);
        const auto known =
            std::find_if(side.known.begin(), side.known.end(), [&](const auto& k) { return k.first == d; });
        if (!side.selmer->contains(d)) {
          c.status = Status::kInsoluble;
          c.reason = Reason::kNotLocallySoluble;
        } else if (out.rank.certified_zero && known == side.known.end() &&
                   std::find(side.torsion.begin(), side.torsion.end(), d) == side.torsion.end()) {
          // Rank zero: only the torsion classes are soluble.
          c.status = Status::kInsoluble;
          c.reason = Reason::kRankZeroNonTorsion;
        } else if (!std::binary_search(side.allowed.begin(), side.allowed.end(), d)) {
          c.status = Status::kInsoluble;
          c.reason = Reason::kNotStrictlyLocallySoluble;
        } else if (known != side.known.end()) {
          c.status = Status::kSoluble;
          c.witness = witness_from_point(side.curve, known->second);
          c.torsion = std::find(side.torsion.begin(), side.torsion.end(), d) != side.torsion.end();
        } else if (full) {
          c.status = Status::kInsoluble;
          c.reason = Reason::kMordellWeilBound;
        } else {
          ++unknown;
        }
        res.forms.push_back(std::move(c));
      }
      res.counts.ls = static_cast<int>(side.selmer->classes.size());
      if (s == 1) res.counts.sls = static_cast<int>(side.allowed.size());
      res.counts.sol_lo = static_cast<int>(side.known.size());
      res.counts.sol_hi = res.counts.sol_lo + unknown;
      out.families[static_cast<int>(side.id)] = std::move(res);
    }
  }
  return out;
}

RankInfo rank_info(i64 n, i64 H) { return analyze(n, H).rank; }

Classification classify_form(const BinaryQuartic& f, i64 n, Isogeny id, i64 H) {
  const FamilySpec spec = descriptor(id).family(n);
  if (f.B != spec.B || f.M() != Rational(spec.M))
    throw std::invalid_argument("form " + f.render() + " is not in the " + std::string(name(id)) + " family at n=" +
                                std::to_string(n));
  const CanonicalForm canon = canonical_rep(f.a, spec);
  if (!canon.integral) {
    Classification c;
    c.form = canon.form;
    c.status = Status::kInsoluble;
    c.reason = Reason::kNotLocallySoluble;
    return c;
  }
  const Analysis a = analyze(n, H, bit(id));
  for (const Classification& c : a.of(id).forms)
    if (c.form == canon.form) return c;
  throw std::logic_error("classify_form: canonical form missing from its family");
}

FamilyCounts count_family(i64 n, Isogeny id, i64 H) { return analyze(n, H, bit(id)).of(id).counts; }

}  // namespace qsel
