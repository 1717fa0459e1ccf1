#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "qsel/descent.hpp"
#include "qsel/quartic.hpp"

using namespace qsel;

namespace {

std::vector<i64> reps(const std::vector<SquareClass>& v) {
  std::vector<i64> out;
  for (const auto& c : v) out.push_back(c.rep());
  std::sort(out.begin(), out.end());
  return out;
}

Sel2Pair pair(i64 a, i64 b) { return {SquareClass::of(a), SquareClass::of(b)}; }

bool closed(const std::vector<SquareClass>& g) {
  for (const auto& a : g)
    for (const auto& b : g)
      if (!std::binary_search(g.begin(), g.end(), a * b)) return false;
  return std::binary_search(g.begin(), g.end(), SquareClass::of(1));
}

}  // namespace

TEST(Descriptors, FamiliesMatchTable) {
  const i64 n = 7;
  std::set<std::pair<i64, i64>> got;
  for (const auto& d : descriptors()) got.insert({d.family(n).B, d.family(n).M});
  const std::set<std::pair<i64, i64>> want{{0, 4 * n * n}, {-6 * n, n * n}, {6 * n, n * n},
                                           {0, -n * n}, {3 * n, 2 * n * n}, {-3 * n, 2 * n * n}};
  EXPECT_EQ(got, want);
  for (auto id : {Isogeny::kPhi1, Isogeny::kPhiHat3}) EXPECT_EQ(parse_isogeny(name(id)), id);
  EXPECT_FALSE(parse_isogeny("phi4").has_value());
}

TEST(TorsionImages, Examples) {
  EXPECT_EQ(reps(torsion_images(5, Isogeny::kPhiHat1)), (std::vector<i64>{-5, -1, 1, 5}));
  EXPECT_EQ(reps(torsion_images(2, Isogeny::kPhiHat1)), (std::vector<i64>{-2, -1, 1, 2}));
  auto tp = torsion_pairs(1);
  std::sort(tp.begin(), tp.end());
  std::vector<Sel2Pair> want{pair(1, 1), pair(-1, -1), pair(1, 2), pair(-1, -2)};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(tp, want);
}

TEST(ApplyIsogeny, Examples) {
  const Point k = apply_isogeny(Point::affine(5, 0), Isogeny::kPhi1, 5);
  EXPECT_EQ(k, Point::affine(0, 0));
  const Point q = apply_isogeny(Point::affine(-4, 6), Isogeny::kPhi1, 5);
  EXPECT_EQ(q, Point::affine(BigRational(9, 4), BigRational(-123, 8)));
  EXPECT_TRUE(on_curve(descriptor(Isogeny::kPhi1).target(5), q));
  EXPECT_TRUE(apply_isogeny(Point::affine(0, 0), Isogeny::kPhi1, 5).infinity);
  // The kernel of phi2 is the 2-torsion point it is built from.
  const auto& d2 = descriptor(Isogeny::kPhi2);
  const Point ker = Point::affine(d2.kernel_x_per_n, 0);
  EXPECT_TRUE(apply_isogeny(ker, Isogeny::kPhi2, 1).infinity);
}

TEST(ApplyIsogeny, HomomorphismOnMultiples) {
  const i64 n = 5;
  const Curve e{0, -n * n};
  const Point p = Point::affine(-4, 6);
  Point acc = p;
  for (int k = 2; k <= 4; ++k) {
    const Point next = add(e, acc, p);
    for (const auto& d : descriptors()) {
      if (d.hat) continue;
      const Curve t = d.target(n);
      const Point lhs = apply_isogeny(next, d.id, n);
      const Point rhs = add(t, apply_isogeny(acc, d.id, n), apply_isogeny(p, d.id, n));
      EXPECT_EQ(lhs, rhs) << name(d.id) << " k=" << k;
      EXPECT_TRUE(on_curve(t, lhs));
    }
    acc = next;
  }
}

TEST(ApplyIsogeny, DualComposesToDoubling) {
  const i64 n = 5;
  const Curve e{0, -n * n};
  const Point p = Point::affine(-4, 6);
  const Point twice = add(e, p, p);
  for (const auto& d : descriptors()) {
    if (d.hat) continue;
    const Isogeny hat = static_cast<Isogeny>(static_cast<int>(d.id) + 1);
    const Point image = apply_isogeny(apply_isogeny(p, d.id, n), hat, n);
    EXPECT_TRUE(on_curve(e, image));
    EXPECT_EQ(image.x, twice.x) << name(d.id);
  }
}

TEST(Selmer, Examples) {
  EXPECT_EQ(reps(selmer_isogeny(1, Isogeny::kPhi1).classes), (std::vector<i64>{1, 2}));
  EXPECT_EQ(reps(selmer_isogeny(1, Isogeny::kPhiHat1).classes), (std::vector<i64>{-1, 1}));
  const SelmerSet s5 = selmer_isogeny(5, Isogeny::kPhiHat1);
  for (i64 d : {1, -1, 5, -5}) EXPECT_TRUE(s5.contains(SquareClass::of(d)));
}

TEST(Selmer, MatchesBruteForce) {
  for (i64 n : enumerate_squarefree(120)) {
    for (const auto& d : descriptors()) {
      const FamilySpec f = d.family(n);
      const auto got = reps(selmer_isogeny(n, d.id).classes);
      EXPECT_EQ(got, oracle::selmer_brute(f.B, f.M, n)) << name(d.id) << " n=" << n;
    }
  }
}

TEST(Selmer, StructuralProperties) {
  for (i64 n : enumerate_squarefree(500)) {
    for (const auto& d : descriptors()) {
      const SelmerSet s = selmer_isogeny(n, d.id);
      if (n <= 300) EXPECT_TRUE(closed(s.classes)) << name(d.id) << " n=" << n;
      EXPECT_EQ(s.classes.size(), std::size_t{1} << s.dim());
      for (const auto& c : s.classes) EXPECT_TRUE(canonical_rep(Rational(c.rep()), d.family(n)).integral);
      for (const auto& t : torsion_images(n, d.id)) EXPECT_TRUE(s.contains(t)) << name(d.id) << " n=" << n;
      if (d.id == Isogeny::kPhi1)
        for (const auto& c : s.classes) EXPECT_GT(c.rep(), 0);
    }
  }
}

TEST(Sel2, Examples) {
  EXPECT_EQ(sel2_pairs(1).pairs.size(), 4u);
  const Sel2Set s5 = sel2_pairs(5);
  EXPECT_EQ(s5.pairs.size(), 8u);
  EXPECT_TRUE(s5.contains(pair(-1, -1)));
  EXPECT_EQ(pair_of_point(Point::affine(-4, 6), 5), pair(-1, -1));
  EXPECT_EQ(sel2_pairs(2).pairs.size(), 4u);
}

TEST(Sel2, MatchesBruteForceAndFullEnumeration) {
  for (i64 n : enumerate_squarefree(150)) {
    const Sel2Set fast = sel2_pairs(n);
    EXPECT_EQ(fast.pairs, sel2_pairs_full(n).pairs) << n;
    if (210 % n != 0) continue;  // the quadric oracle is only fast for p <= 7
    std::vector<std::pair<i64, i64>> got;
    for (const auto& e : fast.pairs) got.emplace_back(e.delta1.rep(), e.delta2.rep());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle::sel2_brute(n)) << n;
  }
}

TEST(Sel2, StructuralProperties) {
  for (i64 n : enumerate_squarefree(300)) {
    const DescentData d = compute_descent(n);
    const auto& pairs = d.sel2.pairs;
    for (const auto& a : pairs)
      for (const auto& b : pairs)
        EXPECT_TRUE(d.sel2.contains({a.delta1 * b.delta1, a.delta2 * b.delta2})) << n;
    for (const auto& t : torsion_pairs(n)) EXPECT_TRUE(d.sel2.contains(t)) << n;
    EXPECT_GE(pairs.size(), 4u);
    EXPECT_EQ(pairs.size(), std::size_t{1} << d.sel2.dim());
    for (const auto& e : pairs) EXPECT_TRUE(d.of(Isogeny::kPhiHat1).contains(pi_projection(e, 1))) << n;
    EXPECT_LE(d.sel2.dim(), d.of(Isogeny::kPhi1).dim() + d.of(Isogeny::kPhiHat1).dim()) << n;
  }
}

TEST(PiProjection, Examples) {
  EXPECT_EQ(pi_projection(pair(1, 1)).rep(), 1);
  EXPECT_EQ(pi_projection(pair(-1, -5)).rep(), -1);
  EXPECT_EQ(pi_projection(pair(5, 2)).rep(), 5);
  EXPECT_EQ(pi_projection(pair(5, 2), 2).rep(), 2);
  EXPECT_EQ(pi_projection(pair(5, 2), 3).rep(), 10);
}

TEST(StrictClasses, Examples) {
  EXPECT_EQ(reps(strict_classes(1)), (std::vector<i64>{-1, 1}));
  const auto s5 = reps(strict_classes(5));
  for (i64 d : {1, -1, 5, -5}) EXPECT_TRUE(std::binary_search(s5.begin(), s5.end(), d));
}

TEST(StrictClasses, AreSubgroupsOfHatSelmer) {
  for (i64 n : enumerate_squarefree(200)) {
    const DescentData d = compute_descent(n);
    for (int i = 1; i <= 3; ++i) {
      const auto& s = d.strict[i - 1];
      EXPECT_TRUE(closed(s)) << n << " i=" << i;
      const Isogeny hat = static_cast<Isogeny>(2 * (i - 1) + 1);
      for (const auto& c : s) EXPECT_TRUE(d.of(hat).contains(c)) << n << " i=" << i << " class " << c.rep();
    }
  }
}

TEST(Quadruples, Examples) {
  EXPECT_EQ(sel2_quadruples(1), (std::vector<CoveringQuadruple>{{1, 1, 1, 1}}));
  const auto q5 = sel2_quadruples(5);
  EXPECT_EQ(q5.size(), 2u);
  EXPECT_EQ(all_quadruples(5).size(), 4u);
  EXPECT_EQ(all_quadruples(30).size(), 64u);  // each prime picks one of four slots
}

TEST(Quadruples, FourToOneForOddN) {
  for (i64 n : enumerate_squarefree(300)) {
    if (n % 2 == 0) continue;
    EXPECT_EQ(4 * sel2_quadruples(n).size(), sel2_pairs(n).pairs.size()) << n;
  }
}

TEST(Dimension, PowersOfTwo) {
  EXPECT_EQ(dimension(1), 0);
  EXPECT_EQ(dimension(8), 3);
  EXPECT_THROW(dimension(6), std::logic_error);
  const std::vector<SquareClass> gens{SquareClass::of(2), SquareClass::of(3), SquareClass::of(6)};
  EXPECT_EQ(generated_subgroup(gens).size(), 4u);
}
