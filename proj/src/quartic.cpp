#include "qsel/quartic.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace qsel {

namespace {

i128 checked_mul(i128 x, i128 y) {
  i128 r;
  if (__builtin_mul_overflow(x, y, &r)) throw std::overflow_error("quartic evaluation overflows 128 bits");
  return r;
}

i128 checked_add(i128 x, i128 y) {
  i128 r;
  if (__builtin_add_overflow(x, y, &r)) throw std::overflow_error("quartic evaluation overflows 128 bits");
  return r;
}

i64 parse_i64(std::string_view s) {
  i64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  return v;
}

Rational parse_rational(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_i64(s));
  i64 den = parse_i64(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Rational(parse_i64(s.substr(0, slash)), den);
}

}  // namespace

bool FamilySpec::degenerate() const {
  if (M == 0) return true;
  const i128 b2 = static_cast<i128>(B) * B;
  return b2 == 4 * static_cast<i128>(M);
}

i128 IntegralQuartic::operator()(i64 x, i64 y) const {
  const i128 x2 = static_cast<i128>(x) * x;
  const i128 y2 = static_cast<i128>(y) * y;
  const i128 x4 = checked_mul(x2, x2);
  const i128 y4 = checked_mul(y2, y2);
  i128 v = checked_mul(a, x4);
  v = checked_add(v, checked_mul(checked_mul(b, x2), y2));
  return checked_add(v, checked_mul(c, y4));
}

std::string IntegralQuartic::render() const {
  return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
}

std::optional<IntegralQuartic> BinaryQuartic::integral() const {
  if (!is_integral()) return std::nullopt;
  return IntegralQuartic{a.numerator(), B, c.numerator()};
}

std::string render(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string BinaryQuartic::render() const {
  return qsel::render(a) + "," + std::to_string(B) + "," + qsel::render(c);
}

BigInt discriminant(const FamilySpec& spec) {
  BigInt m = spec.M;
  BigInt inner = BigInt(spec.B) * spec.B - 4 * m;
  return 16 * m * inner * inner;
}

i64 bh_height(const FamilySpec& spec) {
  i64 b2;
  if (__builtin_mul_overflow(spec.B, spec.B, &b2)) throw std::overflow_error("bh_height: B^2 overflows");
  const i64 m = spec.M < 0 ? -spec.M : spec.M;
  return std::max(b2, m);
}

CanonicalForm canonical_rep(Rational a, const FamilySpec& spec) {
  if (spec.degenerate()) throw std::invalid_argument("canonical_rep: degenerate family");
  if (a.numerator() == 0) throw std::invalid_argument("canonical_rep: leading coefficient must be nonzero");
  // a * den^2 = num * den, so the class of a is the kernel of num * den.
  const SquareClass cls = SquareClass::of_fraction(a.numerator(), a.denominator());
  const i64 lead = cls.rep();
  CanonicalForm out;
  out.form.a = Rational(lead);
  out.form.B = spec.B;
  out.form.c = Rational(spec.M, lead);
  out.integral = out.form.c.denominator() == 1;
  return out;
}

std::vector<IntegralQuartic> family_forms(const FamilySpec& spec, std::span<const i64> primes_of_m) {
  if (spec.degenerate()) throw std::invalid_argument("family_forms: degenerate family");
  std::vector<IntegralQuartic> out;
  // Positive squarefree divisors of M are products of distinct primes of M.
  std::vector<i64> divisors{1};
  for (i64 p : primes_of_m) {
    if (spec.M % p != 0) continue;
    const std::size_t size = divisors.size();
    for (std::size_t i = 0; i < size; ++i) divisors.push_back(divisors[i] * p);
  }
  for (i64 d : divisors)
    for (i64 sign : {1, -1}) {
      const i64 a = sign * d;
      out.push_back({a, spec.B, spec.M / a});
    }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  return out;
}

std::vector<IntegralQuartic> family_forms(const FamilySpec& spec) {
  if (spec.degenerate()) throw std::invalid_argument("family_forms: degenerate family");
  return family_forms(spec, factor(spec.M).primes());
}

BigRational evaluate(const BinaryQuartic& f, i64 x, i64 y) {
  const BigRational a(BigInt(f.a.numerator()), BigInt(f.a.denominator()));
  const BigRational c(BigInt(f.c.numerator()), BigInt(f.c.denominator()));
  const BigInt x2 = BigInt(x) * x;
  const BigInt y2 = BigInt(y) * y;
  return a * BigRational(x2 * x2) + BigRational(BigInt(f.B) * x2 * y2) + c * BigRational(y2 * y2);
}

BinaryQuartic parse_quartic(const std::string& text) {
  const auto first = text.find(',');
  const auto second = first == std::string::npos ? first : text.find(',', first + 1);
  if (second == std::string::npos) throw std::invalid_argument("quartic must be written 'a,B,c'");
  std::string_view view(text);
  return {parse_rational(view.substr(0, first)), parse_i64(view.substr(first + 1, second - first - 1)),
          parse_rational(view.substr(second + 1))};
}

}  // namespace qsel
