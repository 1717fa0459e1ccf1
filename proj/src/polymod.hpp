#pragma once

// Dense polynomials over F_p of small degree (p odd, p < 2^32).

#include <array>
#include <optional>
#include <vector>

#include "qsel/arith.hpp"

namespace qsel::detail {

struct ModPoly {
  static constexpr int kMaxDegree = 8;
  std::array<u64, kMaxDegree + 1> c{};
  int deg = -1;  // -1 for the zero polynomial

  void trim() {
    while (deg >= 0 && c[deg] == 0) --deg;
  }
  u64 operator()(u64 t, u64 p) const {
    u64 v = 0;
    for (int k = deg; k >= 0; --k) v = (mulmod(v, t, p) + c[k]) % p;
    return v;
  }
  bool is_even() const {
    for (int k = 1; k <= deg; k += 2)
      if (c[k] != 0) return false;
    return true;
  }
};

ModPoly mul(const ModPoly& f, const ModPoly& g, u64 p);

/// lambda with f = lambda * h^2 for some h, if such a decomposition exists.
std::optional<u64> square_part(const ModPoly& f, u64 p);

/// Distinct roots of f in F_p (f nonzero, degree <= 4).
std::vector<u64> roots(const ModPoly& f, u64 p);

}  // namespace qsel::detail
