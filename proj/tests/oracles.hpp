#pragma once

// Brute-force reference computations. Test-only: nothing here shares a code
// path with the library routines it is used to check.

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

using i64 = std::int64_t;

inline i64 mulmod(i64 a, i64 b, i64 m) { return static_cast<i64>((static_cast<__int128>(a) * b) % m); }

/// Least m >= 0 with g^m = t mod p, by repeated multiplication.
inline std::optional<i64> dlog(i64 g, i64 t, i64 p) {
  i64 x = 1;
  t %= p;
  for (i64 m = 0; m < p; ++m) {
    if (x == t) return m;
    x = mulmod(x, g, p);
  }
  return std::nullopt;
}

inline i64 power(i64 g, i64 e, i64 p) {
  i64 x = 1;
  for (i64 i = 0; i < e; ++i) x = mulmod(x, g, p);
  return x;
}

/// All square roots of n modulo m.
inline std::vector<i64> sqrts(i64 n, i64 m) {
  std::vector<i64> out;
  n = ((n % m) + m) % m;
  for (i64 x = 0; x < m; ++x) {
    if (mulmod(x, x, m) == n) out.push_back(x);
  }
  return out;
}

/// Smallest unit > 1 of the maximal order of Q(sqrt D), as (x, y, norm)
/// meaning (x + y sqrt D) / 2.
struct Unit {
  i64 x, y;
  int norm;
};

inline std::optional<Unit> fundamental_unit(i64 D, i64 y_cap = 3'000'000) {
  const bool half = D % 4 == 1;
  for (i64 y = 1; y <= y_cap; ++y) {
    // half: x^2 - D y^2 = +-4 ; else (2a)^2 - D (2b)^2 = +-4 with y = 2b
    if (!half && y % 2) continue;
    for (int s : {-1, 1}) {
      __int128 x2 = static_cast<__int128>(D) * y * y + 4 * s;
      if (x2 <= 0) continue;
      i64 x = static_cast<i64>(std::sqrt(static_cast<long double>(x2)));
      while (static_cast<__int128>(x) * x > x2) --x;
      while (static_cast<__int128>(x + 1) * (x + 1) <= x2) ++x;
      if (static_cast<__int128>(x) * x != x2) continue;
      if (!half && x % 2) continue;
      return Unit{x, y, s > 0 ? 1 : -1};
    }
  }
  return std::nullopt;
}

inline int kronecker_brute(i64 disc, i64 a) {
  // character of the field discriminant evaluated through the prime factors of a
  int result = 1;
  i64 n = a;
  for (i64 p = 2; p <= n; ++p) {
    while (n % p == 0) {
      n /= p;
      int s;
      if (p == 2) {
        i64 r = ((disc % 8) + 8) % 8;
        s = (disc % 2 == 0) ? 0 : (r == 1 || r == 7 ? 1 : -1);
      } else {
        i64 d = ((disc % p) + p) % p;
        if (d == 0) {
          s = 0;
        } else {
          s = -1;
          for (i64 x = 1; x < p; ++x) {
            if (mulmod(x, x, p) == d) {
              s = 1;
              break;
            }
          }
        }
      }
      result *= s;
    }
  }
  return result;
}

/// Class number from the finite analytic formula
///   h log eps = -1/2 sum_{a=1}^{disc-1} chi(a) log sin(pi a / disc).
inline std::optional<i64> class_number_analytic(i64 D) {
  const i64 disc = (D % 4 == 1) ? D : 4 * D;
  auto found = fundamental_unit(D);
  if (!found) return std::nullopt;
  Unit u = *found;
  long double eps = (u.x + u.y * std::sqrt(static_cast<long double>(D))) / 2.0L;
  long double sum = 0;
  const long double pi = std::acos(-1.0L);
  for (i64 a = 1; a < disc; ++a) {
    int c = kronecker_brute(disc, a);
    if (c) sum += c * std::log(std::sin(pi * a / disc));
  }
  return static_cast<i64>(std::llround(-sum / (2 * std::log(eps))));
}

}  // namespace oracle
