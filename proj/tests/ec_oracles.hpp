#pragma once

// Slow, independent elliptic-curve references for the tests: exhaustive
// point lists over small prime fields and exact arithmetic over Q.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using i64 = std::int64_t;
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

struct SmallPoint {
  i64 x = 0, y = 0;
  bool inf = true;
  auto operator<=>(const SmallPoint&) const = default;
};

inline i64 md(i64 a, i64 m) { return ((a % m) + m) % m; }

inline i64 inv(i64 a, i64 p) {
  i64 r = 1;
  for (i64 e = p - 2, b = md(a, p); e; e >>= 1, b = b * b % p)
    if (e & 1) r = r * b % p;
  return r;
}

/// Every point of y^2 = x^3 + ax + b over F_q, by trying all (x, y).
inline std::vector<SmallPoint> all_points(i64 a, i64 b, i64 q) {
  std::vector<SmallPoint> out{SmallPoint{}};
  for (i64 x = 0; x < q; ++x)
    for (i64 y = 0; y < q; ++y)
      if (md(y * y - (x * x % q * x + a * x + b), q) == 0) out.push_back({x, y, false});
  return out;
}

inline SmallPoint add(const SmallPoint& P, const SmallPoint& Q, i64 a, i64 q) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  i64 l;
  if (P.x == Q.x) {
    if (md(P.y + Q.y, q) == 0) return {};
    l = md(3 * P.x * P.x + a, q) * inv(2 * P.y, q) % q;
  } else {
    l = md(Q.y - P.y, q) * inv(Q.x - P.x, q) % q;
  }
  i64 x3 = md(l * l - P.x - Q.x, q);
  return {x3, md(l * (P.x - x3) - P.y, q), false};
}

/// dim of E(F_q)/l E(F_q): compare the group size with the image of [l].
inline int quotient_dim(i64 a, i64 b, i64 q, i64 ell) {
  auto pts = all_points(a, b, q);
  std::set<SmallPoint> image;
  for (const auto& P : pts) {
    SmallPoint acc, base = P;
    for (i64 e = ell; e; e >>= 1) {
      if (e & 1) acc = add(acc, base, md(a, q), q);
      base = add(base, base, md(a, q), q);
    }
    image.insert(acc);
  }
  std::size_t ratio = pts.size() / image.size();
  int d = 0;
  while (ratio > 1) {
    ratio /= static_cast<std::size_t>(ell);
    ++d;
  }
  return d;
}

/// dim of E(Q_l)/l when that group's l-part is cyclic: E(Q_l)/E_2 has
/// (affine solutions mod l^2) + l elements.
inline std::optional<int> quotient_dim_at_ell(i64 a, i64 b, i64 ell) {
  const i64 m = ell * ell;
  i64 count = ell;
  for (i64 x = 0; x < m; ++x)
    for (i64 y = 0; y < m; ++y)
      if (md(y * y - (x * x % m * x + a * x + b), m) == 0) ++count;
  int v = 0;
  while (count % ell == 0) {
    count /= ell;
    ++v;
  }
  if (v >= 2) return std::nullopt;
  return v;
}

struct QPoint {
  Rational x, y;
  bool inf = true;
};

inline QPoint qadd(const QPoint& P, const QPoint& Q, const Rational& a) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  Rational l;
  if (P.x == Q.x) {
    if (P.y + Q.y == 0) return {};
    l = (3 * P.x * P.x + a) / (2 * P.y);
  } else {
    l = (Q.y - P.y) / (Q.x - P.x);
  }
  Rational x3 = l * l - P.x - Q.x;
  return {x3, l * (P.x - x3) - P.y, false};
}

inline QPoint qmul(i64 n, QPoint P, const Rational& a) {
  QPoint acc;
  for (; n; n >>= 1, P = qadd(P, P, a))
    if (n & 1) acc = qadd(acc, P, a);
  return acc;
}

inline int val(Integer n, i64 ell) {
  int v = 0;
  while (n != 0 && n % ell == 0) {
    n /= ell;
    ++v;
  }
  return v;
}

/// v_l of a nonzero rational.
inline int val(const Rational& r, i64 ell) {
  return val(boost::multiprecision::numerator(r), ell) - val(boost::multiprecision::denominator(r), ell);
}

/// The class of P in E(Q_l)/l computed exactly: d*P over Q, then
/// z = -x/y and (z/l) mod l. Returns -1 if dP lands outside E_1.
inline i64 exact_class(const QPoint& P, const Rational& a, i64 d, i64 ell) {
  QPoint S = qmul(d, P, a);
  if (S.inf) return 0;
  Rational z = -S.x / S.y;
  if (val(z, ell) < 1) return -1;
  Rational w = z / ell;
  Integer num = boost::multiprecision::numerator(w), den = boost::multiprecision::denominator(w);
  i64 n = static_cast<i64>(((num % ell) + ell) % ell);
  i64 dd = static_cast<i64>(((den % ell) + ell) % ell);
  return n * inv(dd, ell) % ell;
}

/// Whether P lies in l*E(Q_l), via d*P in E_2 (d prime to l).
inline bool in_ell_multiple(const QPoint& P, const Rational& a, i64 d, i64 ell) {
  QPoint S = qmul(d, P, a);
  return S.inf || val(S.x, ell) <= -4;
}

}  // namespace oracle
