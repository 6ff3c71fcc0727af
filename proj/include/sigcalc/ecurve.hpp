#pragma once

// Short Weierstrass curves y^2 = x^3 + a x + b: the group law over F_p,
// point counting, the local H^1 dimension count, and classes in E(Q_l)/l.

#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>

#include "sigcalc/arith.hpp"
#include "sigcalc/bsgs.hpp"
#include "sigcalc/quadfield.hpp"

namespace sigcalc {

inline constexpr i64 kMaxCountingPrime = i64{1} << 24;
inline constexpr i64 kEnumerationLimit = 10'000;

struct FpPoint {
  i64 x = 0;
  i64 y = 0;
  bool inf = true;

  static FpPoint at(i64 x, i64 y) { return {x, y, false}; }
  static FpPoint infinity() { return {}; }

  std::string str() const { return inf ? "O" : "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }

  friend bool operator==(const FpPoint& P, const FpPoint& Q) {
    if (P.inf || Q.inf) return P.inf == Q.inf;
    return P.x == Q.x && P.y == Q.y;
  }
};

struct FpCurve {
  i64 p = 0;
  i64 a = 0;
  i64 b = 0;

  FpCurve() = default;
  FpCurve(i64 p_, i64 a_, i64 b_) : p(p_), a(mod(a_, p_)), b(mod(b_, p_)) {
    if (p < 3 || !is_prime(static_cast<u64>(p))) throw Error(Errc::BadInput, "curve modulus must be an odd prime");
    i64 disc = mod(static_cast<i128>(4) * mulmod(mulmod(a, a, p), a, p) + static_cast<i128>(27) * mulmod(b, b, p), p);
    if (disc == 0) throw Error(Errc::Singular, "4a^3 + 27b^2 = 0 mod " + std::to_string(p));
  }

  i64 rhs(i64 x) const {
    x = mod(x, p);
    return mod(static_cast<i128>(mulmod(mulmod(x, x, p), x, p)) + mulmod(a, x, p) + b, p);
  }

  bool contains(const FpPoint& P) const { return P.inf || mulmod(P.y, P.y, p) == rhs(P.x); }

  FpPoint neg(const FpPoint& P) const { return P.inf ? P : FpPoint::at(P.x, mod(-P.y, p)); }

  std::string str() const {
    return "y^2 = x^3 + " + std::to_string(a) + "x + " + std::to_string(b) + " over F_" + std::to_string(p);
  }

  friend bool operator==(const FpCurve&, const FpCurve&) = default;
};

inline FpPoint ec_add(const FpPoint& P, const FpPoint& Q, const FpCurve& E) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  const i64 p = E.p;
  i64 lambda;
  if (P.x == Q.x) {
    if (mod(P.y + Q.y, p) == 0) return FpPoint::infinity();
    lambda = mulmod(mod(static_cast<i128>(3) * mulmod(P.x, P.x, p) + E.a, p), invmod(mod(2 * P.y, p), p), p);
  } else {
    lambda = mulmod(mod(Q.y - P.y, p), invmod(mod(Q.x - P.x, p), p), p);
  }
  i64 x3 = mod(static_cast<i128>(mulmod(lambda, lambda, p)) - P.x - Q.x, p);
  i64 y3 = mod(static_cast<i128>(mulmod(lambda, mod(P.x - x3, p), p)) - P.y, p);
  return FpPoint::at(x3, y3);
}

inline FpPoint ec_scalar_mul(i64 n, FpPoint P, const FpCurve& E) {
  if (n < 0) {
    n = -n;
    P = E.neg(P);
  }
  FpPoint acc;
  while (n) {
    if (n & 1) acc = ec_add(acc, P, E);
    P = ec_add(P, P, E);
    n >>= 1;
  }
  return acc;
}

/// E(F_p) in the shape bsgs.hpp expects.
struct EcGroup {
  using Element = FpPoint;
  FpCurve E;

  Element identity() const { return {}; }
  Element add(const Element& P, const Element& Q) const { return ec_add(P, Q, E); }
  Element neg(const Element& P) const { return E.neg(P); }
  u64 key(const Element& P) const {
    return P.inf ? ~u64{0} : static_cast<u64>(P.x) * static_cast<u64>(E.p) + static_cast<u64>(P.y);
  }
};

/// Least m >= 0 with m*Q = R, Q of the given order.
inline u64 ecdl_bsgs(const FpCurve& E, const FpPoint& Q, const FpPoint& R, u64 order) {
  return bsgs_dlog(EcGroup{E}, Q, R, order);
}

/// The point of E with the given x, if x^3 + ax + b is a square; the root
/// with y in [0, (p-1)/2].
inline std::optional<FpPoint> lift_x(const FpCurve& E, i64 x) {
  i64 r = E.rhs(x);
  if (r == 0) return FpPoint::at(mod(x, E.p), 0);
  if (legendre(r, E.p) != 1) return std::nullopt;
  i64 y = sqrt_mod_prime(r, E.p);
  return FpPoint::at(mod(x, E.p), std::min(y, E.p - y));
}

/// Exact order of P given any positive multiple of it.
inline u64 point_order(const FpPoint& P, const FpCurve& E, u64 multiple) {
  if (multiple == 0) throw Error(Errc::BadInput, "order multiple must be positive");
  if (!ec_scalar_mul(static_cast<i64>(multiple), P, E).inf) throw Error(Errc::BadInput, "not a multiple of the order");
  u64 n = multiple;
  for (auto [q, e] : factor(multiple)) {
    for (int i = 0; i < e && n % q == 0 && ec_scalar_mul(static_cast<i64>(n / q), P, E).inf; ++i) n /= q;
  }
  return n;
}

namespace detail {

inline u64 count_points_enumeration(const FpCurve& E) {
  i64 total = E.p + 1;
  for (i64 x = 0; x < E.p; ++x) total += legendre(E.rhs(x), E.p);
  return static_cast<u64>(total);
}

/// Smallest M in [lo, hi] with M*P = O, by baby steps j*P and giant steps of m*P.
inline std::optional<u64> multiple_in_interval(const FpCurve& E, const FpPoint& P, u64 lo, u64 hi) {
  const u64 width = hi - lo + 1;
  const u64 m = static_cast<u64>(isqrt(width)) + 1;
  EcGroup G{E};
  std::unordered_map<u64, u64> baby;  // key(-j*P) -> j
  FpPoint jP;
  for (u64 j = 0; j < m; ++j) {
    baby.emplace(G.key(E.neg(jP)), j);
    jP = ec_add(jP, P, E);
  }
  const FpPoint step = ec_scalar_mul(static_cast<i64>(m), P, E);
  FpPoint cur = ec_scalar_mul(static_cast<i64>(lo), P, E);
  for (u64 i = 0; i * m < width; ++i) {
    if (auto it = baby.find(G.key(cur)); it != baby.end()) {
      u64 M = lo + i * m + it->second;
      if (M <= hi) return M;
    }
    cur = ec_add(cur, step, E);
  }
  return std::nullopt;
}

}  // namespace detail

/// #E(F_q): enumeration up to 10^4, BSGS on seeded points above.
inline u64 ec_group_order(const FpCurve& E, u64 seed = 0) {
  if (E.p > kMaxCountingPrime) throw Error(Errc::TooLarge, "point counting is limited to q <= 2^24");
  if (E.p <= kEnumerationLimit) return detail::count_points_enumeration(E);
  const u64 q = static_cast<u64>(E.p);
  const u64 spread = isqrt(4 * q);
  const u64 lo = q + 1 - spread, hi = q + 1 + spread;
  u64 exponent = 1;
  const u64 stream = substream(seed, 0xec);
  for (u64 i = 0, used = 0; used < 40 && i < 4000; ++i) {
    auto P = lift_x(E, static_cast<i64>(stream_below(stream, i, q)));
    if (!P) continue;
    ++used;
    auto M = detail::multiple_in_interval(E, *P, lo, hi);
    if (!M) throw Error(Errc::VerificationFailed, "no multiple of the point order in the Hasse interval");
    exponent = std::lcm(exponent, point_order(*P, E, *M));
    u64 first = (lo + exponent - 1) / exponent * exponent;
    if (first + exponent > hi) return first;
  }
  // groups with a small exponent leave the interval ambiguous
  return detail::count_points_enumeration(E);
}

inline u64 hasse_lower(i64 q) { return static_cast<u64>(q) + 1 - isqrt(4 * static_cast<u64>(q)); }
inline u64 hasse_upper(i64 q) { return static_cast<u64>(q) + 1 + isqrt(4 * static_cast<u64>(q)); }

/// Integral model y^2 = x^3 + a x + b over Q (and over any K containing Q).
struct RationalCurve {
  BigInt a = 0;
  BigInt b = 0;

  /// 16(4a^3 + 27b^2); zero means singular.
  BigInt discriminant() const { return 16 * (4 * a * a * a + 27 * b * b); }

  bool good_at(i64 q) const {
    return q != 2 && discriminant() != 0 && bmod(4 * a * a * a + 27 * b * b, q) != 0;
  }

  FpCurve reduce(i64 q) const {
    if (!good_at(q)) throw Error(Errc::BadReduction, "bad reduction at " + std::to_string(q));
    return FpCurve(q, static_cast<i64>(bmod(a, q)), static_cast<i64>(bmod(b, q)));
  }

  std::string str() const { return "y^2 = x^3 + " + a.str() + "x + " + b.str(); }
};

/// dim_{F_l} H^1(K_w, E)[l] for a degree-one place with residue field
/// F_q and good reduction `reduction`.
inline int h1_local_dim(const FpCurve& reduction, i64 ell) {
  u64 n = ec_group_order(reduction);
  const u64 l = static_cast<u64>(ell);
  if (reduction.p == ell) {
    if (n % l == 0) throw Error(Errc::OutOfScope, "l divides #E(F_l)");
    return 1;
  }
  if (n % l != 0) return 0;
  if ((n / l) % l == 0) throw Error(Errc::OutOfScope, "l^2 divides the reduced order");
  return 1;
}

inline int h1_local_dim(const RationalCurve& E, const Place& w, i64 ell) {
  if (w.residue_degree() != 1) throw Error(Errc::OutOfScope, "only degree-one places are covered");
  if (!E.good_at(w.q)) throw Error(Errc::OutOfScope, "bad reduction at " + w.str());
  return h1_local_dim(E.reduce(w.q), ell);
}

// ---------------------------------------------------------------------------
// Local arithmetic over Z_l / l^k in projective coordinates.

struct LocalCurve {
  i64 ell = 5;
  BigInt a = 0;
  BigInt b = 0;
};

/// (X : Y : Z) known modulo l^precision, scaled so one coordinate is a unit.
struct LocalPoint {
  BigInt X = 0;
  BigInt Y = 1;
  BigInt Z = 0;
  unsigned precision = 1;

  static LocalPoint affine(const BigInt& x, const BigInt& y, unsigned k) { return {x, y, 1, k}; }
  static LocalPoint infinity(unsigned k) { return {0, 1, 0, k}; }
};

namespace detail {

inline unsigned big_valuation(BigInt v, i64 ell, unsigned cap) {
  if (v == 0) return cap;
  unsigned e = 0;
  while (e < cap && v % ell == 0) {
    v /= ell;
    ++e;
  }
  return e;
}

inline LocalPoint normalize(LocalPoint P, i64 ell) {
  BigInt M = bpow(BigInt(ell), P.precision);
  P.X = bmod(P.X, M);
  P.Y = bmod(P.Y, M);
  P.Z = bmod(P.Z, M);
  unsigned v = std::min({big_valuation(P.X, ell, P.precision), big_valuation(P.Y, ell, P.precision),
                         big_valuation(P.Z, ell, P.precision)});
  if (v >= P.precision) throw Error(Errc::PrecisionLoss, "all coordinates vanish at working precision");
  if (v > 0) {
    BigInt lv = bpow(BigInt(ell), v);
    P.X /= lv;
    P.Y /= lv;
    P.Z /= lv;
    P.precision -= v;
    M = bpow(BigInt(ell), P.precision);
    P.X = bmod(P.X, M);
    P.Y = bmod(P.Y, M);
    P.Z = bmod(P.Z, M);
  }
  return P;
}

}  // namespace detail

inline bool is_infinity(const LocalPoint& P) { return P.X == 0 && P.Z == 0; }

inline bool in_kernel_of_reduction(const LocalPoint& P, i64 ell) { return P.Z % ell == 0; }

inline LocalPoint local_double(const LocalPoint& P, const LocalCurve& E) {
  if (is_infinity(P)) return P;
  const BigInt &X = P.X, &Y = P.Y, &Z = P.Z;
  BigInt w = E.a * Z * Z + 3 * X * X;
  BigInt s = Y * Z;
  BigInt B = X * Y * s;
  BigInt h = w * w - 8 * B;
  LocalPoint out{2 * h * s, w * (4 * B - h) - 8 * Y * Y * s * s, 8 * s * s * s, P.precision};
  return detail::normalize(out, E.ell);
}

inline LocalPoint local_add(const LocalPoint& P, const LocalPoint& Q, const LocalCurve& E) {
  if (is_infinity(P)) return Q;
  if (is_infinity(Q)) return P;
  unsigned k = std::min(P.precision, Q.precision);
  BigInt M = bpow(BigInt(E.ell), k);
  BigInt u = bmod(Q.Y * P.Z - P.Y * Q.Z, M);
  BigInt v = bmod(Q.X * P.Z - P.X * Q.Z, M);
  if (u == 0 && v == 0) return local_double(P.precision <= Q.precision ? P : Q, E);
  BigInt vv = v * v, vvv = v * vv;
  BigInt zz = P.Z * Q.Z;
  BigInt R = vv * P.X * Q.Z;
  BigInt A = u * u * zz - vvv - 2 * R;
  LocalPoint out{v * A, u * (R - A) - vvv * P.Y * Q.Z, vvv * zz, k};
  return detail::normalize(out, E.ell);
}

inline LocalPoint local_neg(const LocalPoint& P) { return {P.X, -P.Y, P.Z, P.precision}; }

inline LocalPoint local_scalar_mul(i64 n, LocalPoint P, const LocalCurve& E) {
  if (n < 0) {
    n = -n;
    P = local_neg(P);
  }
  LocalPoint acc = LocalPoint::infinity(P.precision);
  while (n) {
    if (n & 1) acc = local_add(acc, P, E);
    n >>= 1;
    if (n) P = local_double(P, E);
  }
  return acc;
}

struct LocalClass {
  i64 c = 0;         // class in F_l
  i64 ell = 0;
  u64 d = 0;         // #E~(F_l)
  u64 order = 1;     // order of the reduction of P
  unsigned precision = 0;
  std::optional<Place> place;
};

/// The class of P in E(Q_l)/l ~ F_l: z(dP)/l mod l, z = -x/y.
inline LocalClass local_class(const LocalPoint& P, const LocalCurve& E) {
  const i64 ell = E.ell;
  RationalCurve Eq{E.a, E.b};
  FpCurve red = Eq.reduce(ell);
  LocalClass out;
  out.ell = ell;
  out.d = ec_group_order(red);
  if (out.d % static_cast<u64>(ell) == 0) throw Error(Errc::BadInput, "l divides #E(F_l)");
  out.precision = P.precision;
  if (is_infinity(P)) return out;

  const BigInt M = bpow(BigInt(ell), P.precision);
  // on-curve check: Y^2 Z = X^3 + a X Z^2 + b Z^3
  if (bmod(P.Y * P.Y * P.Z - (P.X * P.X * P.X + E.a * P.X * P.Z * P.Z + E.b * P.Z * P.Z * P.Z), M) != 0) {
    throw Error(Errc::BadInput, "point is not on the curve at working precision");
  }

  LocalPoint S = P;
  if (!in_kernel_of_reduction(P, ell)) {
    i64 zinv = invmod(static_cast<i64>(bmod(P.Z, ell)), ell);
    FpPoint Pt = FpPoint::at(static_cast<i64>(bmod(P.X * zinv, ell)), static_cast<i64>(bmod(P.Y * zinv, ell)));
    out.order = point_order(Pt, red, out.d);
    // (o-1)P never meets P mod l before the last step, so only that step
    // lands in E_1 and no precision is lost on the way
    LocalPoint T = local_scalar_mul(static_cast<i64>(out.order) - 1, P, E);
    S = local_add(T, P, E);
  }
  if (S.precision < 2) throw Error(Errc::PrecisionLoss, "fewer than two l-adic digits left");
  out.precision = S.precision;
  if (is_infinity(S)) return out;
  if (!in_kernel_of_reduction(S, ell) || S.Y % ell == 0) {
    throw Error(Errc::VerificationFailed, "o*P is not in the kernel of reduction");
  }
  const BigInt Mk = bpow(BigInt(ell), S.precision);
  BigInt z = bmod(-S.X * binvmod(S.Y, Mk), Mk);
  // z(S1 + S2) = z1 + z2 mod l^2 on E_1, so z(dP) = (d/o) z(S)
  i64 c1 = static_cast<i64>(bmod(z / ell, ell));
  out.c = mulmod(c1, static_cast<i64>((out.d / out.order) % static_cast<u64>(ell)), ell);
  return out;
}

namespace detail {

/// Runs `attempt(k)` at precision l^k, doubling k once on PrecisionLoss.
inline LocalClass with_precision_retry(unsigned k, const std::function<LocalClass(unsigned)>& attempt) {
  try {
    return attempt(k);
  } catch (const Error& e) {
    if (e.code() != Errc::PrecisionLoss) throw;
  }
  return attempt(2 * k);
}

}  // namespace detail

inline LocalClass local_class(const RationalCurve& E, const BigInt& x, const BigInt& y, i64 ell, unsigned precision = 4) {
  return detail::with_precision_retry(precision, [&](unsigned k) {
    return local_class(LocalPoint::affine(x, y, k), LocalCurve{ell, E.a, E.b});
  });
}

/// A point of E(K) with integral coordinates in O_K, or O.
struct QuadPoint {
  QuadInt x;
  QuadInt y;
  bool inf = false;
};

/// Class of P at a split place w over l, through the embedding K -> Q_l.
inline LocalClass local_class(const RationalCurve& E, const QuadPoint& P, const Place& w, unsigned precision = 4) {
  LocalClass out = detail::with_precision_retry(precision, [&](unsigned k) {
    if (P.inf) return local_class(LocalPoint::infinity(k), LocalCurve{w.q, E.a, E.b});
    return local_class(LocalPoint::affine(embed(P.x, w, k).value, embed(P.y, w, k).value, k), LocalCurve{w.q, E.a, E.b});
  });
  out.place = w;
  return out;
}

/// Seeded search for y^2 = x^3 + a x + b over F_p of prime order != p,
/// a fixed, b = 1, 2, ... in a seed-dependent order.
inline FpCurve find_prime_order_curve(i64 p, i64 a, u64 seed, u64 budget = 10'000) {
  const u64 stream = substream(seed, 0xb);
  for (u64 i = 0; i < budget; ++i) {
    i64 b = 1 + static_cast<i64>(stream_below(stream, i, static_cast<u64>(p - 1)));
    FpCurve E;
    try {
      E = FpCurve(p, a, b);
    } catch (const Error&) {
      continue;
    }
    u64 n = ec_group_order(E);
    if (n != static_cast<u64>(p) && n > 3 && is_prime(n)) return E;
  }
  throw BudgetExhaustedError(budget, "prime-order curve search");
}

}  // namespace sigcalc
