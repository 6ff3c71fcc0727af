#pragma once

// Real quadratic fields Q(sqrt D): elements of the maximal order, places,
// completions at split primes, principal-ideal factorization, class numbers
// and the ell-rank of ray class groups.

#include <algorithm>
#include <cmath>
#include <compare>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sigcalc/arith.hpp"
#include "sigcalc/bsgs.hpp"
#include "sigcalc/linalg.hpp"

namespace sigcalc {

/// Largest field discriminant accepted by the exhaustive class-number count.
inline constexpr i64 kMaxClassNumberDiscriminant = 100'000'000;

inline i64 field_discriminant(i64 D) { return mod(D, 4) == 1 ? D : 4 * D; }

/// a + b*omega with omega = sqrt(D) (D = 2, 3 mod 4) or (1 + sqrt(D))/2
/// (D = 1 mod 4); D squarefree.
struct QuadInt {
  BigInt a = 0;
  BigInt b = 0;
  i64 D = 2;

  static QuadInt rational(const BigInt& x, i64 D) { return {x, 0, D}; }

  /// x + y*sqrt(D).
  static QuadInt from_sqrt_form(const BigInt& x, const BigInt& y, i64 D) {
    if (half_omega(D)) return {x - y, 2 * y, D};
    return {x, y, D};
  }

  static bool half_omega(i64 D) { return mod(D, 4) == 1; }
  bool half_omega() const { return half_omega(D); }

  bool is_rational() const { return b == 0; }
  bool is_zero() const { return a == 0 && b == 0; }

  /// x and y with this = (x + y*sqrt(D)) / 2.
  std::pair<BigInt, BigInt> doubled_sqrt_form() const {
    if (half_omega()) return {2 * a + b, b};
    return {2 * a, 2 * b};
  }

  BigInt norm() const {
    if (half_omega()) return a * a + a * b - b * b * ((D - 1) / 4);
    return a * a - b * b * D;
  }

  BigInt trace() const { return half_omega() ? 2 * a + b : 2 * a; }

  QuadInt conj() const {
    if (half_omega()) return {a + b, -b, D};
    return {a, -b, D};
  }

  QuadInt operator-() const { return {-a, -b, D}; }
  QuadInt operator+(const QuadInt& o) const { return {a + o.a, b + o.b, D}; }
  QuadInt operator-(const QuadInt& o) const { return {a - o.a, b - o.b, D}; }

  QuadInt operator*(const QuadInt& o) const {
    if (half_omega()) {
      // omega^2 = omega + (D-1)/4
      BigInt c = (D - 1) / 4;
      BigInt bb = b * o.b;
      return {a * o.a + bb * c, a * o.b + b * o.a + bb, D};
    }
    return {a * o.a + b * o.b * D, a * o.b + b * o.a, D};
  }

  /// Approximate real value under sqrt(D) > 0.
  long double approx() const {
    long double w = half_omega() ? (1.0L + std::sqrt(static_cast<long double>(D))) / 2.0L
                                 : std::sqrt(static_cast<long double>(D));
    return static_cast<long double>(a) + static_cast<long double>(b) * w;
  }

  std::string str() const {
    std::string w = half_omega() ? "w" : "sqrt(" + std::to_string(D) + ")";
    return a.str() + (b < 0 ? " - " : " + ") + boost::multiprecision::abs(b).str() + "*" + w;
  }

  friend bool operator==(const QuadInt& x, const QuadInt& y) { return x.D == y.D && x.a == y.a && x.b == y.b; }
};

inline QuadInt qpow(QuadInt x, u64 e) {
  QuadInt r = QuadInt::rational(1, x.D);
  while (e) {
    if (e & 1) r = r * x;
    x = x * x;
    e >>= 1;
  }
  return r;
}

enum class SplitType { Split, Inert, Ramified };

inline const char* split_type_name(SplitType t) {
  switch (t) {
    case SplitType::Split: return "split";
    case SplitType::Inert: return "inert";
    case SplitType::Ramified: return "ramified";
  }
  return "?";
}

/// A finite place of K. Split places over odd q are labelled by the square
/// root of D mod q they send sqrt(D) to; over q = 2 by the root of omega's
/// minimal polynomial mod 2.
struct Place {
  i64 q = 0;
  SplitType type = SplitType::Split;
  std::optional<i64> root_label;

  unsigned residue_degree() const { return type == SplitType::Inert ? 2 : 1; }

  /// Absolute norm of the prime ideal.
  i64 norm() const { return type == SplitType::Inert ? q * q : q; }

  std::string str() const {
    std::string s = std::to_string(q) + ":" + split_type_name(type);
    if (root_label) s += ":" + std::to_string(*root_label);
    return s;
  }

  friend bool operator==(const Place&, const Place&) = default;
  friend auto operator<=>(const Place& x, const Place& y) {
    if (auto c = x.q <=> y.q; c != 0) return c;
    return x.root_label.value_or(-1) <=> y.root_label.value_or(-1);
  }
};

/// Local parameter at w inside O_K.
inline QuadInt uniformizer(const Place& w, i64 D) {
  if (w.type != SplitType::Ramified) return QuadInt::rational(w.q, D);
  if (w.q == 2 && mod(D, 4) == 3) return QuadInt::from_sqrt_form(1, 1, D);
  return QuadInt::from_sqrt_form(0, 1, D);
}

// ---------------------------------------------------------------------------
// continued fraction of omega and the fundamental unit

struct ContinuedFraction {
  i64 a0 = 0;
  std::vector<i64> period;  // a_1 .. a_k
};

inline ContinuedFraction omega_continued_fraction(i64 D) {
  const i64 s = static_cast<i64>(isqrt(static_cast<u64>(D)));
  i64 P = 0, Q = 1;
  if (mod(D, 4) == 1) {
    P = 1;
    Q = 2;
  }
  ContinuedFraction cf;
  cf.a0 = (P + s) / Q;
  P = cf.a0 * Q - P;
  Q = (D - P * P) / Q;
  const i64 P1 = P, Q1 = Q;
  for (;;) {
    i64 a = (P + s) / Q;
    cf.period.push_back(a);
    P = a * Q - P;
    Q = (D - P * P) / Q;
    if (P == P1 && Q == Q1) break;
  }
  return cf;
}

/// Convergent numerators/denominators p_{k-1}, q_{k-1} of omega's expansion
/// after one period, reduced mod `modulus` (0 = exact).
inline std::pair<BigInt, BigInt> period_convergent(const ContinuedFraction& cf, const BigInt& modulus) {
  BigInt p_prev = 1, p = cf.a0, q_prev = 0, q = 1;
  auto reduce = [&](BigInt& x) {
    if (modulus != 0) x = bmod(x, modulus);
  };
  reduce(p);
  for (std::size_t i = 0; i + 1 < cf.period.size(); ++i) {
    BigInt pn = cf.period[i] * p + p_prev;
    BigInt qn = cf.period[i] * q + q_prev;
    reduce(pn);
    reduce(qn);
    p_prev = std::move(p);
    p = std::move(pn);
    q_prev = std::move(q);
    q = std::move(qn);
  }
  return {p, q};
}

/// eps = p_{k-1} - q_{k-1} * conj(omega), written in the omega basis.
inline QuadInt unit_from_convergent(const BigInt& p, const BigInt& q, i64 D) {
  if (mod(D, 4) == 1) return {p - q, q, D};
  return {p, q, D};
}

inline void require_squarefree_radicand(i64 D) {
  if (D <= 1) throw Error(Errc::BadInput, "radicand must exceed 1");
  if (!is_squarefree(static_cast<u64>(D))) throw Error(Errc::NotSquarefree, std::to_string(D));
}

/// Smallest unit > 1 of the maximal order, and its norm.
inline std::pair<QuadInt, int> fundamental_unit(i64 D) {
  require_squarefree_radicand(D);
  auto cf = omega_continued_fraction(D);
  auto [p, q] = period_convergent(cf, 0);
  return {unit_from_convergent(p, q, D), cf.period.size() % 2 ? -1 : 1};
}

// ---------------------------------------------------------------------------
// class number by cycles of reduced indefinite forms

namespace detail {

struct FormKey {
  i64 a, b;
  friend bool operator==(const FormKey&, const FormKey&) = default;
};

struct FormKeyHash {
  std::size_t operator()(const FormKey& k) const noexcept {
    return static_cast<std::size_t>(splitmix64(static_cast<u64>(k.a) * 0x9e3779b97f4a7c15ULL ^ static_cast<u64>(k.b)));
  }
};

inline void divisors_from(const Factorization& f, std::vector<i64>& out) {
  out.assign(1, 1);
  for (auto [p, e] : f) {
    std::size_t n = out.size();
    i64 pk = 1;
    for (int i = 0; i < e; ++i) {
      pk *= static_cast<i64>(p);
      for (std::size_t j = 0; j < n; ++j) out.push_back(out[j] * pk);
    }
  }
}

}  // namespace detail

/// Number of SL2(Z)-classes of forms of (fundamental) discriminant disc > 0.
inline i64 narrow_class_number(i64 disc) {
  const i64 s = static_cast<i64>(isqrt(static_cast<u64>(disc)));
  const auto primes = primes_up_to(static_cast<i64>(isqrt(static_cast<u64>(disc / 4 + 1))) + 1);
  std::vector<detail::FormKey> reduced;
  std::vector<i64> divs;
  for (i64 b = (disc % 2 == 0) ? 2 : 1; b <= s; b += 2) {
    const i64 n = (disc - b * b) / 4;  // = -a*c
    u64 rest = static_cast<u64>(n);
    Factorization f;
    for (i64 p : primes) {
      if (static_cast<u64>(p) * static_cast<u64>(p) > rest) break;
      while (rest % static_cast<u64>(p) == 0) {
        ++f[static_cast<u64>(p)];
        rest /= static_cast<u64>(p);
      }
    }
    if (rest > 1) ++f[rest];
    detail::divisors_from(f, divs);
    for (i64 a : divs) {
      // sqrt(disc) - b < 2a < sqrt(disc) + b
      i64 lo = 2 * a + b;
      if (static_cast<i128>(lo) * lo <= disc) continue;
      i64 hi = 2 * a - b;
      if (hi > 0 && static_cast<i128>(hi) * hi >= disc) continue;
      if (std::gcd(std::gcd(a, b), n / a) != 1) continue;
      reduced.push_back({a, b});
      reduced.push_back({-a, b});
    }
  }
  std::unordered_set<detail::FormKey, detail::FormKeyHash> seen;
  seen.reserve(reduced.size() * 2);
  i64 cycles = 0;
  for (const auto& start : reduced) {
    if (seen.count(start)) continue;
    ++cycles;
    detail::FormKey f = start;
    while (seen.insert(f).second) {
      // rho(a, b, c) = (c, b', (b'^2 - disc) / 4c), b' = -b mod 2|c| maximal below sqrt(disc)
      const i64 c = (f.b * f.b - disc) / (4 * f.a);
      const i64 two_c = 2 * std::abs(c);
      const i64 bn = s - mod(s + f.b, two_c);
      f = {c, bn};
    }
  }
  return cycles;
}

/// h_K by exhaustive reduction of forms; TooLarge past the desk-scale bound.
inline i64 class_number(i64 D) {
  require_squarefree_radicand(D);
  const i64 disc = field_discriminant(D);
  if (disc > kMaxClassNumberDiscriminant) {
    throw Error(Errc::TooLarge, "discriminant " + std::to_string(disc) + " exceeds exhaustive bound");
  }
  const i64 narrow = narrow_class_number(disc);
  const bool unit_norm_negative = omega_continued_fraction(D).period.size() % 2 == 1;
  return unit_norm_negative ? narrow : narrow / 2;
}

// ---------------------------------------------------------------------------
// the field

class RealQuadField {
 public:
  explicit RealQuadField(i64 D, bool compute_class_number = true) : D_(D), disc_(field_discriminant(D)) {
    require_squarefree_radicand(D);
    cf_ = omega_continued_fraction(D);
    unit_norm_ = cf_.period.size() % 2 ? -1 : 1;
    if (compute_class_number && disc_ <= kMaxClassNumberDiscriminant) class_number_ = sigcalc::class_number(D);
  }

  i64 D() const { return D_; }
  i64 discriminant() const { return disc_; }
  int unit_norm() const { return unit_norm_; }
  const ContinuedFraction& unit_expansion() const { return cf_; }

  bool has_class_number() const { return class_number_.has_value(); }

  i64 class_number() const {
    if (!class_number_) {
      throw Error(Errc::TooLarge, "class number unavailable for discriminant " + std::to_string(disc_));
    }
    return *class_number_;
  }

  /// Exact fundamental unit; its size grows with the period of omega.
  QuadInt fundamental_unit() const {
    auto [p, q] = period_convergent(cf_, 0);
    return unit_from_convergent(p, q, D_);
  }

  /// Fundamental unit with coefficients reduced mod `modulus`; congruent to
  /// the exact unit modulo any divisor of `modulus`.
  QuadInt fundamental_unit_mod(const BigInt& modulus) const {
    auto [p, q] = period_convergent(cf_, modulus);
    QuadInt e = unit_from_convergent(p, q, D_);
    return {bmod(e.a, modulus), bmod(e.b, modulus), D_};
  }

  QuadInt element(const BigInt& a, const BigInt& b) const { return {a, b, D_}; }

 private:
  i64 D_;
  i64 disc_;
  ContinuedFraction cf_;
  int unit_norm_ = 1;
  std::optional<i64> class_number_;
};

inline SplitType splitting_type(i64 q, i64 D) {
  int k = kronecker(field_discriminant(D), q);
  if (k == 0) return SplitType::Ramified;
  return k == 1 ? SplitType::Split : SplitType::Inert;
}

/// The places of K over q, canonically ordered: for split q the first place
/// carries the root in [1, (q-1)/2].
inline std::vector<Place> split_places(i64 q, i64 D) {
  if (!is_prime(static_cast<u64>(q))) throw Error(Errc::BadInput, std::to_string(q) + " is not prime");
  SplitType t = splitting_type(q, D);
  if (t != SplitType::Split) return {Place{q, t, std::nullopt}};
  if (q == 2) return {Place{2, t, 0}, Place{2, t, 1}};
  i64 r = sqrt_mod_prime(D, q);
  return {Place{q, t, r}, Place{q, t, q - r}};
}

inline std::vector<Place> split_places(i64 q, const RealQuadField& K) { return split_places(q, K.D()); }

inline Place conjugate_place(const Place& w) {
  if (w.type != SplitType::Split) return w;
  if (w.q == 2) return Place{2, w.type, 1 - *w.root_label};
  return Place{w.q, w.type, w.q - *w.root_label};
}

/// Image of omega in Z_q at the split place w, to precision q^k.
inline PadicApprox omega_image(const Place& w, i64 D, unsigned k) {
  if (w.type != SplitType::Split || !w.root_label) throw Error(Errc::BadInput, "embedding needs a split place");
  if (w.q == 2) {
    // Newton on x^2 - x - (D-1)/4; derivative 2x - 1 is odd
    BigInt c = (D - 1) / 4;
    BigInt x = *w.root_label;
    BigInt mk = 2;
    for (unsigned i = 1; i < k; ++i) {
      mk *= 2;
      BigInt fx = bmod(x * x - x - c, mk);
      x = bmod(x - fx * binvmod(2 * x - 1, mk), mk);
    }
    return PadicApprox::make(2, k, x);
  }
  PadicApprox s = hensel_sqrt(D, w.q, k);
  if (bmod(s.value, w.q) != *w.root_label) s = PadicApprox::make(w.q, k, -s.value);
  if (mod(D, 4) == 1) {
    BigInt m = s.modulus();
    return PadicApprox::make(w.q, k, (1 + s.value) * binvmod(2, m));
  }
  return s;
}

inline PadicApprox embed(const QuadInt& x, const Place& w, unsigned k) {
  PadicApprox om = omega_image(w, x.D, k);
  return PadicApprox::make(w.q, k, x.a + x.b * om.value);
}

/// Image of x in the residue field at a degree-one place (split or ramified).
inline i64 residue(const QuadInt& x, const Place& w) {
  if (w.type == SplitType::Split) return static_cast<i64>(embed(x, w, 1).value);
  if (w.type == SplitType::Ramified) {
    // sqrt(D) -> 0
    auto [x2, y2] = x.doubled_sqrt_form();
    if (w.q == 2) {
      if (mod(x.D, 4) == 3) {
        // (1 + sqrt D) -> 0, so sqrt D -> 1 mod 2
        return static_cast<i64>(bmod(x.a + x.b, 2));
      }
      return static_cast<i64>(bmod(x.a, 2));
    }
    return static_cast<i64>(bmod(x2 * binvmod(2, w.q), w.q));
  }
  throw Error(Errc::BadInput, "residue map needs a degree-one place");
}

/// Splits q^k || N(x) into valuations at the places over q.
inline void place_valuations(const QuadInt& x, i64 q, int k, std::vector<std::pair<Place, int>>& out) {
  auto places = split_places(q, x.D);
  if (places.size() == 1) {
    const Place& w = places.front();
    out.emplace_back(w, w.type == SplitType::Inert ? k / 2 : k);
    return;
  }
  auto img = embed(x, places[0], static_cast<unsigned>(k) + 1);
  int e0 = k;
  if (auto v = img.valuation()) e0 = std::min(k, static_cast<int>(*v));
  if (e0 > 0) out.emplace_back(places[0], e0);
  if (k - e0 > 0) out.emplace_back(places[1], k - e0);
}

/// Place-by-place factorization of the principal ideal (x), provided |N(x)|
/// is B-smooth.
inline std::vector<std::pair<Place, int>> factor_principal(const QuadInt& x, i64 bound) {
  if (x.is_zero()) throw Error(Errc::ZeroElement, "factor_principal of 0");
  BigInt n = boost::multiprecision::abs(x.norm());
  std::vector<std::pair<Place, int>> out;
  if (n == 1) return out;
  Factorization f;
  for (i64 p = 2; p <= bound && BigInt(p) * p <= n; ++p) {
    if (!is_prime(static_cast<u64>(p))) continue;
    while (n % p == 0) {
      ++f[static_cast<u64>(p)];
      n /= p;
    }
  }
  if (n > 1) {
    if (n > bound) throw NotSmoothError(n.str());
    ++f[static_cast<u64>(n)];
  }
  for (auto [qq, k] : f) place_valuations(x, static_cast<i64>(qq), k, out);
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  return out;
}

// ---------------------------------------------------------------------------
// ray class ell-rank

/// Rank over F_ell of a small dense matrix.
inline std::size_t rank_mod_ell(std::vector<std::vector<i64>> m, i64 ell) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m.front().size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t sel = rank;
    while (sel < m.size() && mod(m[sel][c], ell) == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[rank], m[sel]);
    i64 inv = invmod(m[rank][c], ell);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank) continue;
      i64 f = mulmod(mod(m[r][c], ell), inv, ell);
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) m[r][j] = mod(m[r][j] - mulmod(f, m[rank][j], ell), ell);
    }
    ++rank;
  }
  return rank;
}

/// Coordinate of a unit u in (O_K/w^e)^* (x) F_ell, or nullopt when that
/// local factor has no ell-part. Over ell (split, e >= 2) this is the
/// Teichmuller y-coordinate; over q = 1 mod ell the residue discrete log.
inline std::optional<i64> ray_local_coordinate(const QuadInt& u, const Place& w, int exponent, i64 ell) {
  if (exponent <= 0) return std::nullopt;
  if (w.type == SplitType::Inert) throw Error(Errc::BadInput, "ray class modulus supports degree-one places only");
  if (w.q == ell) {
    if (w.type != SplitType::Split) throw Error(Errc::BadInput, "place over ell must be split");
    if (exponent < 2) return std::nullopt;
    return teichmuller(embed(u, w, 2).value, ell).y;
  }
  if ((w.q - 1) % ell != 0) return std::nullopt;
  const i64 q = w.q;
  i64 r = residue(u, w);
  if (r == 0) throw Error(Errc::NotAUnit, "unit vanishes at " + w.str());
  i64 h = powmod(primitive_root(q), static_cast<u64>((q - 1) / ell), q);
  i64 t = powmod(r, static_cast<u64>((q - 1) / ell), q);
  return static_cast<i64>(bsgs_dlog(MulModGroup{q}, h, t, static_cast<u64>(ell)));
}

/// dim_F_ell of the ray class group modulo `modulus`, tensored with F_ell:
/// the active local factors of (O_K/m)^* modulo the image of <-1, eps>.
inline i64 ray_class_ell_rank(const RealQuadField& K, i64 ell, const std::vector<std::pair<Place, int>>& modulus) {
  if (K.class_number() % ell == 0) {
    throw Error(Errc::ClassNumberDivisible, std::to_string(ell) + " divides h_K = " + std::to_string(K.class_number()));
  }
  BigInt big_mod = 1;
  for (const auto& [w, e] : modulus) big_mod *= (w.q == ell ? BigInt(ell) * ell : BigInt(w.q));
  const QuadInt eps = K.fundamental_unit_mod(big_mod == 1 ? BigInt(1) << 64 : big_mod * 4);
  const QuadInt minus_one = QuadInt::rational(-1, K.D());
  std::vector<i64> row_eps, row_minus;
  for (const auto& [w, e] : modulus) {
    auto ce = ray_local_coordinate(eps, w, e, ell);
    if (!ce) continue;
    row_eps.push_back(*ce);
    row_minus.push_back(*ray_local_coordinate(minus_one, w, e, ell));
  }
  if (row_eps.empty()) return 0;
  const i64 active = static_cast<i64>(row_eps.size());
  return active - static_cast<i64>(rank_mod_ell({row_minus, row_eps}, ell));
}

}  // namespace sigcalc
