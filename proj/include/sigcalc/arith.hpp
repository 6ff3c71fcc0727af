#pragma once

// Exact modular and p-adic primitives shared by every other header.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sigcalc/error.hpp"

namespace sigcalc {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// word-size modular arithmetic

/// Least non-negative residue of a mod m (m > 0).
inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mod(i128 a, i64 m) {
  i128 r = a % m;
  return static_cast<i64>(r < 0 ? r + m : r);
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  return mod(static_cast<i128>(a) * b, m);
}

inline i64 powmod(i64 base, u64 e, i64 m) {
  if (m == 1) return 0;
  i64 result = 1;
  i64 b = mod(base, m);
  while (e) {
    if (e & 1) result = mulmod(result, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return result;
}

/// Inverse of a mod m; throws NotAUnit when gcd(a, m) != 1.
inline i64 invmod(i64 a, i64 m) {
  i64 old_r = mod(a, m), r = m;
  i64 old_s = 1, s = 0;
  while (r != 0) {
    i64 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  if (old_r != 1) throw Error(Errc::NotAUnit, std::to_string(a) + " mod " + std::to_string(m));
  return mod(old_s, m);
}

inline i64 ipow(i64 base, unsigned e) {
  i64 r = 1;
  while (e--) r *= base;
  return r;
}

inline u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline u128 isqrt(u128 n) {
  if (n < (static_cast<u128>(1) << 64)) return isqrt(static_cast<u64>(n));
  u128 r = static_cast<u128>(__builtin_sqrtl(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline u64 icbrt(u64 n) {
  u64 r = static_cast<u64>(__builtin_cbrtl(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_square(u64 n) {
  u64 r = isqrt(n);
  return r * r == n;
}

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// primes

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  auto mul = [n](u64 a, u64 b) { return static_cast<u64>(static_cast<u128>(a) * b % n); };
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = 1, b = a, e = d;
    while (e) {
      if (e & 1) x = mul(x, b);
      b = mul(b, b);
      e >>= 1;
    }
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul(x, x);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline std::vector<i64> primes_up_to(i64 n) {
  std::vector<i64> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  for (i64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

inline i64 next_prime(i64 n) {
  if (n <= 2) return 2;
  while (!is_prime(static_cast<u64>(n))) ++n;
  return n;
}

using Factorization = std::map<u64, int>;

/// Complete factorization by trial division; intended for n below ~10^14.
inline Factorization factor(u64 n) {
  Factorization f;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

/// Factors n over the primes <= bound; throws NotSmooth with the cofactor
/// when a prime above the bound survives.
inline Factorization factor_smooth(u64 n, u64 bound) {
  if (n == 0) throw Error(Errc::BadInput, "factor_smooth of 0");
  Factorization f;
  for (u64 p = 2; p <= bound && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) {
    if (n > bound) throw NotSmoothError(std::to_string(n));
    ++f[n];
  }
  return f;
}

/// Same, against a precomputed ascending prime list. Returns nullopt
/// instead of throwing; used on hot sampling paths.
inline std::optional<Factorization> try_factor_smooth(u128 n, const std::vector<i64>& primes) {
  Factorization f;
  for (i64 p : primes) {
    if (static_cast<u128>(p) * p > n) break;
    while (n % static_cast<u128>(p) == 0) {
      ++f[static_cast<u64>(p)];
      n /= static_cast<u128>(p);
    }
  }
  if (n > 1) {
    if (primes.empty() || n > static_cast<u128>(primes.back())) return std::nullopt;
    ++f[static_cast<u64>(n)];
  }
  return f;
}

/// Writes n = f^2 * kernel with kernel squarefree. Trial division up to
/// cbrt(n) leaves a cofactor with at most two prime factors, which is
/// either a prime square or squarefree.
inline std::pair<u64, u64> squarefree_decompose(u64 n) {
  if (n == 0) throw Error(Errc::BadInput, "squarefree_decompose of 0");
  u64 kernel = 1, f = 1;
  u64 limit = icbrt(n) + 1;
  for (u64 p = 2; p <= limit && p * p <= n; p += (p == 2 ? 1 : 2)) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) f *= p;
    if (e % 2) kernel *= p;
  }
  if (n > 1) {
    u64 r = isqrt(n);
    if (r * r == n) {
      f *= r;
    } else {
      kernel *= n;
    }
  }
  return {kernel, f};
}

inline bool is_squarefree(u64 n) { return squarefree_decompose(n).second == 1; }

/// Least primitive root modulo an odd prime p.
inline i64 primitive_root(i64 p) {
  if (p == 2) return 1;
  auto f = factor(static_cast<u64>(p - 1));
  for (i64 g = 2; g < p; ++g) {
    bool ok = true;
    for (auto [q, e] : f) {
      if (powmod(g, static_cast<u64>((p - 1) / static_cast<i64>(q)), p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw Error(Errc::BadInput, "no primitive root modulo " + std::to_string(p));
}

// ---------------------------------------------------------------------------
// residue symbols and square roots

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(i64 a, i64 p) {
  a = mod(a, p);
  if (a == 0) return 0;
  return powmod(a, static_cast<u64>((p - 1) / 2), p) == 1 ? 1 : -1;
}

/// Kronecker symbol (a/n) for n > 0.
inline int kronecker(i64 a, i64 n) {
  if (n <= 0) throw Error(Errc::BadInput, "kronecker needs n > 0");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    if (a % 2 == 0) return 0;
    i64 r = mod(a, 8);
    if (r == 3 || r == 5) result = -result;
  }
  a = mod(a, n);
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      i64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a = mod(a, n);
  }
  return n == 1 ? result : 0;
}

/// Tonelli-Shanks; returns the root in [0, p/2].
inline i64 sqrt_mod_prime(i64 n, i64 p) {
  n = mod(n, p);
  if (n == 0) return 0;
  if (p == 2) return n;
  if (legendre(n, p) != 1) throw Error(Errc::NonResidue, std::to_string(n) + " mod " + std::to_string(p));
  i64 q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  i64 z = 2;
  while (legendre(z, p) != -1) ++z;
  i64 m = s;
  i64 c = powmod(z, static_cast<u64>(q), p);
  i64 t = powmod(n, static_cast<u64>(q), p);
  i64 r = powmod(n, static_cast<u64>((q + 1) / 2), p);
  while (t != 1) {
    i64 i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    i64 b = c;
    for (i64 j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return std::min(r, p - r);
}

// ---------------------------------------------------------------------------
// p-adic approximations

inline BigInt bpow(const BigInt& base, unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

inline BigInt bmod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

inline BigInt binvmod(const BigInt& a, const BigInt& m) {
  BigInt old_r = bmod(a, m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw Error(Errc::NotAUnit, "element not invertible modulo " + m.str());
  return bmod(old_s, m);
}

/// Element of Z_q known modulo q^precision.
struct PadicApprox {
  i64 prime = 3;
  unsigned precision = 1;
  BigInt value = 0;

  static PadicApprox make(i64 q, unsigned k, const BigInt& v) {
    PadicApprox x{q, k, 0};
    x.value = bmod(v, x.modulus());
    return x;
  }

  BigInt modulus() const { return bpow(BigInt(prime), precision); }

  /// q-adic valuation, or nullopt when value is 0 at this precision.
  std::optional<unsigned> valuation() const {
    if (value == 0) return std::nullopt;
    unsigned e = 0;
    BigInt v = value;
    while (v % prime == 0) {
      v /= prime;
      ++e;
    }
    return e;
  }

  PadicApprox operator+(const PadicApprox& o) const { return make(prime, std::min(precision, o.precision), value + o.value); }
  PadicApprox operator-(const PadicApprox& o) const { return make(prime, std::min(precision, o.precision), value - o.value); }
  PadicApprox operator*(const PadicApprox& o) const { return make(prime, std::min(precision, o.precision), value * o.value); }

  friend bool operator==(const PadicApprox& a, const PadicApprox& b) {
    return a.prime == b.prime && a.precision == b.precision && a.value == b.value;
  }
};

/// Square root of n in Z_q to precision q^k. The base root is the one whose
/// residue mod q lies in [1, (q-1)/2].
inline PadicApprox hensel_sqrt(const BigInt& n, i64 q, unsigned k) {
  if (q < 3 || q % 2 == 0) throw Error(Errc::BadInput, "hensel_sqrt needs an odd prime");
  if (k < 1) throw Error(Errc::BadInput, "precision must be positive");
  i64 n0 = static_cast<i64>(bmod(n, q));
  if (n0 == 0) throw Error(Errc::Ramified, std::to_string(q) + " divides the radicand");
  i64 r0 = sqrt_mod_prime(n0, q);
  BigInt x = r0;
  BigInt qk = q;
  for (unsigned i = 1; i < k; ++i) {
    qk *= q;
    // x <- x - (x^2 - n) / (2x) mod q^(i+1)
    BigInt fx = bmod(x * x - n, qk);
    BigInt inv = binvmod(2 * x, qk);
    x = bmod(x - fx * inv, qk);
  }
  return PadicApprox::make(q, k, x);
}

/// x = xi * (1 + y*ell) mod ell^2 with xi^(ell-1) = 1 mod ell^2.
struct TeichmullerDecomp {
  i64 xi = 1;
  i64 y = 0;

  friend bool operator==(const TeichmullerDecomp&, const TeichmullerDecomp&) = default;
};

inline TeichmullerDecomp teichmuller(i64 x, i64 ell) {
  const i64 l2 = ell * ell;
  x = mod(x, l2);
  if (x % ell == 0) throw Error(Errc::NotAUnit, std::to_string(x) + " is divisible by " + std::to_string(ell));
  i64 xi = x;
  for (;;) {
    i64 next = powmod(xi, static_cast<u64>(ell), l2);
    if (next == xi) break;
    xi = next;
  }
  i64 one_unit = mulmod(x, invmod(xi, l2), l2);
  return {xi, (one_unit - 1) / ell};
}

inline TeichmullerDecomp teichmuller(const BigInt& x, i64 ell) {
  return teichmuller(static_cast<i64>(bmod(x, BigInt(ell) * ell)), ell);
}

/// True iff a is an ell-th power residue mod p.
inline bool ell_power_residue_test(i64 a, i64 p, i64 ell) {
  if ((p - 1) % ell != 0) throw Error(Errc::BadInput, std::to_string(ell) + " does not divide p-1");
  if (mod(a, p) == 0) throw Error(Errc::BadInput, "p divides a");
  return powmod(a, static_cast<u64>((p - 1) / ell), p) == 1;
}

// ---------------------------------------------------------------------------
// deterministic seeded streams

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Value number `index` of the stream named by `seed`; a pure function so
/// that samplers can be fanned out and merged by index.
inline u64 stream_value(u64 seed, u64 index) { return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)); }

/// Uniform-ish draw in [0, n) from the stream.
inline u64 stream_below(u64 seed, u64 index, u64 n) { return stream_value(seed, index) % n; }

/// Independent stream derived from `seed` for a named sampling stage.
inline u64 substream(u64 seed, u64 tag) { return splitmix64(seed ^ splitmix64(tag * 0xd1b54a32d192ed03ULL)); }

}  // namespace sigcalc
