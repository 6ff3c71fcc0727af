#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sigcalc/arith.hpp"
#include "sigcalc/bsgs.hpp"

using namespace sigcalc;

TEST(HenselSqrt, Examples) {
  EXPECT_EQ(hensel_sqrt(1, 7, 3).value, 1);
  EXPECT_EQ(hensel_sqrt(1, 13, 1).value, 1);
  EXPECT_EQ(hensel_sqrt(4, 5, 3).value, 2);
  // one Hensel step from 3^2 = 2 mod 7
  auto r = hensel_sqrt(2, 7, 2);
  EXPECT_EQ(r.value, 10);
  EXPECT_EQ(r.prime, 7);
  EXPECT_EQ(r.precision, 2u);
}

TEST(HenselSqrt, MatchesExhaustiveRoots) {
  for (i64 q : {3, 5, 7, 11, 13}) {
    for (unsigned k = 1; k <= 3; ++k) {
      i64 qk = ipow(q, k);
      for (i64 n = 1; n < 3 * q; ++n) {
        if (n % q == 0) continue;
        auto roots = oracle::sqrts(n, qk);
        if (roots.empty()) {
          EXPECT_THROW(hensel_sqrt(n, q, k), Error);
          continue;
        }
        auto x = hensel_sqrt(n, q, k);
        i64 v = static_cast<i64>(x.value);
        EXPECT_NE(std::find(roots.begin(), roots.end(), v), roots.end());
        i64 base = v % q;
        EXPECT_GE(base, 1);
        EXPECT_LE(base, (q - 1) / 2);
      }
    }
  }
}

TEST(HenselSqrt, Errors) {
  try {
    hensel_sqrt(3, 7, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonResidue);
  }
  try {
    hensel_sqrt(14, 7, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Ramified);
  }
}

TEST(HenselSqrt, PropertyRandom) {
  std::mt19937_64 rng(11);
  const i64 primes[] = {3, 5, 7, 11, 13, 101, 1009, 65537};
  for (int trial = 0; trial < 300; ++trial) {
    i64 q = primes[rng() % 8];
    unsigned k = 1 + rng() % 6;
    i64 x = 1 + static_cast<i64>(rng() % static_cast<u64>(q - 1));
    BigInt n = BigInt(x) * x + BigInt(q) * static_cast<i64>(rng() % 1000);
    auto r = hensel_sqrt(n, q, k);
    EXPECT_EQ(bmod(r.value * r.value - n, r.modulus()), 0);
  }
}

TEST(Teichmuller, Examples) {
  EXPECT_EQ(teichmuller(i64{1}, 5), (TeichmullerDecomp{1, 0}));
  EXPECT_EQ(teichmuller(i64{6}, 5), (TeichmullerDecomp{1, 1}));
  EXPECT_EQ(teichmuller(i64{8}, 7), (TeichmullerDecomp{1, 1}));
  EXPECT_EQ(teichmuller(i64{2}, 5), (TeichmullerDecomp{7, 2}));
  EXPECT_EQ(teichmuller(i64{16}, 5), (TeichmullerDecomp{1, 3}));
  EXPECT_EQ(teichmuller(i64{14}, 5), (TeichmullerDecomp{24, 2}));
  EXPECT_THROW(teichmuller(i64{10}, 5), Error);
}

TEST(Teichmuller, RoundTripAndLogProperty) {
  for (i64 ell : {3, 5, 7, 11, 13, 101}) {
    const i64 l2 = ell * ell;
    for (i64 x = 1; x < l2; ++x) {
      if (x % ell == 0) continue;
      auto d = teichmuller(x, ell);
      EXPECT_EQ(powmod(d.xi, static_cast<u64>(ell - 1), l2), 1);
      EXPECT_EQ(mulmod(d.xi, 1 + d.y * ell, l2), x);
      EXPECT_GE(d.y, 0);
      EXPECT_LT(d.y, ell);
    }
    std::mt19937_64 rng(static_cast<u64>(ell));
    for (int t = 0; t < 200; ++t) {
      i64 a = 1 + static_cast<i64>(rng() % static_cast<u64>(l2 - 1));
      i64 b = 1 + static_cast<i64>(rng() % static_cast<u64>(l2 - 1));
      if (a % ell == 0 || b % ell == 0) continue;
      EXPECT_EQ(mod(teichmuller(mulmod(a, b, l2), ell).y, ell),
                mod(teichmuller(a, ell).y + teichmuller(b, ell).y, ell));
    }
  }
}

TEST(Bsgs, Examples) {
  MulModGroup g31{31};
  EXPECT_EQ(bsgs_dlog(g31, 3, 1, 30), 0u);
  EXPECT_EQ(bsgs_dlog(g31, 3, 3, 30), 1u);
  EXPECT_EQ(bsgs_dlog(g31, 3, 17, 30), 7u);
  EXPECT_EQ(oracle::dlog(3, 17, 31).value(), 7);
}

TEST(Bsgs, MatchesExhaustivePowering) {
  std::mt19937_64 rng(5);
  for (i64 p : {31, 101, 1009, 10007}) {
    i64 g = primitive_root(p);
    BsgsTable<MulModGroup> table(MulModGroup{p}, g, static_cast<u64>(p - 1));
    for (int t = 0; t < 50; ++t) {
      i64 m = static_cast<i64>(rng() % static_cast<u64>(p - 1));
      i64 target = powmod(g, static_cast<u64>(m), p);
      EXPECT_EQ(table.log(target), static_cast<u64>(m));
      EXPECT_EQ(static_cast<i64>(table.log(target)), oracle::dlog(g, target, p).value());
    }
  }
}

TEST(Bsgs, NotInSubgroup) {
  // 2 has order 5 mod 31 (2^5 = 32); 3 is a generator, so not in <2>
  try {
    bsgs_dlog(MulModGroup{31}, 2, 3, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotInSubgroup);
  }
}

TEST(EllPowerResidue, Examples) {
  EXPECT_TRUE(ell_power_residue_test(1, 31, 5));
  EXPECT_FALSE(ell_power_residue_test(2, 31, 5));
  EXPECT_EQ(powmod(3, 5, 31), 26);
  EXPECT_TRUE(ell_power_residue_test(26, 31, 5));
  EXPECT_THROW(ell_power_residue_test(2, 31, 7), Error);
}

TEST(EllPowerResidue, AgreesWithImageOfEllPowering) {
  for (auto [p, ell] : {std::pair<i64, i64>{31, 5}, {61, 3}, {43, 7}, {1321, 11}}) {
    std::vector<bool> is_power(static_cast<std::size_t>(p), false);
    for (i64 x = 1; x < p; ++x) is_power[static_cast<std::size_t>(powmod(x, static_cast<u64>(ell), p))] = true;
    for (i64 a = 1; a < p; ++a) EXPECT_EQ(ell_power_residue_test(a, p, ell), is_power[static_cast<std::size_t>(a)]);
  }
}

TEST(FactorSmooth, Examples) {
  EXPECT_TRUE(factor_smooth(1, 5).empty());
  EXPECT_EQ(factor_smooth(12, 5), (Factorization{{2, 2}, {3, 1}}));
  try {
    factor_smooth(14, 5);
    FAIL();
  } catch (const NotSmoothError& e) {
    EXPECT_EQ(e.cofactor(), "7");
  }
}

TEST(FactorSmooth, ReassemblesInput) {
  auto primes = primes_up_to(50);
  for (u64 n = 1; n < 5000; ++n) {
    auto f = try_factor_smooth(n, primes);
    u64 back = 1;
    bool smooth = true;
    u64 m = n;
    for (u64 p = 2; p <= m; ++p) {
      while (m % p == 0) {
        if (p > 50) smooth = false;
        m /= p;
      }
    }
    EXPECT_EQ(f.has_value(), smooth) << n;
    if (!f) continue;
    for (auto [p, e] : *f) {
      for (int i = 0; i < e; ++i) back *= p;
    }
    EXPECT_EQ(back, n);
  }
}

TEST(SquarefreeDecompose, Reassembles) {
  for (u64 n : {1ull, 2ull, 4ull, 12ull, 4226ull, 1157ull, 999999000001ull, 1000000007ull * 1000000007ull,
                72ull * 1000003ull * 1000003ull}) {
    auto [k, f] = squarefree_decompose(n);
    EXPECT_EQ(k * f * f, n);
    auto fk = factor(k);
    for (auto [p, e] : fk) EXPECT_EQ(e, 1) << n;
  }
}

TEST(Kronecker, AgreesWithLegendre) {
  for (i64 p : {3, 5, 7, 11, 13, 31}) {
    for (i64 a = -40; a < 40; ++a) EXPECT_EQ(kronecker(a, p), legendre(a, p));
  }
  EXPECT_EQ(kronecker(5, 2), -1);
  EXPECT_EQ(kronecker(17, 2), 1);
  EXPECT_EQ(kronecker(8, 2), 0);
}

TEST(Streams, PureFunctionOfSeedAndIndex) {
  EXPECT_EQ(stream_value(7, 3), stream_value(7, 3));
  EXPECT_NE(stream_value(7, 3), stream_value(7, 4));
  EXPECT_NE(stream_value(7, 3), stream_value(8, 3));
}
