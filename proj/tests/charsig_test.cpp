#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sigcalc/charsig.hpp"

using namespace sigcalc;

namespace {

DlOracle brute_oracle() {
  return [](i64 g, i64 t, i64 p) { return static_cast<u64>(*oracle::dlog(g, t, p)); };
}

const CharSignatureInstance& worked_instance() {
  static const CharSignatureInstance inst = lift_unit(17, 31, 5, 0, 3);
  return inst;
}

// (p, ell) pairs small enough for exhaustive logarithms
const std::vector<std::pair<i64, i64>> kSmallPairs = {{31, 5}, {61, 5}, {71, 7}, {103, 17}, {211, 7}, {331, 11}, {1009, 7}};

}  // namespace

TEST(LiftUnit, WorkedExample) {
  LiftStats st;
  auto inst = lift_unit(17, 31, 5, 0, 3, 10'000, &st);
  EXPECT_EQ(st.attempts, 3u);
  EXPECT_EQ(st.rejections["1+d^2 not a nonzero square mod ell"], 2u);
  EXPECT_EQ(inst.D(), 4226);
  EXPECT_EQ(inst.alpha, QuadInt::from_sqrt_form(65, 1, 4226));
  EXPECT_EQ(inst.alpha.norm(), -1);
  EXPECT_EQ(inst.a, 17);
  EXPECT_EQ(*inst.v.root_label, 14);
  EXPECT_EQ(*inst.u.root_label, 1);
  EXPECT_EQ(*inst.u_conj.root_label, 4);
  EXPECT_TRUE(inst.conditions.all());
  EXPECT_EQ(inst.conditions.class_number, oracle::class_number_analytic(4226));
}

TEST(LiftUnit, DegenerateTargets) {
  for (i64 a : {1, 30}) {
    try {
      lift_unit(a, 31, 5, 0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::DegenerateTarget);
    }
  }
  EXPECT_THROW(lift_unit(5, 31, 5, 0), Error);  // 5 = 3^20 is a fifth power
}

TEST(LiftUnit, OutputsAreUnitsReducingToTarget) {
  for (auto [p, ell] : kSmallPairs) {
    i64 g = primitive_root(p);
    int made = 0;
    for (i64 a = 2; a < p && made < 8; ++a) {
      if (a == p - 1 || powmod(a, static_cast<u64>((p - 1) / ell), p) == 1) continue;
      if (mulmod(a, a, p) == p - 1) continue;
      auto inst = lift_unit(a, p, ell, static_cast<u64>(a % 3), g);
      EXPECT_EQ(inst.alpha.norm(), -1);
      EXPECT_EQ(residue(inst.alpha, inst.v), a);
      EXPECT_TRUE(inst.conditions.all());
      ++made;
    }
  }
}

TEST(Conditions, Examples) {
  const auto& inst = worked_instance();
  EXPECT_TRUE(inst.conditions.nonresidue_at_v);
  EXPECT_EQ(powmod(17, 6, 31), 8);

  auto fifth = make_char_instance(31, 5, 3, 4226, qpow(inst.alpha, 5), 14, 1);
  EXPECT_FALSE(fifth.conditions.y_nonzero_at_u);
  EXPECT_FALSE(fifth.conditions.y_nonzero_at_u_conj);

  // Q(sqrt 79) has class number 3
  auto [eps, norm] = fundamental_unit(79);
  i64 p = 0;
  for (i64 q = 7;; q += 6) {
    if (is_prime(static_cast<u64>(q)) && splitting_type(q, 79) == SplitType::Split) {
      p = q;
      break;
    }
  }
  auto w = split_places(p, 79);
  auto u = split_places(3, 79);
  auto bad = make_char_instance(p, 3, primitive_root(p), 79, eps, *w[0].root_label, *u[0].root_label);
  EXPECT_EQ(bad.conditions.class_number, 3);
  EXPECT_FALSE(bad.conditions.class_number_coprime);
  EXPECT_FALSE(bad.conditions.all());
}

TEST(SignatureFromDl, WorkedExample) {
  const auto& inst = worked_instance();
  auto sig = signature_from_dl(inst, brute_oracle());
  EXPECT_EQ(*sig.m, 2);
  EXPECT_EQ(sig.y, 3);
  EXPECT_EQ(sig.s, 1);
  EXPECT_EQ(embed(inst.alpha, inst.u, 2).value, 16);

  auto other = make_char_instance(31, 5, 3, 4226, inst.alpha, 14, 4);
  EXPECT_EQ(embed(other.alpha, other.u, 2).value, 14);
  auto sig2 = signature_from_dl(other, brute_oracle());
  EXPECT_EQ(sig2.y, 2);
  EXPECT_EQ(sig2.s, 4);
}

TEST(SignatureFromDl, WrongOracleIsCaught) {
  DlOracle liar = [](i64, i64, i64) { return u64{1}; };
  try {
    signature_from_dl(worked_instance(), liar);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OracleInconsistent);
  }
}

TEST(DlFromSignature, Examples) {
  int calls = 0;
  SignatureOracle one = [&](const CharSignatureInstance&) {
    ++calls;
    return i64{1};
  };
  EXPECT_EQ(dl_from_signature(17, 3, 31, 5, one, 0), 2);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(dl_from_signature(5, 3, 31, 5, one, 0), 0);
  EXPECT_EQ(dl_from_signature(1, 3, 31, 5, one, 0), 0);
  EXPECT_EQ(dl_from_signature(30, 3, 31, 5, one, 0), 0);
  EXPECT_EQ(calls, 1);
}

TEST(DlFromSignature, RoundTripThroughDlOracle) {
  for (auto [p, ell] : kSmallPairs) {
    i64 g = primitive_root(p);
    SignatureOracle sig = [](const CharSignatureInstance& inst) { return signature_from_dl(inst, brute_oracle()).s; };
    for (u64 t = 0; t < 15; ++t) {
      i64 a = 2 + static_cast<i64>(stream_below(p, t, static_cast<u64>(p - 3)));
      if (mulmod(a, a, p) == p - 1) continue;
      EXPECT_EQ(dl_from_signature(a, g, p, ell, sig, t), *oracle::dlog(g, a, p) % ell) << p << " " << a;
    }
  }
}

TEST(SignatureIndexCalculus, Examples) {
  EXPECT_THROW(signature_index_calculus(worked_instance(), 1, 0), Error);
  auto r = signature_index_calculus_detailed(worked_instance(), 60, 0);
  EXPECT_EQ(r.signature.s, 1);
  EXPECT_EQ(r.signature.provenance, SignatureProvenance::IndexCalculus);
}

TEST(SignatureIndexCalculus, UnitBetaSolvesAtOnce) {
  // a beta that is a unit and equals g at v: alpha^k with g = a^k
  const auto& base = worked_instance();
  auto inst = make_char_instance(31, 5, 17, 4226, base.alpha, 14, 1);
  SignatureRelationBuilder builder(inst, 10);
  // beta = alpha = 65 + sqrt(4226), which is g = 17 at v
  auto rel = builder.relation({1, 65});
  ASSERT_TRUE(rel);
  ASSERT_EQ(rel->terms.size(), 1u);
  EXPECT_EQ(rel->terms[0].first, builder.s_column());
  auto sol = solve_linear_mod_ell({*rel}, builder.columns(), 5);
  EXPECT_EQ(sol.values[builder.s_column()], signature_from_dl(inst, brute_oracle()).s);
}

TEST(SignatureIndexCalculus, AgreesWithDlPath) {
  for (auto [p, ell] : kSmallPairs) {
    i64 g = primitive_root(p);
    int done = 0;
    for (i64 a = 2; a < p && done < 4; ++a) {
      if (a == p - 1 || powmod(a, static_cast<u64>((p - 1) / ell), p) == 1 || mulmod(a, a, p) == p - 1) continue;
      auto inst = lift_unit(a, p, ell, 0, g);
      auto via_dl = signature_from_dl(inst, brute_oracle());
      auto via_ic = signature_index_calculus_detailed(inst, 300, static_cast<u64>(a));
      EXPECT_EQ(via_ic.signature.s, via_dl.s) << p << " " << a << " D=" << inst.D();
      EXPECT_NE(via_ic.signature.s, 0);
      ++done;
    }
  }
}

TEST(SignatureIndexCalculus, SolvedValuesSatisfyReciprocityElsewhere) {
  // Elements that were never sampled (any residue at v) must still satisfy
  // theta(x mod v) + y_x*s + sum e_w x_w = 0 with the solved values.
  const auto& inst = worked_instance();
  auto res = signature_index_calculus_detailed(inst, 60, 4);
  const i64 s = res.signature.s, ell = inst.ell;
  int compared = 0;
  for (i64 b = -3; b <= 3; ++b) {
    for (i64 a = -300; a <= 300; ++a) {
      QuadInt x{a, b, inst.D()};
      if (x.is_zero() || embed(x, inst.u, 1).value == 0 || residue(x, inst.v) == 0) continue;
      std::vector<std::pair<Place, int>> f;
      try {
        f = factor_principal(x, 60);
      } catch (const NotSmoothError&) {
        continue;
      }
      i64 sum = mod(*oracle::dlog(inst.g, residue(x, inst.v), inst.p) + mulmod(inst.y_at(x, inst.u), s, ell), ell);
      bool known = true;
      for (auto& [w, e] : f) {
        auto it = res.place_values.find(w);
        if (it == res.place_values.end() || !it->second) {
          known = false;
          break;
        }
        sum = mod(sum + e * *it->second, ell);
      }
      if (!known) continue;
      EXPECT_EQ(sum, 0) << x.str();
      ++compared;
    }
  }
  EXPECT_GT(compared, 20);
}

TEST(SignatureIndexCalculus, InvariantUnderPowersOfAlpha) {
  for (auto [p, ell] : kSmallPairs) {
    i64 g = primitive_root(p);
    i64 a = 2;
    while (a == p - 1 || powmod(a, static_cast<u64>((p - 1) / ell), p) == 1 || mulmod(a, a, p) == p - 1) ++a;
    auto inst = lift_unit(a, p, ell, 0, g);
    i64 s = signature_from_dl(inst, brute_oracle()).s;
    for (u64 k : {2u, 3u}) {
      if (static_cast<i64>(k) % ell == 0) continue;
      for (int sign : {1, -1}) {
        QuadInt x = qpow(inst.alpha, k);
        if (sign < 0) x = -x;
        auto other = make_char_instance(p, ell, g, inst.D(), x, *inst.v.root_label, *inst.u.root_label);
        ASSERT_TRUE(other.conditions.all());
        EXPECT_EQ(signature_from_dl(other, brute_oracle()).s, s);
        EXPECT_EQ(signature_index_calculus(other, 300, k).s, s);
      }
    }
  }
}

TEST(SignatureIndexCalculus, DeterministicInSeed) {
  const auto& inst = worked_instance();
  auto r1 = signature_index_calculus_detailed(inst, 60, 9);
  auto r2 = signature_index_calculus_detailed(inst, 60, 9);
  EXPECT_EQ(r1.stats.attempts, r2.stats.attempts);
  EXPECT_EQ(r1.stats.relations, r2.stats.relations);
  EXPECT_EQ(r1.signature.s, r2.signature.s);
}
