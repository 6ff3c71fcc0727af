#include <gtest/gtest.h>

#include <cmath>

#include "ec_oracles.hpp"
#include "sigcalc/ecsig.hpp"

using namespace sigcalc;

namespace {

const FpCurve kF7(7, 0, 3);
const FpPoint kQ7 = FpPoint::at(1, 2);
const FpPoint kR7 = FpPoint::at(6, 3);

// m with m*Q = R by walking the point list oracle
i64 walk_log(const FpCurve& E, const FpPoint& Q, const FpPoint& R, i64 ell) {
  oracle::SmallPoint acc, q{Q.x, Q.y, false};
  for (i64 m = 0; m < ell; ++m) {
    if ((acc.inf && R.inf) || (!acc.inf && !R.inf && acc.x == R.x && acc.y == R.y)) return m;
    acc = oracle::add(acc, q, E.a, E.p);
  }
  return -1;
}

const EcSignatureInstance& fixture() {
  static const EcSignatureInstance inst = lift_ec_instance(kF7, kQ7, kR7, 13, 0);
  return inst;
}

}  // namespace

TEST(EcLift, DegenerateTarget) {
  try {
    lift_ec_instance(kF7, kQ7, FpPoint::infinity(), 13, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateTarget);
  }
  EXPECT_THROW(lift_ec_instance(kF7, kQ7, kR7, 11, 0), Error);  // #E~ is 13
}

TEST(EcLift, FixtureCertificates) {
  const auto& inst = fixture();
  EXPECT_EQ(ec_scalar_mul(2, kQ7, kF7), kR7);
  EXPECT_EQ(inst.E.reduce(7), kF7);
  EXPECT_TRUE(inst.E.good_at(13));
  EXPECT_NE(ec_group_order(inst.E.reduce(13)) % 13, 0u);
  EXPECT_EQ(splitting_type(7, inst.D), SplitType::Split);
  EXPECT_EQ(splitting_type(13, inst.D), SplitType::Split);
  EXPECT_NE(inst.certificate_det(), 0);
  EXPECT_TRUE(inst.sha_assumption);
  // R lies on E over K
  QuadInt lhs = inst.R.y * inst.R.y;
  QuadInt rhs = inst.R.x * inst.R.x * inst.R.x + QuadInt::rational(inst.E.a, inst.D) * inst.R.x + QuadInt::rational(inst.E.b, inst.D);
  EXPECT_EQ(lhs, rhs);
}

TEST(EcLift, OutputsReduceToInputs) {
  for (u64 seed = 0; seed < 10; ++seed) {
    for (i64 k : {1, 2, 5, 12}) {
      FpPoint Rt = ec_scalar_mul(k, kQ7, kF7);
      auto inst = lift_ec_instance(kF7, kQ7, Rt, 13, seed);
      EXPECT_EQ(detail::reduce_point(inst.Q, inst.v), kQ7);
      EXPECT_EQ(detail::reduce_point(inst.R, inst.v), Rt);
      EXPECT_GE(inst.r, static_cast<i64>(seed));
      EXPECT_NE(inst.certificate_det(), 0);
    }
  }
}

TEST(EcLift, ConjugatePlacesNegateR) {
  // Q is rational, so its classes agree at u and u'; R's are opposite
  for (u64 seed = 0; seed < 5; ++seed) {
    auto inst = lift_ec_instance(kF7, kQ7, kR7, 13, seed);
    EXPECT_EQ(inst.certificate[0][0], inst.certificate[0][1]);
    EXPECT_EQ(mod(inst.certificate[1][0] + inst.certificate[1][1], 13), 0);
  }
}

TEST(SignatureFromEcdl, SatisfiesRelationWithIndependentParts) {
  for (u64 seed = 0; seed < 6; ++seed) {
    for (i64 k = 1; k < 13; ++k) {
      FpPoint Rt = ec_scalar_mul(k, kQ7, kF7);
      auto inst = lift_ec_instance(kF7, kQ7, Rt, 13, seed);
      i64 m = walk_log(kF7, kQ7, Rt, 13);
      ASSERT_EQ(m, k);
      i64 n = mulmod(local_class(inst.E, inst.R, inst.u).c, invmod(local_class(inst.E, inst.Q, inst.u).c, 13), 13);
      auto sig = signature_from_ecdl(inst, bsgs_ecdl_oracle());
      EXPECT_EQ(mod(m + mulmod(n, sig.alpha, 13) + sig.beta, 13), 0);
      // closed form for this construction: alpha = -(m+n)/(2n), beta = (n-m)/2
      i64 half = invmod(2, 13);
      EXPECT_EQ(sig.alpha, mod(-mulmod(mulmod(m + n, half, 13), invmod(n, 13), 13), 13));
      EXPECT_EQ(sig.beta, mulmod(mod(n - m, 13), half, 13));
    }
  }
}

TEST(SignatureFromEcdl, RhoChoices) {
  auto c = ec_coordinates(fixture(), 2);
  EXPECT_EQ(c.a_v, 1);
  EXPECT_EQ(c.a_u, 1);
  EXPECT_EQ(c.b_uc, 1);
  EXPECT_EQ(c.b_v, 2);
}

TEST(SignatureFromEcdl, WrongOracleIsCaught) {
  EcdlOracle liar = [](const FpCurve&, const FpPoint&, const FpPoint&) { return i64{5}; };
  try {
    signature_from_ecdl(fixture(), liar);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OracleInconsistent);
  }
}

TEST(EcdlFromSignature, FixtureRecoversTwo) {
  const auto& inst = fixture();
  EcSignatureOracle via_ecdl = [](const EcSignatureInstance& i) { return signature_from_ecdl(i, bsgs_ecdl_oracle()); };
  EXPECT_EQ(ecdl_from_signature(inst, via_ecdl), 2);

  EcSignatureOracle wrong = [](const EcSignatureInstance& i) {
    auto s = signature_from_ecdl(i, bsgs_ecdl_oracle());
    s.beta = mod(s.beta + 1, i.ell);
    return s;
  };
  try {
    ecdl_from_signature(inst, wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::VerificationFailed);
  }
}

TEST(EcdlFromSignature, EqualPointsGiveOne) {
  // R = Q literally: n = 1 and any (alpha, beta) with 1 + alpha + beta = 0
  const auto& base = fixture();
  auto inst = make_ec_instance(kF7, kQ7, kQ7, 13, base.E, base.D, base.Q, base.Q, *base.v.root_label, *base.u.root_label);
  EXPECT_EQ(ec_n(inst), 1);
  EXPECT_EQ(inst.certificate_det(), 0);
  // 1 + 5 + 7 = 0 mod 13
  EcSignatureOracle stub = [](const EcSignatureInstance&) { return EcSignature{5, 7, EcSignatureProvenance::External}; };
  EXPECT_EQ(ecdl_from_signature(inst, stub), 1);
}

TEST(EcdlFromSignature, RoundTripMatchesBsgs) {
  EcSignatureOracle via_ecdl = [](const EcSignatureInstance& i) { return signature_from_ecdl(i, bsgs_ecdl_oracle()); };
  for (u64 t = 0; t < 20; ++t) {
    i64 k = 1 + static_cast<i64>(stream_below(42, t, 12));
    FpPoint Rt = ec_scalar_mul(k, kQ7, kF7);
    auto inst = lift_ec_instance(kF7, kQ7, Rt, 13, t);
    EXPECT_EQ(ecdl_from_signature(inst, via_ecdl), static_cast<i64>(ecdl_bsgs(kF7, kQ7, Rt, 13)));
  }
}

TEST(EcdlFromSignature, LargerPrimeOrderCurves) {
  EcSignatureOracle via_ecdl = [](const EcSignatureInstance& i) { return signature_from_ecdl(i, bsgs_ecdl_oracle()); };
  int done = 0;
  for (i64 p : {103, 1021, 4093, 16381}) {
    FpCurve E = find_prime_order_curve(p, 1, 3);
    i64 ell = static_cast<i64>(ec_group_order(E));
    i64 x = 1;
    while (!lift_x(E, x)) ++x;
    FpPoint Q = *lift_x(E, x);
    for (u64 t = 0; t < 3; ++t) {
      i64 k = 1 + static_cast<i64>(stream_below(static_cast<u64>(p), t, static_cast<u64>(ell - 1)));
      FpPoint R = ec_scalar_mul(k, Q, E);
      auto inst = lift_ec_instance(E, Q, R, ell, t);
      EXPECT_EQ(ecdl_from_signature(inst, via_ecdl), k) << p;
      auto sig = signature_from_ecdl(inst, bsgs_ecdl_oracle());
      EXPECT_EQ(mod(k + mulmod(ec_n(inst), sig.alpha, ell) + sig.beta, ell), 0);
      ++done;
    }
  }
  EXPECT_EQ(done, 12);
}

TEST(Coker, ZeroOneTwo) {
  for (u64 seed = 0; seed < 5; ++seed) {
    auto inst = lift_ec_instance(kF7, kQ7, kR7, 13, seed);
    EXPECT_EQ(coker_dim(inst, {}), 0);
    EXPECT_EQ(coker_dim(inst, {inst.v}), 1);
    EXPECT_EQ(coker_dim(inst, {inst.v, inst.v_conj}), 2);
    auto rep = coker_report(inst, {inst.v, inst.v_conj});
    EXPECT_EQ(rep.local_dim, 4);
    EXPECT_EQ(rep.rank, 2);
  }
}

TEST(Coker, BadPlacesPassTheProxyOrAreFlagged) {
  const auto& inst = fixture();
  for (i64 q : {2, 3}) {
    for (const auto& w : split_places(q, inst.D)) {
      if (w.residue_degree() != 1) continue;
      try {
        EXPECT_EQ(coker_dim(inst, {w}), 0);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::AssumptionViolated);
      }
    }
  }
}

TEST(TorsionScan, NormsAndEnumeration) {
  const auto& inst = fixture();
  const double bound = std::pow(std::sqrt(13.0) - 1.0, 2);
  auto hits = scan_torsion_places(inst.E, inst.D, 13, 200);
  for (const auto& h : hits) {
    EXPECT_GE(static_cast<double>(h.w.norm()), bound);
    EXPECT_EQ(h.order % 13, 0u);
  }
  EXPECT_TRUE(scan_torsion_places(inst.E, inst.D, 13, 6).empty());
  // exhaustive cross-check of every good q <= 200
  std::size_t expected = 0;
  for (i64 q : primes_up_to(200)) {
    if (!inst.E.good_at(q)) continue;
    i64 b = static_cast<i64>(bmod(inst.E.b, q));
    if (oracle::all_points(0, b, q).size() % 13 != 0) continue;
    for (const auto& w : split_places(q, inst.D)) {
      if (w.residue_degree() == 1) ++expected;
    }
  }
  EXPECT_EQ(hits.size(), expected);
}
