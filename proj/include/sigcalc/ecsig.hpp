#pragma once

// Homogeneous-space signatures for a prime-order curve E~/F_p: lifting to a
// curve over a quadratic field, the two reductions between ECDL and the
// signature, and the cokernel dimension count behind them.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigcalc/ecurve.hpp"
#include "sigcalc/quadfield.hpp"

namespace sigcalc {

struct EcSignatureInstance {
  i64 p = 0;
  i64 ell = 0;
  FpCurve base;        // E~ over F_p, #E~ = ell
  FpPoint Qt, Rt;      // R~ = m Q~
  RationalCurve E;     // y^2 = x^3 + a x + b_r
  i64 D = 0;           // K = Q(sqrt D)
  QuadPoint Q;         // rational point over Q~
  QuadPoint R;         // (mu_r, f sqrt D) over R~
  Place u, u_conj, v, v_conj;
  u64 seed = 0;
  i64 r = 0;           // the sweep value that was accepted
  bool sha_assumption = true;  // Sha(E)[l] = 0 is assumed, never checked
  // local classes: rows Q, R; columns u, u'
  std::array<std::array<i64, 2>, 2> certificate{};

  i64 certificate_det() const {
    return mod(mulmod(certificate[0][0], certificate[1][1], ell) - mulmod(certificate[0][1], certificate[1][0], ell), ell);
  }
};

namespace detail {

inline i64 local_class_at(const EcSignatureInstance& inst, const QuadPoint& P, const Place& w) {
  return local_class(inst.E, P, w).c;
}

inline void fill_certificate(EcSignatureInstance& inst) {
  inst.certificate = {{{local_class_at(inst, inst.Q, inst.u), local_class_at(inst, inst.Q, inst.u_conj)},
                       {local_class_at(inst, inst.R, inst.u), local_class_at(inst, inst.R, inst.u_conj)}}};
}

inline FpPoint reduce_point(const QuadPoint& P, const Place& w) {
  if (P.inf) return FpPoint::infinity();
  return FpPoint::at(residue(P.x, w), residue(P.y, w));
}

inline void require_prime_order_base(const FpCurve& base, i64 ell) {
  if (ell < 3 || !is_prime(static_cast<u64>(ell))) throw Error(Errc::BadInput, "l must be an odd prime");
  if (ell == base.p) throw Error(Errc::BadInput, "anomalous curve: #E(F_p) = p");
  if (ec_group_order(base) != static_cast<u64>(ell)) throw Error(Errc::BadInput, "#E(F_p) is not l");
}

}  // namespace detail

/// Assembles an instance from explicit data and computes its certificate.
/// Q must be rational; Q and R must reduce to Q~ and R~ at v.
inline EcSignatureInstance make_ec_instance(const FpCurve& base, const FpPoint& Qt, const FpPoint& Rt, i64 ell,
                                            const RationalCurve& E, i64 D, const QuadPoint& Q, const QuadPoint& R,
                                            i64 v_root_label, i64 u_root_label, u64 seed = 0) {
  detail::require_prime_order_base(base, ell);
  EcSignatureInstance inst;
  inst.p = base.p;
  inst.ell = ell;
  inst.base = base;
  inst.Qt = Qt;
  inst.Rt = Rt;
  inst.E = E;
  inst.D = D;
  inst.Q = Q;
  inst.R = R;
  inst.seed = seed;
  if (splitting_type(base.p, D) != SplitType::Split) throw Error(Errc::BadInput, "p does not split in K");
  if (splitting_type(ell, D) != SplitType::Split) throw Error(Errc::BadInput, "l does not split in K");
  inst.v = Place{base.p, SplitType::Split, v_root_label};
  inst.v_conj = conjugate_place(inst.v);
  inst.u = Place{ell, SplitType::Split, u_root_label};
  inst.u_conj = conjugate_place(inst.u);
  if (mod(v_root_label * v_root_label - D, base.p) != 0 || mod(u_root_label * u_root_label - D, ell) != 0) {
    throw Error(Errc::BadInput, "root label is not a square root of D");
  }
  if (!Q.x.is_rational() || !Q.y.is_rational()) throw Error(Errc::BadInput, "Q must be a rational point");
  if (detail::reduce_point(Q, inst.v) != Qt) throw Error(Errc::VerificationFailed, "Q does not reduce to Q~");
  if (detail::reduce_point(R, inst.v) != Rt) throw Error(Errc::VerificationFailed, "R does not reduce to R~");
  if (E.reduce(base.p) != base) throw Error(Errc::VerificationFailed, "E does not reduce to E~");
  detail::fill_certificate(inst);
  return inst;
}

struct EcLiftStats {
  u64 attempts = 0;
  std::map<std::string, u64> rejections;

  std::string most_common() const {
    std::string best = "none";
    u64 n = 0;
    for (auto& [k, c] : rejections) {
      if (c > n) {
        best = k;
        n = c;
      }
    }
    return best;
  }
};

/// Lifts (E~, Q~, R~) to (E, K, Q, R): Q = (u, v + rp) on y^2 = x^3 + ax + b_r,
/// R = (mu + rp, f sqrt D) with D the squarefree kernel of the cubic, r
/// swept from the seed until every check passes.
inline EcSignatureInstance lift_ec_instance(const FpCurve& base, const FpPoint& Qt, const FpPoint& Rt, i64 ell, u64 seed,
                                            u64 budget = 1000, EcLiftStats* stats = nullptr) {
  detail::require_prime_order_base(base, ell);
  if (Qt.inf || !base.contains(Qt)) throw Error(Errc::BadInput, "Q~ must be a finite point of E~");
  if (!base.contains(Rt)) throw Error(Errc::BadInput, "R~ is not on E~");
  if (Rt.inf) throw Error(Errc::DegenerateTarget, "R~ = O, so m = 0");
  const i64 p = base.p;
  EcLiftStats local;
  EcLiftStats& st = stats ? *stats : local;
  const BigInt limit = BigInt(1) << 62;

  for (u64 i = 0; i < budget; ++i) {
    st.attempts = i + 1;
    const i64 r = static_cast<i64>(seed + i);
    auto reject = [&](const char* why) { ++st.rejections[why]; };

    // step 1: Q on E_r
    BigInt qy = BigInt(Qt.y) + BigInt(r) * p;
    BigInt br = qy * qy - BigInt(Qt.x) * Qt.x * Qt.x - BigInt(base.a) * Qt.x;
    RationalCurve E{base.a, br};
    // step 2: good reduction at l with l not dividing #E(F_l)
    if (!E.good_at(ell)) {
      reject("bad reduction at l");
      continue;
    }
    if (ec_group_order(E.reduce(ell)) % static_cast<u64>(ell) == 0) {
      reject("l divides #E(F_l)");
      continue;
    }
    if (!E.good_at(p)) {
      reject("bad reduction at p");
      continue;
    }
    // step 3: R over Q(sqrt N)
    BigInt mu = BigInt(Rt.x) + BigInt(r) * p;
    BigInt N = mu * mu * mu + BigInt(base.a) * mu + br;
    if (N == 0 || boost::multiprecision::abs(N) >= limit) {
      reject("cubic value zero or too large");
      continue;
    }
    auto [kernel, f] = squarefree_decompose(static_cast<u64>(boost::multiprecision::abs(N)));
    const i64 D = (N < 0 ? -1 : 1) * static_cast<i64>(kernel);
    if (D == 1) {
      reject("cubic value is a square");
      continue;
    }
    if (static_cast<i64>(f % static_cast<u64>(p)) == 0) {
      reject("p divides the square part");
      continue;
    }
    if (splitting_type(ell, D) != SplitType::Split) {
      reject("l does not split");
      continue;
    }
    const i64 fi = static_cast<i64>(f);
    i64 sv = mulmod(Rt.y, invmod(mod(fi, p), p), p);
    QuadPoint Q{QuadInt::rational(Qt.x, D), QuadInt::rational(qy, D)};
    QuadPoint R{QuadInt::rational(mu, D), QuadInt::from_sqrt_form(0, fi, D)};
    auto uplaces = split_places(ell, D);
    EcSignatureInstance inst = make_ec_instance(base, Qt, Rt, ell, E, D, Q, R, sv, *uplaces[0].root_label, seed);
    inst.r = r;
    if (inst.certificate[0][0] == 0 || inst.certificate[1][0] == 0 || inst.certificate_det() == 0) {
      reject("independence certificate singular");
      continue;
    }
    return inst;
  }
  throw BudgetExhaustedError(budget, "elliptic lift (most frequent rejection: " + st.most_common() + ")");
}

enum class EcSignatureProvenance { EcdlOracle, External };

inline const char* provenance_name(EcSignatureProvenance p) {
  return p == EcSignatureProvenance::EcdlOracle ? "ecdl-oracle" : "external";
}

struct EcSignature {
  i64 alpha = 0;
  i64 beta = 0;
  EcSignatureProvenance provenance = EcSignatureProvenance::External;
};

/// Coordinates of Q and R against rho_v = rho_u = Q, rho_u' = R.
struct EcCoordinates {
  i64 a_v = 1, a_u = 1, a_uc = 0;
  i64 b_v = 0, b_u = 0, b_uc = 1;
};

inline i64 ec_n(const EcSignatureInstance& inst) {
  i64 cq = inst.certificate[0][0];
  if (cq == 0) throw Error(Errc::SingularSystem, "Q has trivial class at u");
  return mulmod(inst.certificate[1][0], invmod(cq, inst.ell), inst.ell);
}

inline EcCoordinates ec_coordinates(const EcSignatureInstance& inst, i64 m) {
  const i64 ell = inst.ell;
  EcCoordinates c;
  c.b_v = mod(m, ell);
  c.b_u = ec_n(inst);
  i64 cr_uc = inst.certificate[1][1];
  if (cr_uc == 0) throw Error(Errc::SingularSystem, "R has trivial class at u'");
  c.a_uc = mulmod(inst.certificate[0][1], invmod(cr_uc, ell), ell);
  return c;
}

using EcdlOracle = std::function<i64(const FpCurve&, const FpPoint& Q, const FpPoint& R)>;

inline EcdlOracle bsgs_ecdl_oracle() {
  return [](const FpCurve& E, const FpPoint& Q, const FpPoint& R) {
    return static_cast<i64>(ecdl_bsgs(E, Q, R, ec_group_order(E)));
  };
}

/// Solves a_v + a_u X + a_u' Y = 0, b_v + b_u X + b_u' Y = 0 for (alpha, beta).
inline EcSignature signature_from_ecdl(const EcSignatureInstance& inst, const EcdlOracle& ecdl) {
  const i64 ell = inst.ell;
  i64 m = mod(ecdl(inst.base, inst.Qt, inst.Rt), ell);
  if (ec_scalar_mul(m, inst.Qt, inst.base) != inst.Rt) throw Error(Errc::OracleInconsistent, "ECDL oracle answer fails m Q~ = R~");
  EcCoordinates c = ec_coordinates(inst, m);
  i64 det = mod(mulmod(c.a_u, c.b_uc, ell) - mulmod(c.a_uc, c.b_u, ell), ell);
  if (det == 0) throw Error(Errc::SingularSystem, "local relations are dependent");
  i64 inv = invmod(det, ell);
  // [a_u a_u'; b_u b_u'] (X, Y) = -(a_v, b_v)
  i64 rx = mod(-c.a_v, ell), ry = mod(-c.b_v, ell);
  EcSignature sig;
  sig.alpha = mulmod(mod(mulmod(rx, c.b_uc, ell) - mulmod(c.a_uc, ry, ell), ell), inv, ell);
  sig.beta = mulmod(mod(mulmod(c.a_u, ry, ell) - mulmod(c.b_u, rx, ell), ell), inv, ell);
  sig.provenance = EcSignatureProvenance::EcdlOracle;
  return sig;
}

using EcSignatureOracle = std::function<EcSignature(const EcSignatureInstance&)>;

/// m = -(n alpha + beta) mod l, checked on E~.
inline i64 ecdl_from_signature(const EcSignatureInstance& inst, const EcSignatureOracle& oracle) {
  const i64 ell = inst.ell;
  i64 n = ec_n(inst);
  EcSignature sig = oracle(inst);
  i64 m = mod(-(mulmod(n, mod(sig.alpha, ell), ell) + mod(sig.beta, ell)), ell);
  if (ec_scalar_mul(m, inst.Qt, inst.base) != inst.Rt) throw Error(Errc::VerificationFailed, "m Q~ != R~");
  return m;
}

struct CokerReport {
  int dim = 0;
  int local_dim = 0;  // sum of dim E(K_w)/l over S
  int rank = 0;       // rank of E(K)/l -> sum over S, on <Q, R>
  std::vector<std::string> columns;
};

namespace detail {

/// Coordinate of P in E~(k_w)/l ~ Z/l, against a fixed generator.
class ReducedQuotient {
 public:
  ReducedQuotient(const FpCurve& E, i64 ell, u64 order) : E_(E), ell_(ell), cofactor_(order / static_cast<u64>(ell)) {
    for (i64 x = 0;; ++x) {
      if (x >= E.p) throw Error(Errc::VerificationFailed, "no generator for the l-part");
      auto P = lift_x(E, x);
      if (!P) continue;
      FpPoint G = ec_scalar_mul(static_cast<i64>(cofactor_), *P, E);
      if (!G.inf) {
        gen_ = G;
        break;
      }
    }
  }

  i64 operator()(const FpPoint& P) const {
    FpPoint T = ec_scalar_mul(static_cast<i64>(cofactor_), P, E_);
    return static_cast<i64>(ecdl_bsgs(E_, gen_, T, static_cast<u64>(ell_)));
  }

 private:
  FpCurve E_;
  i64 ell_;
  u64 cofactor_;
  FpPoint gen_;
};

inline int valuation_of(const BigInt& n, i64 q) {
  if (n == 0) return 0;
  int v = 0;
  BigInt m = n;
  while (m % q == 0) {
    m /= q;
    ++v;
  }
  return v;
}

}  // namespace detail

/// coker(E(K)/l -> sum over w in S of E(K_w)/l) with S = {u, u'} + extra,
/// assuming Q and R span E(K)/l.
inline CokerReport coker_report(const EcSignatureInstance& inst, const std::vector<Place>& extra) {
  const i64 ell = inst.ell;
  std::vector<Place> S{inst.u, inst.u_conj};
  for (const auto& w : extra) {
    if (std::find(S.begin(), S.end(), w) == S.end()) S.push_back(w);
  }
  CokerReport out;
  std::vector<i64> rowQ, rowR;
  for (const auto& w : S) {
    if (w.residue_degree() != 1) throw Error(Errc::BadInput, "only degree-one places are supported: " + w.str());
    if (w.q == ell) {
      rowQ.push_back(detail::local_class_at(inst, inst.Q, w));
      rowR.push_back(detail::local_class_at(inst, inst.R, w));
      ++out.local_dim;
      out.columns.push_back(w.str());
      continue;
    }
    if (!inst.E.good_at(w.q)) {
      // bad places are assumed to contribute nothing; check the proxy
      int vd = detail::valuation_of(inst.E.discriminant(), w.q);
      if ((w.norm() - 1) % ell == 0 || (4 * vd) % ell == 0) {
        throw Error(Errc::AssumptionViolated, "bad place " + w.str() + " may contribute to E(K_w)/l");
      }
      continue;
    }
    FpCurve red = inst.E.reduce(w.q);
    u64 n = ec_group_order(red);
    if (n % static_cast<u64>(ell) != 0) continue;
    if ((n / static_cast<u64>(ell)) % static_cast<u64>(ell) == 0) throw Error(Errc::OutOfScope, "l^2 divides #E(k_w) at " + w.str());
    detail::ReducedQuotient coord(red, ell, n);
    rowQ.push_back(coord(detail::reduce_point(inst.Q, w)));
    rowR.push_back(coord(detail::reduce_point(inst.R, w)));
    ++out.local_dim;
    out.columns.push_back(w.str());
  }
  out.rank = static_cast<int>(rank_mod_ell({rowQ, rowR}, ell));
  out.dim = out.local_dim - out.rank;
  return out;
}

inline int coker_dim(const EcSignatureInstance& inst, const std::vector<Place>& extra) {
  return coker_report(inst, extra).dim;
}

struct TorsionPlace {
  Place w;
  u64 order = 0;
};

/// Degree-one places of good reduction with norm <= B where l | #E~(k_w).
inline std::vector<TorsionPlace> scan_torsion_places(const RationalCurve& E, i64 D, i64 ell, i64 B) {
  std::vector<TorsionPlace> out;
  if (B < 2) return out;
  for (i64 q : primes_up_to(B)) {
    if (!E.good_at(q)) continue;
    std::vector<Place> ws;
    for (const auto& w : split_places(q, D)) {
      if (w.residue_degree() == 1) ws.push_back(w);
    }
    if (ws.empty()) continue;
    u64 n = ec_group_order(E.reduce(q));
    if (n % static_cast<u64>(ell) != 0) continue;
    for (const auto& w : ws) out.push_back({w, n});
  }
  return out;
}

}  // namespace sigcalc
