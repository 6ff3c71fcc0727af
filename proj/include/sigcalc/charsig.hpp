#pragma once

// Ramification signatures of degree-ell characters of real quadratic fields,
// and the reductions between them and discrete logarithms in F_p^*.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sigcalc/arith.hpp"
#include "sigcalc/bsgs.hpp"
#include "sigcalc/linalg.hpp"
#include "sigcalc/quadfield.hpp"

namespace sigcalc {

struct ConditionReport {
  std::optional<i64> class_number;  // nullopt when out of computable range
  bool class_number_coprime = false;
  bool y_nonzero_at_u = false;
  bool y_nonzero_at_u_conj = false;
  bool nonresidue_at_v = false;

  bool all() const { return class_number_coprime && y_nonzero_at_u && y_nonzero_at_u_conj && nonresidue_at_v; }
};

struct CharSignatureInstance {
  i64 p = 0;
  i64 ell = 0;
  i64 g = 0;
  i64 a = 0;  // residue of alpha at v
  RealQuadField K{2, false};
  QuadInt alpha;
  Place u, u_conj, v, v_conj;
  u64 seed = 0;
  ConditionReport conditions;

  i64 D() const { return K.D(); }

  /// Teichmuller coordinate of x at a place over ell.
  i64 y_at(const QuadInt& x, const Place& w) const { return teichmuller(embed(x, w, 2).value, ell).y; }
  i64 y() const { return y_at(alpha, u); }
};

inline ConditionReport check_conditions(const CharSignatureInstance& inst) {
  ConditionReport r;
  if (inst.K.has_class_number()) {
    r.class_number = inst.K.class_number();
    r.class_number_coprime = *r.class_number % inst.ell != 0;
  }
  auto nonzero_y = [&](const Place& w) {
    if (embed(inst.alpha, w, 1).value == 0) return false;
    return inst.y_at(inst.alpha, w) != 0;
  };
  r.y_nonzero_at_u = nonzero_y(inst.u);
  r.y_nonzero_at_u_conj = nonzero_y(inst.u_conj);
  i64 res = residue(inst.alpha, inst.v);
  r.nonresidue_at_v = res != 0 && !ell_power_residue_test(res, inst.p, inst.ell);
  return r;
}

namespace detail {

inline Place place_with_label(i64 q, i64 D, i64 label) {
  for (const auto& w : split_places(q, D)) {
    if (w.type == SplitType::Split && *w.root_label == label) return w;
  }
  throw Error(Errc::BadInput, "no split place over " + std::to_string(q) + " with root " + std::to_string(label));
}

}  // namespace detail

/// Assembles an instance from its defining data and evaluates the
/// conditions. Validates shape, not the conditions themselves.
inline CharSignatureInstance make_char_instance(i64 p, i64 ell, i64 g, i64 D, const QuadInt& alpha, i64 v_root_label,
                                                i64 u_root_label, u64 seed = 0) {
  if (ell < 3 || !is_prime(static_cast<u64>(ell))) throw Error(Errc::BadInput, "ell must be an odd prime");
  if (p < 3 || !is_prime(static_cast<u64>(p)) || (p - 1) % ell != 0) {
    throw Error(Errc::BadInput, "p must be a prime with ell | p-1");
  }
  if (alpha.D != D) throw Error(Errc::BadInput, "alpha lives in a different field");
  BigInt n = alpha.norm();
  if (n != 1 && n != -1) throw Error(Errc::BadInput, "alpha is not a unit");
  if (splitting_type(p, D) != SplitType::Split || splitting_type(ell, D) != SplitType::Split) {
    throw Error(Errc::BadInput, "p and ell must split in K");
  }
  if (mod(g, p) == 0 || powmod(mod(g, p), static_cast<u64>((p - 1) / ell), p) == 1) {
    throw Error(Errc::BadInput, "g must generate F_p^* modulo ell-th powers");
  }
  CharSignatureInstance inst;
  inst.p = p;
  inst.ell = ell;
  inst.g = mod(g, p);
  inst.K = RealQuadField(D);
  inst.alpha = alpha;
  inst.v = detail::place_with_label(p, D, v_root_label);
  inst.v_conj = conjugate_place(inst.v);
  inst.u = detail::place_with_label(ell, D, u_root_label);
  inst.u_conj = conjugate_place(inst.u);
  inst.a = residue(alpha, inst.v);
  inst.seed = seed;
  inst.conditions = check_conditions(inst);
  return inst;
}

struct LiftStats {
  u64 attempts = 0;
  std::map<std::string, u64> rejections;  // reason -> count
};

/// Lifts a in F_p^* to a unit alpha of norm -1 in Q(sqrt(1+d^2)) with
/// alpha = a at a place v over p. The sweep d = d0 + r*p starts at r = seed.
inline CharSignatureInstance lift_unit(i64 a, i64 p, i64 ell, u64 seed, std::optional<i64> generator = std::nullopt,
                                       u64 budget = 10'000, LiftStats* stats = nullptr) {
  if (ell < 3 || !is_prime(static_cast<u64>(ell))) throw Error(Errc::BadInput, "ell must be an odd prime");
  if (p < 3 || !is_prime(static_cast<u64>(p)) || (p - 1) % ell != 0) {
    throw Error(Errc::BadInput, "p must be a prime with ell | p-1");
  }
  a = mod(a, p);
  if (a == 0) throw Error(Errc::BadInput, "a must be nonzero mod p");
  if (a == 1 || a == p - 1) throw Error(Errc::DegenerateTarget, "a = +-1; the logarithm is 0 or (p-1)/2");
  if (powmod(a, static_cast<u64>((p - 1) / ell), p) == 1) {
    throw Error(Errc::BadInput, "a is an ell-th power residue; its logarithm is 0 mod ell");
  }
  const i64 g = generator ? mod(*generator, p) : primitive_root(p);
  const i64 b = invmod(a, p);
  const i64 half = invmod(2, p);
  const i64 c = mulmod(mod(a + b, p), half, p);
  const i64 d0 = mulmod(mod(a - b, p), half, p);
  if (c == 0) throw Error(Errc::DegenerateTarget, "a^2 = -1 mod p; p ramifies in every lift");

  LiftStats local;
  LiftStats& st = stats ? *stats : local;
  auto reject = [&](const char* why) { ++st.rejections[why]; };
  for (u64 i = 0; i < budget; ++i) {
    st.attempts = i + 1;
    const u64 r = seed + i;
    const u128 d = static_cast<u128>(d0) + static_cast<u128>(r) * static_cast<u128>(p);
    const u128 n = 1 + d * d;
    if (legendre(static_cast<i64>(n % static_cast<u128>(ell)), ell) != 1) {
      reject("1+d^2 not a nonzero square mod ell");
      continue;
    }
    if (n >> 62) {
      reject("1+d^2 too large");
      continue;
    }
    auto [D64, f64] = squarefree_decompose(static_cast<u64>(n));
    const i64 D = static_cast<i64>(D64);
    if (D < 2) {
      reject("1+d^2 is a square");
      continue;
    }
    if (field_discriminant(D) > kMaxClassNumberDiscriminant) {
      reject("class number out of range");
      continue;
    }
    const QuadInt alpha = QuadInt::from_sqrt_form(BigInt(static_cast<u64>(d)), BigInt(f64), D);
    // the place over p where f*sqrt(D) = c
    const auto pv = split_places(p, D);
    if (pv.size() != 2) {
      reject("p does not split");
      continue;
    }
    const Place& v = residue(alpha, pv[0]) == a ? pv[0] : pv[1];
    CharSignatureInstance inst = make_char_instance(p, ell, g, D, alpha, *v.root_label,
                                                    *split_places(ell, D)[0].root_label, seed);
    if (inst.a != a) throw Error(Errc::VerificationFailed, "lifted unit does not reduce to a");
    if (!inst.conditions.y_nonzero_at_u || !inst.conditions.y_nonzero_at_u_conj) {
      reject("alpha^(ell-1) = 1 mod w^2 at a place over ell");
      continue;
    }
    if (!inst.conditions.class_number_coprime) {
      reject("ell divides the class number");
      continue;
    }
    return inst;
  }
  throw BudgetExhaustedError(st.attempts, "unit lifting");
}

enum class SignatureProvenance { DlOracle, IndexCalculus, External };

inline const char* provenance_name(SignatureProvenance p) {
  switch (p) {
    case SignatureProvenance::DlOracle: return "dl-oracle";
    case SignatureProvenance::IndexCalculus: return "index-calculus";
    case SignatureProvenance::External: return "external";
  }
  return "unknown";
}

struct CharSignature {
  i64 s = 0;
  SignatureProvenance provenance = SignatureProvenance::External;
  std::optional<i64> m;  // log of alpha's residue at v, mod ell
  i64 y = 0;             // Teichmuller coordinate of alpha at u
};

/// Any discrete-log oracle: returns m with g^m = t in F_p^* (full or mod ell).
using DlOracle = std::function<u64(i64 g, i64 t, i64 p)>;

inline DlOracle bsgs_dl_oracle() {
  return [](i64 g, i64 t, i64 p) { return bsgs_dlog(MulModGroup{p}, g, t, static_cast<u64>(p - 1)); };
}

namespace detail {

/// x^((p-1)/ell) = (g^((p-1)/ell))^m.
inline bool agrees_mod_ell(i64 x, i64 g, i64 m, i64 p, i64 ell) {
  const u64 cof = static_cast<u64>((p - 1) / ell);
  return powmod(x, cof, p) == powmod(powmod(g, cof, p), static_cast<u64>(mod(m, ell)), p);
}

inline void require_conditions(const CharSignatureInstance& inst) {
  if (!inst.conditions.all()) throw Error(Errc::BadInput, "instance does not satisfy the signature conditions");
}

}  // namespace detail

inline CharSignature signature_from_dl(const CharSignatureInstance& inst, const DlOracle& dl) {
  detail::require_conditions(inst);
  const i64 m = static_cast<i64>(dl(inst.g, inst.a, inst.p) % static_cast<u64>(inst.ell));
  if (!detail::agrees_mod_ell(inst.a, inst.g, m, inst.p, inst.ell)) {
    throw Error(Errc::OracleInconsistent, "oracle logarithm does not match alpha at v");
  }
  const i64 y = inst.y();
  if (y == 0) throw Error(Errc::ZeroY, "alpha is an ell-th power locally at u");
  CharSignature sig;
  sig.s = mod(-mulmod(m, invmod(y, inst.ell), inst.ell), inst.ell);
  sig.provenance = SignatureProvenance::DlOracle;
  sig.m = m;
  sig.y = y;
  if (sig.s == 0) throw Error(Errc::VerificationFailed, "signature vanished");
  return sig;
}

using SignatureOracle = std::function<i64(const CharSignatureInstance&)>;

struct DlFromSignatureResult {
  i64 m = 0;
  std::optional<CharSignatureInstance> instance;  // absent on the shortcut
};

inline DlFromSignatureResult dl_from_signature_detailed(i64 a, i64 g, i64 p, i64 ell, const SignatureOracle& oracle,
                                                        u64 seed) {
  a = mod(a, p);
  if (a == 0) throw Error(Errc::BadInput, "a must be nonzero mod p");
  DlFromSignatureResult out;
  if (powmod(a, static_cast<u64>((p - 1) / ell), p) == 1) return out;
  out.instance = lift_unit(a, p, ell, seed, g);
  const i64 y = out.instance->y();
  const i64 s = mod(oracle(*out.instance), ell);
  out.m = mod(-mulmod(y, s, ell), ell);
  if (!detail::agrees_mod_ell(a, g, out.m, p, ell)) {
    throw Error(Errc::VerificationFailed, "recovered logarithm fails the ell-th power check");
  }
  return out;
}

inline i64 dl_from_signature(i64 a, i64 g, i64 p, i64 ell, const SignatureOracle& oracle, u64 seed) {
  return dl_from_signature_detailed(a, g, p, ell, oracle, seed).m;
}

// ---------------------------------------------------------------------------
// signature index calculus

struct SignatureIcOptions {
  i64 r_cap = 256;         // r drawn from [1, r_cap]
  i64 k_cap = 256;         // rational part shifted by k*p, |k| <= k_cap
  u64 budget = 2'000'000;  // sampling attempts
  std::size_t max_relations = 0;  // 0: four times the column count
};

struct SignatureIcStats {
  u64 attempts = 0;
  std::size_t relations = 0;
  std::size_t columns = 0;
  std::size_t rank = 0;
};

struct SignatureIcResult {
  CharSignature signature;
  SignatureIcStats stats;
  std::map<Place, std::optional<i64>> place_values;  // pairing on uniformizers, sigma_v = 1
};

/// One sampled beta = r*omega + t with beta = g at v.
struct SampledBeta {
  i64 r = 0;
  i64 t = 0;
};

class SignatureRelationBuilder {
 public:
  SignatureRelationBuilder(const CharSignatureInstance& inst, i64 B) : inst_(inst), B_(B) {
    if (B < 2) throw Error(Errc::BadInput, "factor base bound must be at least 2");
    for (i64 q : primes_up_to(B)) {
      for (const auto& w : split_places(q, inst.D())) add_column(w);
    }
    add_column(inst.u_conj);
    add_column(inst.v_conj);
    s_col_ = places_.size();
    primes_ = primes_up_to(B);
    for (i64 q : {inst.ell, inst.p}) {
      if (q > B) primes_.push_back(q);
    }
    std::sort(primes_.begin(), primes_.end());
    const QuadInt omega{0, 1, inst.D()};
    trace_ = static_cast<i128>(omega.trace());
    norm_ = static_cast<i128>(omega.norm());
    omega_real_ = omega.approx();
    omega_conj_real_ = omega.conj().approx();
    omega_at_v_ = residue(omega, inst.v);
  }

  std::size_t columns() const { return s_col_ + 1; }
  std::size_t s_column() const { return s_col_; }
  const std::vector<Place>& places() const { return places_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& w : places_) out.push_back("x[" + w.str() + "]");
    out.push_back("s");
    return out;
  }

  /// beta = r*omega + t for draw (r, k, branch). The rational part t is the
  /// representative of g - r*omega mod v nearest to one of the two centres
  /// where the norm vanishes, shifted by k*p.
  SampledBeta beta_for(i64 r, i64 k, bool near_conjugate) const {
    const i64 p = inst_.p;
    const i64 t0 = mod(inst_.g - mulmod(r, omega_at_v_, p), p);
    long double centre = -static_cast<long double>(r) * (near_conjugate ? omega_conj_real_ : omega_real_);
    long double steps = std::floor((centre - static_cast<long double>(t0)) / static_cast<long double>(p) + 0.5L);
    return {r, t0 + (static_cast<i64>(steps) + k) * p};
  }

  QuadInt element(const SampledBeta& b) const { return QuadInt{b.t, b.r, inst_.D()}; }

  /// The relation 1 + y_beta*s + sum e_w x_w = 0, or nullopt if beta is not
  /// usable (not a unit at u, or its norm is not smooth).
  std::optional<Relation> relation(const SampledBeta& b) const {
    const i128 r = b.r, t = b.t;
    const i128 n = t * t + r * t * trace_ + r * r * norm_;
    if (n == 0) return std::nullopt;
    u128 m = static_cast<u128>(n < 0 ? -n : n);
    std::vector<std::pair<i64, int>> fac;
    for (i64 q : primes_) {
      int e = 0;
      while (m % static_cast<u128>(q) == 0) {
        m /= static_cast<u128>(q);
        ++e;
      }
      if (e) fac.emplace_back(q, e);
      if (m == 1) break;
    }
    if (m != 1) return std::nullopt;
    const QuadInt beta = element(b);
    if (embed(beta, inst_.u, 1).value == 0) return std::nullopt;
    if (residue(beta, inst_.v) != inst_.g) throw Error(Errc::VerificationFailed, "sampled beta is not g at v");
    std::vector<std::pair<Place, int>> vals;
    for (auto [q, e] : fac) place_valuations(beta, q, e, vals);
    std::vector<std::pair<std::size_t, i64>> terms;
    for (auto& [w, e] : vals) {
      auto it = column_.find(w);
      if (it == column_.end()) throw Error(Errc::VerificationFailed, "beta has support at " + w.str());
      terms.emplace_back(it->second, e);
    }
    terms.emplace_back(s_col_, inst_.y_at(beta, inst_.u));
    return Relation(terms, -1, inst_.ell);
  }

 private:
  void add_column(const Place& w) {
    if (w == inst_.u || w == inst_.v || column_.count(w)) return;
    column_[w] = places_.size();
    places_.push_back(w);
  }

  const CharSignatureInstance& inst_;
  i64 B_;
  std::vector<Place> places_;
  std::map<Place, std::size_t> column_;
  std::size_t s_col_ = 0;
  std::vector<i64> primes_;
  i128 trace_ = 0, norm_ = 0;
  long double omega_real_ = 0, omega_conj_real_ = 0;
  i64 omega_at_v_ = 0;
};

inline SignatureIcResult signature_index_calculus_detailed(const CharSignatureInstance& inst, i64 B, u64 seed,
                                                           const SignatureIcOptions& opt = {}) {
  detail::require_conditions(inst);
  SignatureRelationBuilder builder(inst, B);
  const std::size_t cols = builder.columns();
  const std::size_t max_rel = opt.max_relations ? opt.max_relations : 4 * cols;
  const u64 stream = substream(seed, 3);
  const u64 span = 2 * static_cast<u64>(opt.k_cap) + 1;
  const std::size_t space = static_cast<std::size_t>(2 * span * static_cast<u64>(opt.r_cap));

  SignatureIcResult out;
  std::vector<Relation> rels;
  std::set<std::pair<i64, i64>> seen;
  std::size_t next_solve = 1;
  for (u64 i = 0;; ++i) {
    if (i >= opt.budget) throw BudgetExhaustedError(i, "signature relation sampling");
    out.stats.attempts = i + 1;
    const u64 draw = stream_value(stream, i);
    const i64 r = 1 + static_cast<i64>(draw % static_cast<u64>(opt.r_cap));
    const i64 k = static_cast<i64>((draw >> 20) % span) - opt.k_cap;
    const bool near_conj = (draw >> 40) & 1;
    const SampledBeta b = builder.beta_for(r, k, near_conj);
    if (!seen.insert({b.r, b.t}).second) {
      if (seen.size() == space) throw BudgetExhaustedError(i + 1, "signature relation sampling (all draws used)");
      continue;
    }
    auto rel = builder.relation(b);
    if (!rel) continue;
    rels.push_back(std::move(*rel));
    if (rels.size() < next_solve && rels.size() < max_rel) continue;
    next_solve = std::max(rels.size() + 1, rels.size() * 5 / 4);
    auto sol = solve_linear_mod_ell(rels, cols, inst.ell);
    out.stats.relations = rels.size();
    out.stats.columns = cols;
    out.stats.rank = sol.rank;
    if (sol.values[builder.s_column()]) {
      out.signature.s = *sol.values[builder.s_column()];
      for (std::size_t c = 0; c < builder.places().size(); ++c) out.place_values[builder.places()[c]] = sol.values[c];
      break;
    }
    if (rels.size() >= max_rel) throw RankDeficientError({"s"});
  }
  if (out.signature.s == 0) throw Error(Errc::VerificationFailed, "signature vanished");
  out.signature.provenance = SignatureProvenance::IndexCalculus;
  out.signature.y = inst.y();
  out.signature.m = mod(-mulmod(out.signature.y, out.signature.s, inst.ell), inst.ell);
  return out;
}

inline CharSignature signature_index_calculus(const CharSignatureInstance& inst, i64 B, u64 seed,
                                              const SignatureIcOptions& opt = {}) {
  return signature_index_calculus_detailed(inst, B, seed, opt).signature;
}

/// Instances that pass every condition, for seeded experiments: (p, ell)
/// with ell in [3, 50] and p <= max_p, a a random non-ell-th power.
inline std::vector<CharSignatureInstance> seeded_char_instances(std::size_t count, u64 seed, i64 max_p = 2000) {
  std::vector<CharSignatureInstance> out;
  const u64 stream = substream(seed, 0xc5);
  const auto ells = primes_up_to(50);
  for (u64 i = 0; out.size() < count; ++i) {
    if (i > 200 * count + 1000) throw BudgetExhaustedError(i, "seeded instance search");
    i64 ell = ells[1 + stream_below(stream, 3 * i, ells.size() - 1)];
    i64 p = 2 * ell * (1 + static_cast<i64>(stream_below(stream, 3 * i + 1, static_cast<u64>(max_p / (2 * ell))))) + 1;
    if (p > max_p || !is_prime(static_cast<u64>(p))) continue;
    i64 a = 2 + static_cast<i64>(stream_below(stream, 3 * i + 2, static_cast<u64>(p - 3)));
    if (ell_power_residue_test(a, p, ell) || mulmod(a, a, p) == p - 1) continue;
    try {
      out.push_back(lift_unit(a, p, ell, i, primitive_root(p)));
    } catch (const Error&) {
      // no passing lift within budget; draw another triple
    }
  }
  return out;
}

}  // namespace sigcalc
