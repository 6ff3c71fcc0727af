#pragma once

// Classical index calculus in F_p^*, working with logarithms mod ell only.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sigcalc/arith.hpp"
#include "sigcalc/bsgs.hpp"
#include "sigcalc/linalg.hpp"

namespace sigcalc {

struct FactorBase {
  i64 bound = 0;
  std::vector<i64> primes;  // ascending

  static FactorBase up_to(i64 B) {
    if (B < 2) throw Error(Errc::BadInput, "factor base bound must be at least 2");
    return {B, primes_up_to(B)};
  }

  std::size_t size() const { return primes.size(); }

  std::optional<std::size_t> column(i64 q) const {
    auto it = std::lower_bound(primes.begin(), primes.end(), q);
    if (it == primes.end() || *it != q) return std::nullopt;
    return static_cast<std::size_t>(it - primes.begin());
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (i64 q : primes) out.push_back("theta(" + std::to_string(q) + ")");
    return out;
  }
};

namespace detail {

inline void require_dlp_shape(i64 p, i64 ell) {
  if (p < 3 || !is_prime(static_cast<u64>(p))) throw Error(Errc::BadInput, "p must be an odd prime");
  if (ell < 2 || !is_prime(static_cast<u64>(ell))) throw Error(Errc::BadInput, "ell must be prime");
  if ((p - 1) % ell != 0) throw Error(Errc::BadInput, "ell does not divide p-1");
}

}  // namespace detail

/// The relation contributed by g^r when it is B-smooth: sum e_q theta(q) = r.
inline std::optional<Relation> relation_from_exponent(i64 p, i64 ell, i64 g, const FactorBase& base, u64 r) {
  i64 x = powmod(g, r, p);
  auto f = try_factor_smooth(static_cast<u128>(x), base.primes);
  if (!f) return std::nullopt;
  std::vector<std::pair<std::size_t, i64>> terms;
  for (auto [q, e] : *f) terms.emplace_back(*base.column(static_cast<i64>(q)), e);
  return Relation(terms, static_cast<i64>(r % static_cast<u64>(ell)), ell);
}

struct RelationBatch {
  std::vector<Relation> relations;
  std::vector<u64> exponents;  // the r behind each relation
  u64 attempts = 0;
};

/// Draws r from the seeded stream until `count` nontrivial relations are
/// found. Repeated r values and relations that vanish mod ell are discarded.
inline RelationBatch collect_relations(i64 p, i64 ell, i64 g, const FactorBase& base, std::size_t count, u64 seed,
                                       u64 budget = 0) {
  detail::require_dlp_shape(p, ell);
  if (budget == 0) budget = 10'000 * static_cast<u64>(std::max<std::size_t>(count, 1));
  RelationBatch out;
  std::set<u64> seen;
  const u64 stream = substream(seed, 1);
  for (u64 i = 0; out.relations.size() < count; ++i) {
    if (i >= budget) throw BudgetExhaustedError(i, "relation collection");
    out.attempts = i + 1;
    u64 r = stream_below(stream, i, static_cast<u64>(p - 1));
    if (r == 0 || !seen.insert(r).second) continue;
    auto rel = relation_from_exponent(p, ell, g, base, r);
    if (!rel || rel->trivial()) continue;
    out.relations.push_back(std::move(*rel));
    out.exponents.push_back(r);
  }
  return out;
}

/// theta(x) mod ell for x in F_p^*: the log of x^((p-1)/ell) to the base
/// g^((p-1)/ell) in the order-ell subgroup.
class SubgroupLog {
 public:
  SubgroupLog(i64 p, i64 ell, i64 g)
      : p_(p), ell_(ell), cofactor_(static_cast<u64>((p - 1) / ell)),
        table_(MulModGroup{p}, powmod(g, static_cast<u64>((p - 1) / ell), p), static_cast<u64>(ell)) {
    if (powmod(g, cofactor_, p) == 1) throw Error(Errc::BadInput, "g is an ell-th power; it does not generate mod ell");
  }

  i64 operator()(i64 x) const {
    if (mod(x, p_) == 0) throw Error(Errc::BadInput, "zero has no logarithm");
    return static_cast<i64>(table_.log(powmod(mod(x, p_), cofactor_, p_)));
  }

  i64 ell() const { return ell_; }

 private:
  i64 p_, ell_;
  u64 cofactor_;
  BsgsTable<MulModGroup> table_;
};

struct IndexCalculusStats {
  u64 relation_attempts = 0;
  std::size_t relations = 0;
  std::size_t rank = 0;
  std::size_t determined = 0;
  u64 descent_attempts = 0;
};

/// Solves the factor-base system once and then answers any number of
/// logarithm queries by descent.
class IndexCalculusSolver {
 public:
  IndexCalculusSolver(i64 p, i64 ell, i64 g, i64 B, u64 seed, std::size_t relation_count = 0)
      : p_(p), ell_(ell), g_(g), seed_(seed), base_(FactorBase::up_to(B)) {
    detail::require_dlp_shape(p, ell);
    if (powmod(g, static_cast<u64>((p - 1) / ell), p) == 1) {
      throw Error(Errc::BadInput, "g does not generate F_p^* modulo ell-th powers");
    }
    if (relation_count == 0) {
      relation_count = std::max<std::size_t>(2 * base_.size(), base_.size() + 40);
      // tiny fields have few distinct exponents to draw from
      relation_count = std::min<std::size_t>(relation_count, static_cast<std::size_t>(std::max<i64>(1, (p - 2) / 3)));
    }
    auto batch = collect_relations(p, ell, g, base_, relation_count, seed);
    stats_.relation_attempts = batch.attempts;
    stats_.relations = batch.relations.size();
    auto sol = solve_linear_mod_ell(batch.relations, base_.size(), ell);
    stats_.rank = sol.rank;
    theta_ = std::move(sol.values);
    stats_.determined = static_cast<std::size_t>(std::count_if(theta_.begin(), theta_.end(), [](auto& v) { return v.has_value(); }));
  }

  const FactorBase& base() const { return base_; }
  const IndexCalculusStats& stats() const { return stats_; }

  std::optional<i64> theta(i64 q) const {
    auto c = base_.column(q);
    return c ? theta_[*c] : std::nullopt;
  }

  /// m mod ell with a = g^m, found from some B-smooth a*g^s whose support
  /// has known theta values.
  i64 log(i64 a, u64 budget = 100'000) {
    a = mod(a, p_);
    if (a == 0) throw Error(Errc::BadInput, "zero has no logarithm");
    const u64 stream = substream(seed_, 2 + static_cast<u64>(a));
    i64 m = -1;
    if (a == 1) {
      m = 0;
    } else {
      for (u64 i = 0; m < 0; ++i) {
        if (i >= budget) throw BudgetExhaustedError(i, "descent");
        ++stats_.descent_attempts;
        u64 s = stream_below(stream, i, static_cast<u64>(p_ - 1));
        i64 x = mulmod(a, powmod(g_, s, p_), p_);
        auto f = try_factor_smooth(static_cast<u128>(x), base_.primes);
        if (!f) continue;
        i64 acc = mod(-static_cast<i64>(s % static_cast<u64>(ell_)), ell_);
        bool known = true;
        for (auto [q, e] : *f) {
          auto t = theta(static_cast<i64>(q));
          if (!t) {
            known = false;
            break;
          }
          acc = mod(acc + mulmod(e % ell_, *t, ell_), ell_);
        }
        if (known) m = acc;
      }
    }
    const u64 cof = static_cast<u64>((p_ - 1) / ell_);
    if (powmod(a, cof, p_) != powmod(powmod(g_, cof, p_), static_cast<u64>(m), p_)) {
      throw Error(Errc::VerificationFailed, "descent value fails the ell-th power check");
    }
    return m;
  }

 private:
  i64 p_, ell_, g_;
  u64 seed_;
  FactorBase base_;
  std::vector<std::optional<i64>> theta_;
  IndexCalculusStats stats_;
};

inline i64 index_calculus_dlog(i64 p, i64 ell, i64 g, i64 a, i64 B, u64 seed) {
  return IndexCalculusSolver(p, ell, g, B, seed).log(a);
}

/// A positive rational by its prime exponents (negative = denominator).
using SUnit = std::map<i64, i64>;

inline i64 sunit_mod(const SUnit& a, i64 p) {
  i64 x = 1;
  for (auto [q, e] : a) {
    if (mod(q, p) == 0) throw Error(Errc::BadSupport, "p divides the element");
    i64 base = e >= 0 ? mod(q, p) : invmod(mod(q, p), p);
    x = mulmod(x, powmod(base, static_cast<u64>(e >= 0 ? e : -e), p), p);
  }
  return x;
}

/// Local values of the degree-ell character of Q cut out inside Q(mu_p),
/// normalised so that the value at p on g is 1. `site == p` selects the
/// place p; any other prime q selects q.
class RationalCharacterPairing {
 public:
  RationalCharacterPairing(i64 p, i64 ell, i64 g) : p_(p), ell_(ell), theta_(p, ell, g) {
    detail::require_dlp_shape(p, ell);
  }

  i64 operator()(i64 site, const SUnit& a) const {
    for (auto [q, e] : a) {
      if (e != 0 && (q < 2 || !is_prime(static_cast<u64>(q)))) throw Error(Errc::BadSupport, "support must be prime");
    }
    if (site == p_) return theta_(sunit_mod(a, p_));
    if (site < 2 || !is_prime(static_cast<u64>(site))) throw Error(Errc::BadInput, "site must be p or a prime");
    auto it = a.find(site);
    if (it == a.end() || it->second == 0) return 0;
    return mod(-mulmod(mod(it->second, ell_), theta_(site), ell_), ell_);
  }

  /// Sites where the pairing can be nonzero: p and the support of a.
  std::vector<i64> sites(const SUnit& a) const {
    std::vector<i64> out{p_};
    for (auto [q, e] : a) {
      if (e != 0 && q != p_) out.push_back(q);
    }
    return out;
  }

 private:
  i64 p_, ell_;
  SubgroupLog theta_;
};

inline i64 rational_character_pairing(i64 p, i64 ell, i64 g, i64 site, const SUnit& a) {
  return RationalCharacterPairing(p, ell, g)(site, a);
}

}  // namespace sigcalc
