#pragma once

// Baby-step giant-step over any finite abelian group, written additively.
//
// A group type G supplies
//   Element identity() const;
//   Element add(const Element&, const Element&) const;
//   Element neg(const Element&) const;
//   u64     key(const Element&) const;   // injective on the group
// and is used as ground truth for every discrete-log reduction.

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "sigcalc/arith.hpp"

namespace sigcalc {

template <class G>
typename G::Element scalar_mul(const G& group, u64 n, typename G::Element x) {
  auto acc = group.identity();
  while (n) {
    if (n & 1) acc = group.add(acc, x);
    x = group.add(x, x);
    n >>= 1;
  }
  return acc;
}

/// Reusable baby-step table for repeated logarithms to one base.
template <class G>
class BsgsTable {
 public:
  using Element = typename G::Element;

  BsgsTable(G group, Element generator, u64 order)
      : group_(std::move(group)), generator_(generator), order_(order) {
    if (order == 0) throw Error(Errc::BadInput, "group order must be positive");
    step_ = static_cast<u64>(std::ceil(std::sqrt(static_cast<long double>(order))));
    if (step_ == 0) step_ = 1;
    table_.reserve(step_ * 2);
    Element e = group_.identity();
    for (u64 j = 0; j < step_; ++j) {
      table_.emplace(group_.key(e), j);  // keeps the smallest j per key
      e = group_.add(e, generator_);
    }
    giant_ = group_.neg(e);  // -step * g
  }

  /// Least m >= 0 with m*g = target.
  u64 log(const Element& target) const {
    Element gamma = target;
    for (u64 i = 0; i * step_ < order_; ++i) {
      if (auto it = table_.find(group_.key(gamma)); it != table_.end()) {
        u64 m = i * step_ + it->second;
        if (m < order_) return m;
      }
      gamma = group_.add(gamma, giant_);
    }
    throw Error(Errc::NotInSubgroup, "target is not a multiple of the generator");
  }

  const G& group() const { return group_; }
  u64 order() const { return order_; }

 private:
  G group_;
  Element generator_;
  u64 order_;
  u64 step_ = 1;
  Element giant_{};
  std::unordered_map<u64, u64> table_;
};

template <class G>
u64 bsgs_dlog(const G& group, const typename G::Element& generator, const typename G::Element& target, u64 order) {
  return BsgsTable<G>(group, generator, order).log(target);
}

/// The multiplicative group (Z/p)^*.
struct MulModGroup {
  using Element = i64;
  i64 p;

  Element identity() const { return 1; }
  Element add(Element a, Element b) const { return mulmod(a, b, p); }
  Element neg(Element a) const { return invmod(a, p); }
  u64 key(Element a) const { return static_cast<u64>(a); }
};

}  // namespace sigcalc
