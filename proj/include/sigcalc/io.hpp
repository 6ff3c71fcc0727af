#pragma once

// JSON forms of the two instance types and the named curve fixtures.
// Every number is written as a decimal string.

#include <fstream>
#include <string>

#include <json.hpp>

#include "sigcalc/charsig.hpp"
#include "sigcalc/ecsig.hpp"

namespace sigcalc {

using Json = nlohmann::json;

namespace io {

inline Json num(const BigInt& v) { return v.str(); }
inline Json num(i64 v) { return std::to_string(v); }
inline Json num(u64 v) { return std::to_string(v); }

inline BigInt big(const Json& j) {
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
      throw Error(Errc::BadInput, "not an integer: " + j.get<std::string>());
    }
  }
  if (j.is_number_integer()) return BigInt(j.get<i64>());
  throw Error(Errc::BadInput, "expected an integer, got " + j.dump());
}

inline i64 small(const Json& j) {
  BigInt v = big(j);
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN)) throw Error(Errc::TooLarge, "integer out of 64-bit range: " + v.str());
  return static_cast<i64>(v);
}

inline u64 unsigned_value(const Json& j) {
  BigInt v = big(j);
  if (v < 0 || v > BigInt(UINT64_MAX)) throw Error(Errc::BadInput, "expected a 64-bit unsigned integer");
  return static_cast<u64>(v);
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::BadInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Json pair(const QuadInt& x) { return Json::array({num(x.a), num(x.b)}); }

inline QuadInt quad(const Json& j, i64 D) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::BadInput, "expected [a, b] coefficients");
  return QuadInt{big(j[0]), big(j[1]), D};
}

}  // namespace io

// alpha and points of K are stored by their coefficients on the basis 1, omega.

inline Json to_json(const CharSignatureInstance& inst) {
  return Json{{"p", io::num(inst.p)},
              {"ell", io::num(inst.ell)},
              {"g", io::num(inst.g)},
              {"a", io::num(inst.a)},
              {"D", io::num(inst.D())},
              {"alpha", io::pair(inst.alpha)},
              {"v_root_label", io::num(*inst.v.root_label)},
              {"u_root_label", io::num(*inst.u.root_label)},
              {"seed", io::num(inst.seed)}};
}

inline CharSignatureInstance char_instance_from_json(const Json& j) {
  using io::field;
  i64 D = io::small(field(j, "D"));
  auto inst = make_char_instance(io::small(field(j, "p")), io::small(field(j, "ell")), io::small(field(j, "g")), D,
                                 io::quad(field(j, "alpha"), D), io::small(field(j, "v_root_label")),
                                 io::small(field(j, "u_root_label")), io::unsigned_value(field(j, "seed")));
  if (inst.a != mod(io::small(field(j, "a")), inst.p)) throw Error(Errc::VerificationFailed, "alpha does not reduce to a at v");
  return inst;
}

inline Json to_json(const EcSignatureInstance& inst) {
  return Json{{"p", io::num(inst.p)},
              {"ell", io::num(inst.ell)},
              {"a", io::num(inst.E.a)},
              {"b_r", io::num(inst.E.b)},
              {"Q", Json::array({io::num(inst.Q.x.a), io::num(inst.Q.y.a)})},
              {"D", io::num(inst.D)},
              {"R", Json::array({io::pair(inst.R.x), io::pair(inst.R.y)})},
              {"v_root_label", io::num(*inst.v.root_label)},
              {"u_root_label", io::num(*inst.u.root_label)},
              {"r", io::num(inst.r)},
              {"seed", io::num(inst.seed)},
              {"sha_assumption", true}};
}

inline EcSignatureInstance ec_instance_from_json(const Json& j) {
  using io::field;
  i64 p = io::small(field(j, "p")), ell = io::small(field(j, "ell")), D = io::small(field(j, "D"));
  if (!field(j, "sha_assumption").is_boolean() || !j.at("sha_assumption").get<bool>()) {
    throw Error(Errc::AssumptionViolated, "instances are only defined under sha_assumption = true");
  }
  RationalCurve E{io::big(field(j, "a")), io::big(field(j, "b_r"))};
  const Json& q = field(j, "Q");
  const Json& r = field(j, "R");
  if (!q.is_array() || q.size() != 2 || !r.is_array() || r.size() != 2) throw Error(Errc::BadInput, "Q and R need two coordinates");
  QuadPoint Q{QuadInt::rational(io::big(q[0]), D), QuadInt::rational(io::big(q[1]), D)};
  QuadPoint R{io::quad(r[0], D), io::quad(r[1], D)};
  Place v{p, SplitType::Split, io::small(field(j, "v_root_label"))};
  FpCurve base = E.reduce(p);
  auto inst = make_ec_instance(base, detail::reduce_point(Q, v), detail::reduce_point(R, v), ell, E, D, Q, R,
                               *v.root_label, io::small(field(j, "u_root_label")), io::unsigned_value(field(j, "seed")));
  if (j.contains("r")) inst.r = io::small(j.at("r"));
  return inst;
}

/// A prime-order curve with two points, as shipped under data/fixtures.
struct EcFixture {
  std::string name;
  FpCurve curve;
  FpPoint Q, R;
  i64 ell = 0;
  u64 seed = 0;
};

inline EcFixture ec_fixture_from_json(const Json& j) {
  using io::field;
  EcFixture fx;
  fx.name = j.value("name", std::string{});
  fx.curve = FpCurve(io::small(field(j, "p")), io::small(field(j, "a")), io::small(field(j, "b")));
  const Json& q = field(j, "Q");
  const Json& r = field(j, "R");
  fx.Q = FpPoint::at(io::small(q.at(0)), io::small(q.at(1)));
  fx.R = FpPoint::at(io::small(r.at(0)), io::small(r.at(1)));
  fx.ell = io::small(field(j, "ell"));
  fx.seed = j.contains("seed") ? io::unsigned_value(j.at("seed")) : 0;
  if (!fx.curve.contains(fx.Q) || !fx.curve.contains(fx.R)) throw Error(Errc::BadInput, "fixture points are not on the curve");
  return fx;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::BadInput, path + ": " + e.what());
  }
}

}  // namespace sigcalc
