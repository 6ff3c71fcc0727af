#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigcalc {

enum class Errc {
  BadInput,
  NonResidue,
  Ramified,
  NotAUnit,
  NotInSubgroup,
  NotSmooth,
  NotSquarefree,
  TooLarge,
  ZeroElement,
  Inconsistent,
  RankDeficient,
  BudgetExhausted,
  VerificationFailed,
  ClassNumberDivisible,
  DegenerateTarget,
  OracleInconsistent,
  ZeroY,
  BadSupport,
  NonInvertibleDenominator,
  Singular,
  OutOfScope,
  PrecisionLoss,
  BadReduction,
  SingularSystem,
  AssumptionViolated,
};

inline const char* errc_name(Errc e) {
  switch (e) {
    case Errc::BadInput: return "BadInput";
    case Errc::NonResidue: return "NonResidue";
    case Errc::Ramified: return "Ramified";
    case Errc::NotAUnit: return "NotAUnit";
    case Errc::NotInSubgroup: return "NotInSubgroup";
    case Errc::NotSmooth: return "NotSmooth";
    case Errc::NotSquarefree: return "NotSquarefree";
    case Errc::TooLarge: return "TooLarge";
    case Errc::ZeroElement: return "ZeroElement";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::VerificationFailed: return "VerificationFailed";
    case Errc::ClassNumberDivisible: return "ClassNumberDivisible";
    case Errc::DegenerateTarget: return "DegenerateTarget";
    case Errc::OracleInconsistent: return "OracleInconsistent";
    case Errc::ZeroY: return "ZeroY";
    case Errc::BadSupport: return "BadSupport";
    case Errc::NonInvertibleDenominator: return "NonInvertibleDenominator";
    case Errc::Singular: return "Singular";
    case Errc::OutOfScope: return "OutOfScope";
    case Errc::PrecisionLoss: return "PrecisionLoss";
    case Errc::BadReduction: return "BadReduction";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::AssumptionViolated: return "AssumptionViolated";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type; `code()`
/// identifies the failure class, the message carries the particulars.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class NotSmoothError : public Error {
 public:
  explicit NotSmoothError(std::string cofactor)
      : Error(Errc::NotSmooth, "surviving cofactor " + cofactor), cofactor_(std::move(cofactor)) {}

  const std::string& cofactor() const noexcept { return cofactor_; }

 private:
  std::string cofactor_;
};

class RankDeficientError : public Error {
 public:
  explicit RankDeficientError(std::vector<std::string> undetermined)
      : Error(Errc::RankDeficient, describe(undetermined)), undetermined_(std::move(undetermined)) {}

  const std::vector<std::string>& undetermined() const noexcept { return undetermined_; }

 private:
  static std::string describe(const std::vector<std::string>& names) {
    std::string s = std::to_string(names.size()) + " undetermined unknown(s):";
    for (std::size_t i = 0; i < names.size() && i < 8; ++i) s += " " + names[i];
    if (names.size() > 8) s += " ...";
    return s;
  }

  std::vector<std::string> undetermined_;
};

class BudgetExhaustedError : public Error {
 public:
  BudgetExhaustedError(std::uint64_t attempts, const std::string& stage)
      : Error(Errc::BudgetExhausted, stage + " after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}

  std::uint64_t attempts() const noexcept { return attempts_; }

 private:
  std::uint64_t attempts_;
};

}  // namespace sigcalc
