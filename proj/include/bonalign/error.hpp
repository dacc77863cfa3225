#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bonalign {

enum class ErrorCode {
  NonPositiveWeight,
  AlphabetTooSmall,
  SymbolOutOfRange,
  SizeOverflow,
  AlphabetMismatch,
  NonPositiveOrder,
  InfeasibleBudget,
  DegenerateFamily,
  TargetOutOfRange,
  LengthMismatch,
  InvalidN,
  BudgetExceeded,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::AlphabetTooSmall: return "AlphabetTooSmall";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::NonPositiveOrder: return "NonPositiveOrder";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::DegenerateFamily: return "DegenerateFamily";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace detail
}  // namespace bonalign
