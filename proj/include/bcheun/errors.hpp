#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bcheun {

using Complex = std::complex<double>;

enum class ErrorCode {
  DivergentSeries,
  PoleAtParameter,
  IntegerBNotSupported,
  AlphaZero,
  QZero,
  DeltaZero,
  EpsilonZero,
  AlphaPlusEpsZero,
  OriginSingular,
  UnsupportedParameters,
  IrregularPoint,
  LogarithmicCase,
  InvalidExponent,
  BetaParameterPole,
  GammaParameterPole,
  RootAtOriginChosen,
  AtExtraSingularity,
  AtAuxRoot,
  OutsideRegion,
  GammaNonpositiveInteger,
  PathTooCloseToSingularity,
  StepSizeUnderflow,
  ConditionsNotMet,
  DegenerateS0,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this exception; `code()`
/// identifies the failed precondition or numerical breakdown.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bcheun
