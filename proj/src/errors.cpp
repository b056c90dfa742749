#include "bcheun/errors.hpp"

namespace bcheun {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivergentSeries: return "DivergentSeries";
    case ErrorCode::PoleAtParameter: return "PoleAtParameter";
    case ErrorCode::IntegerBNotSupported: return "IntegerBNotSupported";
    case ErrorCode::AlphaZero: return "AlphaZero";
    case ErrorCode::QZero: return "QZero";
    case ErrorCode::DeltaZero: return "DeltaZero";
    case ErrorCode::EpsilonZero: return "EpsilonZero";
    case ErrorCode::AlphaPlusEpsZero: return "AlphaPlusEpsZero";
    case ErrorCode::OriginSingular: return "OriginSingular";
    case ErrorCode::UnsupportedParameters: return "UnsupportedParameters";
    case ErrorCode::IrregularPoint: return "IrregularPoint";
    case ErrorCode::LogarithmicCase: return "LogarithmicCase";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::BetaParameterPole: return "BetaParameterPole";
    case ErrorCode::GammaParameterPole: return "GammaParameterPole";
    case ErrorCode::RootAtOriginChosen: return "RootAtOriginChosen";
    case ErrorCode::AtExtraSingularity: return "AtExtraSingularity";
    case ErrorCode::AtAuxRoot: return "AtAuxRoot";
    case ErrorCode::OutsideRegion: return "OutsideRegion";
    case ErrorCode::GammaNonpositiveInteger: return "GammaNonpositiveInteger";
    case ErrorCode::PathTooCloseToSingularity: return "PathTooCloseToSingularity";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::ConditionsNotMet: return "ConditionsNotMet";
    case ErrorCode::DegenerateS0: return "DegenerateS0";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace bcheun
