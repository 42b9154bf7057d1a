#include "holo/errors.hpp"

namespace holo {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::NotInGroup: return "NotInGroup";
    case ErrorCode::NotInAlgebra: return "NotInAlgebra";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::EndpointMismatch: return "EndpointMismatch";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::NotEquivariant: return "NotEquivariant";
    case ErrorCode::CompositionMismatch: return "CompositionMismatch";
    case ErrorCode::LoopLeftChart: return "LoopLeftChart";
    case ErrorCode::BasePointOffCurve: return "BasePointOffCurve";
    case ErrorCode::ChartGap: return "ChartGap";
    case ErrorCode::ParameterOrder: return "ParameterOrder";
    case ErrorCode::NotALoop: return "NotALoop";
    case ErrorCode::NotFlat: return "NotFlat";
    case ErrorCode::NotMaurerCartan: return "NotMaurerCartan";
    case ErrorCode::NotCovClosed: return "NotCovClosed";
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::IncompatibleActions: return "IncompatibleActions";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace holo
