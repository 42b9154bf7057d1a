#pragma once

#include <stdexcept>
#include <string>

namespace holo {

enum class ErrorCode {
  SpecMismatch,
  NotInGroup,
  NotInAlgebra,
  BaseMismatch,
  EndpointMismatch,
  ResolutionTooSmall,
  NotEquivariant,
  CompositionMismatch,
  LoopLeftChart,
  BasePointOffCurve,
  ChartGap,
  ParameterOrder,
  NotALoop,
  NotFlat,
  NotMaurerCartan,
  NotCovClosed,
  UnsupportedDegree,
  IncompatibleActions,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace holo
