#pragma once

#include <stdexcept>
#include <string>

namespace gipeps {

enum class Errc {
  UnknownLabel,
  UntruncatedLieGroup,
  NotApplicable,
  EmptyResult,
  FiniteGroupOnly,
  IncompleteTruncation,
  SU2Only,
  InadmissibleFusionKey,
  LegMismatch,
  TooLarge,
  EmptyState,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace gipeps
