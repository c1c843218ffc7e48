#pragma once

#include <stdexcept>
#include <string>

namespace aperiodica {

enum class ErrorKind {
  ParseError,
  ValidationError,
  TooFewPoints,
  DimensionMismatch,
  RelationAmbiguity,
  DegenerateSpan,
  InsufficientProfile,
  PointNotInSample,
  RankNotExceedingD,
  SingularLattice,
  DegenerateHull,
  NoNonSingularFound,
  EmptyIntersection,
  UnboundedEnumeration,
  UnknownRule,
  UnsupportedDimension,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace aperiodica
