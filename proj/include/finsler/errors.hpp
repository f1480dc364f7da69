#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FINSLER_DECLARE_ERROR(Name)     \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

// Jet arithmetic
FINSLER_DECLARE_ERROR(IndexOutOfRange);
FINSLER_DECLARE_ERROR(OrderExceeded);
FINSLER_DECLARE_ERROR(DivisionBySingularJet);
FINSLER_DECLARE_ERROR(DomainError);
FINSLER_DECLARE_ERROR(SingularConstantMatrix);

// Expressions
FINSLER_DECLARE_ERROR(UnknownIdentifier);
FINSLER_DECLARE_ERROR(NonLiteralExponent);

// Geometry
FINSLER_DECLARE_ERROR(SingularMetric);
FINSLER_DECLARE_ERROR(GuardViolation);
FINSLER_DECLARE_ERROR(NoAdmissiblePoints);

// Kropina change
FINSLER_DECLARE_ERROR(InvalidExponent);
FINSLER_DECLARE_ERROR(DegenerateChange);
FINSLER_DECLARE_ERROR(ZeroPhi);

// Verification harness
FINSLER_DECLARE_ERROR(AcceptanceTooLow);
FINSLER_DECLARE_ERROR(UnknownCheck);
FINSLER_DECLARE_ERROR(ConfigError);

#undef FINSLER_DECLARE_ERROR

/// Parse failure; `offset` is the byte position in the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace finsler
