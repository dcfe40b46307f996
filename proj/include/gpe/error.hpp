#pragma once

#include <stdexcept>
#include <string>

namespace gpe {

// Base of every error thrown by the library. Each failure mode named by the
// public contracts gets its own subclass so callers can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GPE_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

GPE_DEFINE_ERROR(InvalidGrid);
GPE_DEFINE_ERROR(GridMismatch);
GPE_DEFINE_ERROR(DecayViolation);
GPE_DEFINE_ERROR(ZeroMass);
GPE_DEFINE_ERROR(InvalidTriple);
GPE_DEFINE_ERROR(NotOnManifold);
GPE_DEFINE_ERROR(BadEndpoints);
GPE_DEFINE_ERROR(InvalidCouplings);
GPE_DEFINE_ERROR(NumericalBlowup);
GPE_DEFINE_ERROR(NotConvergedInput);
GPE_DEFINE_ERROR(ValidationError);
GPE_DEFINE_ERROR(BadMagic);
GPE_DEFINE_ERROR(VersionMismatch);
GPE_DEFINE_ERROR(TruncatedFile);
GPE_DEFINE_ERROR(DimensionOverflow);
GPE_DEFINE_ERROR(IoError);

#undef GPE_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace gpe
