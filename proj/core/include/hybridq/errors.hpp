#pragma once

#include <stdexcept>
#include <string>

namespace hybridq {

// Base of every error the library raises; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HYBRIDQ_ERROR(Name)             \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

HYBRIDQ_ERROR(InvalidBudget);
HYBRIDQ_ERROR(DepthExceeded);
HYBRIDQ_ERROR(DegreeOverflow);
HYBRIDQ_ERROR(OutOfDomain);
HYBRIDQ_ERROR(InvalidWindow);
HYBRIDQ_ERROR(InvalidSize);
HYBRIDQ_ERROR(InvalidOperator);
HYBRIDQ_ERROR(NotApplicable);
HYBRIDQ_ERROR(InvalidInput);
HYBRIDQ_ERROR(InsufficientData);
HYBRIDQ_ERROR(Singular);
HYBRIDQ_ERROR(IoError);

#undef HYBRIDQ_ERROR

}  // namespace hybridq
