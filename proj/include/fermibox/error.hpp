#pragma once

#include <stdexcept>
#include <string>

namespace fermibox {

// Base of every error the library raises. kind() is the stable name the CLI
// prints on stderr.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define FERMIBOX_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }      \
  };

// Argument outside the mathematical domain of an operation.
FERMIBOX_DEFINE_ERROR(DomainError)
FERMIBOX_DEFINE_ERROR(InvalidOrderError)
FERMIBOX_DEFINE_ERROR(UnsupportedIndexError)
// Particle number exceeds what the enumerated levels can hold.
FERMIBOX_DEFINE_ERROR(CapacityError)
// The chemical-potential bracket could not enclose N inside the enumerated
// spectrum; the caller should enumerate more levels.
FERMIBOX_DEFINE_ERROR(BracketFailure)
FERMIBOX_DEFINE_ERROR(NoSolutionError)
FERMIBOX_DEFINE_ERROR(QuadratureFailure)

#undef FERMIBOX_DEFINE_ERROR

}  // namespace fermibox
