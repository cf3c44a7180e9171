#ifndef URYSOHN_ERRORS_HPP
#define URYSOHN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace urysohn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: wrong dimensions, nonpositive parameters, misaligned grids.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Unknown registry name.
class LookupError : public Error {
public:
  using Error::Error;
};

/// A hypothesis of an inequality was violated (e.g. psi >= 1/sqrt(2)).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Computed constants contradict an assumption that should have held.
class InconsistencyError : public Error {
public:
  using Error::Error;
};

/// Raised when an iteration or construction fails to reach its target.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Sphere net could not be certified.
class ConstructionError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Finite control set larger than the requested cap.
class EnumerationTooLarge : public Error {
public:
  EnumerationTooLarge(const std::string& what, std::size_t cap)
      : Error(what), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

private:
  std::size_t cap_;
};

} // namespace urysohn

#endif // URYSOHN_ERRORS_HPP
