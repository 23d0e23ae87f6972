#pragma once

#include <stdexcept>
#include <string>

/**
 * \file error.hpp
 *
 * @brief Exception hierarchy shared by every sympb module.
 *
 * Two families exist. ``DomainError`` covers numerical-domain failures (an energy below the saddle, a matrix that is
 * not positive definite, a root that cannot be bracketed). ``InputError`` covers malformed input: wrong arity, odd
 * dimensions, unreadable files. The CLI maps the first family to exit code 1 and the second to exit code 2.
 */

namespace sympb {

  class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  class DomainError : public Error {
  public:
    using Error::Error;
  };

  class InputError : public Error {
  public:
    using Error::Error;
  };

  // -- input family --

  class DimensionError : public InputError {
  public:
    using InputError::InputError;
  };

  class ArityError : public InputError {
  public:
    using InputError::InputError;
  };

  class ParseError : public InputError {
  public:
    using InputError::InputError;
  };

  class PreconditionError : public InputError {
  public:
    using InputError::InputError;
  };

  class IoError : public InputError {
  public:
    using InputError::InputError;
  };

  // -- numerical-domain family --

  class DefinitenessError : public DomainError {
  public:
    using DomainError::DomainError;
  };

  class SpectrumError : public DomainError {
  public:
    using DomainError::DomainError;
  };

  class BelowSaddleError : public DomainError {
  public:
    using DomainError::DomainError;
  };

  class NoRootError : public DomainError {
  public:
    using DomainError::DomainError;
  };

  class NonPositiveRateError : public DomainError {
  public:
    using DomainError::DomainError;
  };

  class SamplingError : public DomainError {
  public:
    using DomainError::DomainError;
  };

  /// Raised when an integrated state stops being finite; ``time()`` is the first time at which it was observed.
  class DivergenceError : public DomainError {
  public:
    DivergenceError(std::string const& what, double time) : DomainError(what), m_time(time) {}

    [[nodiscard]] double time() const noexcept { return m_time; }

  private:
    double m_time;
  };

}  // namespace sympb
