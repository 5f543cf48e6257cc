#pragma once

#include <stdexcept>
#include <string>

namespace contest {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Truncating a distribution at a point that leaves no probability mass.
class DegenerateTruncation : public DomainError {
public:
  using DomainError::DomainError;
};

// Invalid contest / run configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// The objective machinery needs g(e) = k e.
class UnsupportedCost : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Quadrature failed to converge or an expectation diverged.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace contest
