#pragma once

#include <stdexcept>
#include <string>

namespace hmd {

// Invalid primitive: non-monotone grid, negative weight, mass not summing to one.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Conditioning on an event of zero probability.
class ConditioningError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameter outside the domain of a family or function (e.g. precision not in [0,1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inputs that violate an operation's precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requires an assumption the inputs do not satisfy (e.g. affine demand).
class UnsupportedAssumption : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration would exceed the configured search budget.
class BudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Internal cross-check failed; indicates a numerical or modelling bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hmd
