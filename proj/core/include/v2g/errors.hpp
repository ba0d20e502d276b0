#pragma once

#include <stdexcept>
#include <string>

namespace v2g {

/// Invalid model or scenario parameters (bad rates, probabilities, ranges).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Not enough observations to form an estimate.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An EV was routed to a queue whose energy requirement is negative for it.
class StateClassificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Simulator bookkeeping went out of sync (unknown EV, wrong queue).
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace v2g
