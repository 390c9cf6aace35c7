#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace credence {

// Root of the library's exception hierarchy. Two branches matter to callers:
// ValidationError means the input itself is bad (schema violations,
// out-of-domain arguments); ComputationError means a legal input led to a
// computation that cannot proceed (impossible evidence, every bead wasted).
// The CLI maps them to exit codes 1 and 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ComputationError : public Error {
 public:
  using Error::Error;
};

// Argument outside its mathematical domain (probability not in [0,1],
// negative information, ...).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// All-zero weight vector passed to normalize().
class DegenerateWeightsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Two values that must share a hypothesis space do not.
class SpaceMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// kl_divergence(a, b) with a putting mass where b has none.
class AbsoluteContinuityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Datum names an outcome the observation model does not define.
class UnknownOutcomeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Stochastic population step without a population size.
class MissingSizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyDesignSpaceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Malformed input file (not JSON, wrong JSON types).
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Command applied to a scenario of the wrong kind.
class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Evidence with zero marginal: impossible under every hypothesis that still
// carries prior mass. Carries the sequential step index when one applies.
class ContradictoryEvidenceError : public ComputationError {
 public:
  explicit ContradictoryEvidenceError(const std::string& what,
                                      std::optional<std::size_t> step = std::nullopt)
      : ComputationError(what), step_(step) {}

  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  std::optional<std::size_t> step_;
};

}  // namespace credence
