#pragma once

#include <stdexcept>
#include <string>

namespace seqdec {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A policy returned a decision that violates the model's feasibility test.
/// Carries the step index so the offending period can be located in a run.
class FeasibilityError : public Error {
public:
  FeasibilityError(int step, const std::string& constraint)
      : Error("infeasible decision at step " + std::to_string(step) + ": " + constraint),
        step_(step), constraint_(constraint) {}

  int step() const { return step_; }
  const std::string& constraint() const { return constraint_; }

private:
  int step_;
  std::string constraint_;
};

/// Invalid model data or parameters (bad dimensions, non-stochastic rows, ...).
class ModelError : public Error {
public:
  explicit ModelError(const std::string& what) : Error(what) {}
};

/// Conditioning on an observation that has zero probability under the model.
class ImpossibleObservationError : public Error {
public:
  explicit ImpossibleObservationError(const std::string& what) : Error(what) {}
};

/// A solver refused to run because the instance exceeds its size caps.
class SizeError : public Error {
public:
  explicit SizeError(const std::string& what) : Error(what) {}
};

} // namespace seqdec
