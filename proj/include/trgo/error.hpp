#pragma once

#include <stdexcept>
#include <string>

namespace trgo {

// Base for every error raised by the library. The CLI maps ParameterError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class LimitViolation : public Error {
 public:
  LimitViolation(std::string joint, double value, double lo, double hi)
      : Error("joint " + joint + " = " + std::to_string(value) +
              " deg outside [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "]"),
        joint_(std::move(joint)) {}

  const std::string& joint() const noexcept { return joint_; }

 private:
  std::string joint_;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class MalformedTrace : public Error {
 public:
  using Error::Error;
};

class InsufficientSupport : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double condition)
      : Error(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class EvaluationError : public Error {
 public:
  EvaluationError(int generation, const std::string& what)
      : Error("generation " + std::to_string(generation) + ": " + what),
        generation_(generation) {}

  int generation() const noexcept { return generation_; }

 private:
  int generation_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace trgo
