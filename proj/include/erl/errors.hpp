#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace erl {

// Input that violates a contract. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Environment failures (files, network). The CLI maps these to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownLabel : public ValidationError {
 public:
  UnknownLabel(const std::string& axis, const std::string& text)
      : ValidationError("unknown " + axis + " label '" + text + "'"), axis_(axis), text_(text) {}
  const std::string& axis() const noexcept { return axis_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::string axis_;
  std::string text_;
};

class InvalidTuple : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownConstraintId : public ValidationError {
 public:
  explicit UnknownConstraintId(const std::string& id)
      : ValidationError("unknown constraint id '" + id + "'") {}
};

class ArityMismatch : public ValidationError {
 public:
  ArityMismatch(std::size_t expected, std::size_t got)
      : ValidationError("expected " + std::to_string(expected) + " event names, got " +
                        std::to_string(got)) {}
};

class TooFewAxes : public ValidationError {
 public:
  explicit TooFewAxes(std::size_t got)
      : ValidationError("at least two relation axes must be evaluated, got " +
                        std::to_string(got)) {}
};

class PairMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class HopOutOfRange : public ValidationError {
 public:
  explicit HopOutOfRange(int hops)
      : ValidationError("hop count " + std::to_string(hops) + " outside [2, 8]") {}
};

class NotComposable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MalformedRecord : public ValidationError {
 public:
  MalformedRecord(std::size_t line, const std::string& reason)
      : ValidationError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LengthMismatch : public ValidationError {
 public:
  LengthMismatch(std::size_t predictions, std::size_t golds)
      : ValidationError(std::to_string(predictions) + " predictions for " +
                        std::to_string(golds) + " gold samples") {}
};

class IdMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingDemoRationale : public ValidationError {
 public:
  explicit MissingDemoRationale(const std::string& demo_id)
      : ValidationError("chain-of-thought strategy needs a rationale for demo '" + demo_id + "'") {}
};

class IoError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class GatewayError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace erl
