#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kolmo/geometry.hpp"

namespace kolmo {

/// Base of every structured failure raised by the library. `kind()` is a
/// stable machine-readable tag used by the CLI when reporting errors.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A field produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& message, Point where)
      : Error("evaluation", message), where_(where) {}
  const Point& where() const noexcept { return where_; }

 private:
  Point where_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

class UnknownNameError : public Error {
 public:
  explicit UnknownNameError(const std::string& message)
      : Error("unknown-name", message) {}
};

class InsufficientResolutionError : public Error {
 public:
  explicit InsufficientResolutionError(const std::string& message)
      : Error("insufficient-resolution", message) {}
};

class EllipticityError : public Error {
 public:
  explicit EllipticityError(const std::string& message)
      : Error("ellipticity", message) {}
};

class ConfinementError : public Error {
 public:
  explicit ConfinementError(const std::string& message)
      : Error("confinement", message) {}
};

/// One clause of Condition (H) failed at `witness`.
class ConditionViolation : public Error {
 public:
  ConditionViolation(std::string clause, Point witness, const std::string& message)
      : Error("condition-h", message), clause_(std::move(clause)), witness_(witness) {}
  const std::string& clause() const noexcept { return clause_; }
  const Point& witness() const noexcept { return witness_; }

 private:
  std::string clause_;
  Point witness_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, std::vector<double> history)
      : Error("convergence", message), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

class PositivityError : public Error {
 public:
  explicit PositivityError(const std::string& message) : Error("positivity", message) {}
};

class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& message) : Error("truncation", message) {}
};

class IncompatibilityError : public Error {
 public:
  explicit IncompatibilityError(const std::string& message)
      : Error("incompatibility", message) {}
};

class DegenerateDensityError : public Error {
 public:
  explicit DegenerateDensityError(const std::string& message)
      : Error("degenerate-density", message) {}
};

class SupportError : public Error {
 public:
  explicit SupportError(const std::string& message) : Error("support", message) {}
};

class DivisionGuardError : public Error {
 public:
  explicit DivisionGuardError(const std::string& message)
      : Error("division-guard", message) {}
};

/// Picard iteration hit its budget while the gap sequence was not monotone.
class NonContractionError : public Error {
 public:
  NonContractionError(const std::string& message, std::vector<double> gaps)
      : Error("non-contraction", message), gaps_(std::move(gaps)) {}
  const std::vector<double>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<double> gaps_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error("parse", message), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace kolmo
