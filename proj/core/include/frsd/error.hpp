#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace frsd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

/// An iterative spectral routine hit its iteration cap.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Requested edge budget cannot hold a strongly connected graph.
class InfeasibleDensity : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Problem dimension too small for the dataset's feature indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LabelError : public ParseError {
 public:
  using ParseError::ParseError;
};

class DegenerateEigenvalue : public Error {
 public:
  using Error::Error;
};

class MissingWeights : public Error {
 public:
  using Error::Error;
};

class UnknownAlgorithm : public Error {
 public:
  explicit UnknownAlgorithm(const std::string& name)
      : Error("unknown algorithm '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DegenerateStart : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NotDoublyStochastic : public Error {
 public:
  using Error::Error;
};

/// Centralized solver stopped before reaching its gradient tolerance.
/// Carries the best iterate seen so callers can still inspect it.
class OracleDidNotConverge : public Error {
 public:
  OracleDidNotConverge(Eigen::VectorXd best, double grad_norm)
      : Error("centralized oracle did not converge (grad norm " + format(grad_norm) + ")"),
        best_(std::move(best)),
        grad_norm_(grad_norm) {}
  const Eigen::VectorXd& best() const noexcept { return best_; }
  double grad_norm() const noexcept { return grad_norm_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  Eigen::VectorXd best_;
  double grad_norm_;
};

/// A node step failed inside the simulator.
class StepError : public Error {
 public:
  StepError(std::size_t round, std::size_t node, const std::string& what)
      : Error("round " + std::to_string(round) + ", node " +
              std::to_string(node) + ": " + what),
        round_(round),
        node_(node) {}
  std::size_t round() const noexcept { return round_; }
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t round_;
  std::size_t node_;
};

}  // namespace frsd
