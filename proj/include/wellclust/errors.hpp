#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wellclust {

/// Precondition violated by the caller (empty set, isolated vertex, k > n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solver hit its iteration cap. Carries the best residuals seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Fewer than k candidate centers survived trimming.
class SeedingFailure : public std::runtime_error {
 public:
  SeedingFailure(const std::string& what, int survivors)
      : std::runtime_error(what), survivors_(survivors) {}

  int survivors() const noexcept { return survivors_; }

 private:
  int survivors_;
};

/// The indicator/eigenvector coefficient matrix is singular or badly conditioned.
class DegenerateStructure : public std::runtime_error {
 public:
  DegenerateStructure(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Every temperature of the fast pipeline failed to produce k centers.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& what, std::vector<std::string> failures)
      : std::runtime_error(what), failures_(std::move(failures)) {}
  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

}  // namespace wellclust
