#ifndef PETREG_ERRORS_HPP
#define PETREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace petreg {

/// A linear system that was expected to be solvable has no (unique) solution.
class NoSolutionError : public std::runtime_error {
 public:
  explicit NoSolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// Design parameters violate a feasibility inequality; the message names it.
class InfeasibleParametersError : public std::runtime_error {
 public:
  explicit InfeasibleParametersError(const std::string& what) : std::runtime_error(what) {}
};

/// A simulated state grew past the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// A scenario document failed validation; key_path points at the offender.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::string key_path)
      : std::runtime_error(what + " (at " + key_path + ")"), key_path_(std::move(key_path)) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace petreg

#endif  // PETREG_ERRORS_HPP
