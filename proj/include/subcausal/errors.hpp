#pragma once

#include <stdexcept>
#include <string>

namespace subcausal {

// Bad input: malformed tables, dimension mismatches, schema violations.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// The requested model cannot be reconciled with the data: rank-deficient
// identification systems, negative missingness odds, no admissible root.
// `code()` distinguishes the failure modes programmatically.
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// An iterative solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subcausal
