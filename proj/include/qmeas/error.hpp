#pragma once

#include <stdexcept>
#include <string>

namespace qmeas {

enum class ErrorKind {
  invalid_dimension,
  signature_mismatch,
  contract_violation,
  truncation_leak,
  invariant_breach,
  norm_collapse,
  divergence,
  config,
};

const char* to_string(ErrorKind kind);

// Process exit status for each error kind, used by the command-line front end.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a run-time invariant (trace, hermiticity, positivity) fails.
// Carries the simulation time and magnitude for the diagnostic record.
class InvariantBreach : public Error {
 public:
  InvariantBreach(std::string invariant, double time, double magnitude);

  const std::string& invariant() const { return invariant_; }
  double time() const { return time_; }
  double magnitude() const { return magnitude_; }

 private:
  std::string invariant_;
  double time_;
  double magnitude_;
};

class TruncationLeak : public Error {
 public:
  TruncationLeak(const std::string& what, int suggested_dim)
      : Error(ErrorKind::truncation_leak, what), suggested_dim_(suggested_dim) {}

  int suggested_dim() const { return suggested_dim_; }

 private:
  int suggested_dim_;
};

}  // namespace qmeas
