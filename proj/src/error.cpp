#include "qmeas/error.hpp"

#include <cstdio>

namespace qmeas {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::signature_mismatch: return "signature-mismatch";
    case ErrorKind::contract_violation: return "contract-violation";
    case ErrorKind::truncation_leak: return "truncation-leak";
    case ErrorKind::invariant_breach: return "invariant-breach";
    case ErrorKind::norm_collapse: return "norm-collapse";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::invariant_breach: return 3;
    case ErrorKind::truncation_leak: return 4;
    case ErrorKind::divergence: return 5;
    case ErrorKind::norm_collapse: return 6;
    case ErrorKind::invalid_dimension:
    case ErrorKind::signature_mismatch:
    case ErrorKind::contract_violation: return 7;
  }
  return 1;
}

namespace {
std::string breach_message(const std::string& invariant, double time, double magnitude) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "invariant '%s' violated at t=%.9g (magnitude %.6g)",
                invariant.c_str(), time, magnitude);
  return buf;
}
}  // namespace

InvariantBreach::InvariantBreach(std::string invariant, double time, double magnitude)
    : Error(ErrorKind::invariant_breach, breach_message(invariant, time, magnitude)),
      invariant_(std::move(invariant)),
      time_(time),
      magnitude_(magnitude) {}

}  // namespace qmeas
