#pragma once
// The three experiment commands behind the CLI. Each returns the report text
// and an exit status instead of writing files itself, so tests can compare
// CLI output with library calls directly.

#include <functional>
#include <string>

#include "entrocurve/config.hpp"

namespace entrocurve {

struct CommandResult {
  int exit_code = 0;
  std::string output;   // report body (JSON or CSV)
  std::string message;  // one-line summary or error text for stderr
};

// JSON: limit coupling support, W1, Q_t^0 per t, slowing-down diagnostics.
CommandResult cmd_bridge(const ExperimentConfig& cfg);
// CSV (or JSON when cfg.out ends in .json); exit 1 iff some gap < -gap_tol.
CommandResult cmd_convexity(const ExperimentConfig& cfg);
// JSON: closed-form derivatives against central differences per (gamma, t),
// plus the zero-temperature lower bounds for phi'' and psi''.
CommandResult cmd_derivative_audit(const ExperimentConfig& cfg);

// Runs a command, mapping input errors to exit 2 and numerical failures to exit 3.
CommandResult run_guarded(const std::function<CommandResult()>& body);

// Relative error used by the derivative audit: |a - b| / max(|a|, |b|, floor).
double audit_relative_error(double closed_form, double finite_difference);

}  // namespace entrocurve
