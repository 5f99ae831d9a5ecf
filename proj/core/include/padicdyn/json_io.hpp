#pragma once

#include <optional>
#include <string>

namespace padicdyn {

// Flag-level overrides for the subcommand pipelines; a set value wins over
// the corresponding field of the input file.
struct CliOptions {
  std::optional<int> precision;
  std::optional<int> degree;
  std::optional<long> n_max;
  std::optional<std::string> strategy;
  std::optional<long> prime;
  bool timing = false;  // adds a wall-clock block (breaks byte determinism)
};

// Outcome of one subcommand pipeline: stdout payload (JSON, or text for
// explain), a diagnostic line for stderr (empty when clean), and the process
// exit code: 0 success, 2 no admissible prime / all strategies failed,
// 1 malformed input or internal fault.
struct CliOutcome {
  std::string out;
  std::string err;
  int exit_code = 0;
};

// Subcommand pipelines.  Each takes the raw input text (hashed into the
// result envelope), validates it strictly (unknown fields are rejected with
// a JSON pointer path), runs the solver, and renders a deterministic
// two-space-indented envelope:
//   {result, certificate, timing, version, input_hash}
CliOutcome run_sml(const std::string& input, const CliOptions& opts);
CliOutcome run_orbit(const std::string& input, const CliOptions& opts);
CliOutcome run_linearize(const std::string& input, const CliOptions& opts);
CliOutcome run_newton(const std::string& input, const CliOptions& opts);
CliOutcome run_jordan(const std::string& input, const CliOptions& opts);

// Renders a previously produced result envelope as a human-readable report:
// per-class outcomes, prime / period / d / burn-in, certificate caveats.
CliOutcome run_explain(const std::string& envelope_json);

std::string tool_version();

// 64-bit FNV-1a over the raw bytes, as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& data);

}  // namespace padicdyn
