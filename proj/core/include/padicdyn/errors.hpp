#pragma once

#include <stdexcept>
#include <string>

namespace padicdyn {

// Every recoverable failure in the library carries one of these codes so
// callers (and the CLI exit-code mapping) can branch without string matching.
enum class errc {
  not_prime,
  denominator_divisible_by_p,
  division_by_inexact_zero,
  precision_exhausted,
  indeterminate_valuation,
  not_a_unit,
  incompatible_prime,
  composition_diverges,
  outside_convergence_disk,
  outside_exp_domain,
  outside_log_domain,
  insufficient_precision,
  no_certificate,
  not_homothety,
  zero_multiplier,
  multiplicative_relation_found,
  non_unit_eigenvalue,
  unsupported_regime,
  unsupported_field_extension,
  no_prime_found,
  coordinate_not_unit,
  bit_growth_exceeded,
  no_periodic_point_found,
  basin_not_reached,
  all_strategies_failed,
  invalid_input,
  internal,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace padicdyn
