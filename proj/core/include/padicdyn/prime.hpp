#pragma once

#include <cstdint>
#include <vector>

#include "padicdyn/errors.hpp"
#include "padicdyn/rational.hpp"

namespace padicdyn {

bool is_prime_u64(uint64_t n);

// A validated prime; construction rejects composites so downstream code never
// re-checks.
class Prime {
public:
  explicit Prime(uint64_t p) : p_(p) {
    if (!is_prime_u64(p)) fail(errc::not_prime, std::to_string(p) + " is not prime");
  }
  uint64_t value() const noexcept { return p_; }
  bool operator==(const Prime& o) const noexcept { return p_ == o.p_; }
  bool operator!=(const Prime& o) const noexcept { return p_ != o.p_; }

private:
  uint64_t p_;
};

// Ascending factorization of n (with multiplicity collapsed), n >= 1.
std::vector<std::pair<uint64_t, int>> factor_u64(uint64_t n);

// Multiplicative order of a mod m for gcd(a, m) = 1, via factoring the group
// order when m is prime (general m uses lambda-style search, small m only).
uint64_t multiplicative_order_mod_prime(const Int& a, const Prime& p);

} // namespace padicdyn
