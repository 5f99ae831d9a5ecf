#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

#include "padicdyn/errors.hpp"

namespace padicdyn {

using Int = mpz_class;
using Rat = mpq_class;

inline Int pow_ui(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int prime_power(uint64_t p, unsigned long e) { return pow_ui(Int((unsigned long)p), e); }

// Multiplicity of q in n.  n must be nonzero.
inline long int_valuation(const Int& n, const Int& q) {
  if (n == 0) fail(errc::internal, "valuation of zero integer");
  Int rest;
  return (long)mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), q.get_mpz_t());
}

// v_q(r) for nonzero rational r; nullopt for r = 0.
inline std::optional<long> rat_valuation(const Rat& r, const Int& q) {
  if (r == 0) return std::nullopt;
  return int_valuation(r.get_num(), q) - int_valuation(r.get_den(), q);
}

inline Int mod_pow(Int base, Int exp, const Int& mod) {
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

inline Int mod_inverse(const Int& a, const Int& mod) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0)
    fail(errc::not_a_unit, "no inverse of " + a.get_str() + " mod " + mod.get_str());
  return r;
}

inline Int positive_mod(const Int& a, const Int& mod) {
  Int r = a % mod;
  if (r < 0) r += mod;
  return r;
}

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return (uint64_t)((unsigned __int128)a * b % m);
}

inline uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1u) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

inline uint64_t inverse_u64(uint64_t a, uint64_t m) {
  return mod_inverse(Int((unsigned long)a), Int((unsigned long)m)).get_ui();
}

inline uint64_t positive_mod_u64(const Int& a, uint64_t m) {
  return positive_mod(a, Int((unsigned long)m)).get_ui();
}

// "a" or "a/b"; whitespace trimmed by the caller.
Rat parse_rational(const std::string& s);
std::string rational_to_string(const Rat& r);

} // namespace padicdyn
