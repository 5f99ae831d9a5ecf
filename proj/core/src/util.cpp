#include <algorithm>
#include <cctype>

#include "padicdyn/errors.hpp"
#include "padicdyn/prime.hpp"
#include "padicdyn/rational.hpp"

namespace padicdyn {

const char* errc_name(errc c) {
  switch (c) {
    case errc::not_prime: return "NotPrime";
    case errc::denominator_divisible_by_p: return "DenominatorDivisibleByP";
    case errc::division_by_inexact_zero: return "DivisionByInexactZero";
    case errc::precision_exhausted: return "PrecisionExhausted";
    case errc::indeterminate_valuation: return "IndeterminateValuation";
    case errc::not_a_unit: return "NotAUnit";
    case errc::incompatible_prime: return "IncompatiblePrime";
    case errc::composition_diverges: return "CompositionDiverges";
    case errc::outside_convergence_disk: return "OutsideConvergenceDisk";
    case errc::outside_exp_domain: return "OutsideExpDomain";
    case errc::outside_log_domain: return "OutsideLogDomain";
    case errc::insufficient_precision: return "InsufficientPrecision";
    case errc::no_certificate: return "NoCertificate";
    case errc::not_homothety: return "NotHomothety";
    case errc::zero_multiplier: return "ZeroMultiplier";
    case errc::multiplicative_relation_found: return "MultiplicativeRelationFound";
    case errc::non_unit_eigenvalue: return "NonUnitEigenvalue";
    case errc::unsupported_regime: return "UnsupportedRegime";
    case errc::unsupported_field_extension: return "UnsupportedFieldExtension";
    case errc::no_prime_found: return "NoPrimeFound";
    case errc::coordinate_not_unit: return "CoordinateNotUnit";
    case errc::bit_growth_exceeded: return "BitGrowthExceeded";
    case errc::no_periodic_point_found: return "NoPeriodicPointFound";
    case errc::basin_not_reached: return "BasinNotReached";
    case errc::all_strategies_failed: return "AllStrategiesFailed";
    case errc::invalid_input: return "InvalidInput";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

Rat parse_rational(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace((unsigned char)c)) t += c;
  if (t.empty()) fail(errc::invalid_input, "empty rational literal");
  auto ok_int = [](const std::string& x) {
    if (x.empty()) return false;
    size_t i = (x[0] == '-' || x[0] == '+') ? 1 : 0;
    if (i == x.size()) return false;
    for (; i < x.size(); ++i)
      if (!std::isdigit((unsigned char)x[i])) return false;
    return true;
  };
  auto slash = t.find('/');
  if (slash == std::string::npos) {
    if (!ok_int(t)) fail(errc::invalid_input, "bad rational literal '" + s + "'");
    return Rat(Int(t));
  }
  std::string num = t.substr(0, slash), den = t.substr(slash + 1);
  if (!ok_int(num) || !ok_int(den)) fail(errc::invalid_input, "bad rational literal '" + s + "'");
  Int d(den);
  if (d == 0) fail(errc::invalid_input, "zero denominator in '" + s + "'");
  Rat r(Int(num), d);
  r.canonicalize();
  return r;
}

std::string rational_to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  // Deterministic Miller-Rabin base set for the full 64-bit range.
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::pair<uint64_t, int>> factor_u64(uint64_t n) {
  std::vector<std::pair<uint64_t, int>> out;
  for (uint64_t q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
    if (n % q) continue;
    int e = 0;
    while (n % q == 0) n /= q, ++e;
    out.emplace_back(q, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

uint64_t multiplicative_order_mod_prime(const Int& a, const Prime& p) {
  Int pp((unsigned long)p.value());
  Int r = positive_mod(a, pp);
  if (r == 0) fail(errc::not_a_unit, "order of 0 mod p");
  uint64_t order = p.value() - 1;
  for (auto [q, e] : factor_u64(p.value() - 1)) {
    for (int i = 0; i < e; ++i) {
      uint64_t cand = order / q;
      if (mod_pow(r, Int((unsigned long)cand), pp) == 1)
        order = cand;
      else
        break;
    }
  }
  return order;
}

} // namespace padicdyn
