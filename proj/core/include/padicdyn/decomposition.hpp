#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace padicdyn {

// The arithmetic progression {start, start + modulus, start + 2*modulus, ...}.
struct Progression {
  long start;
  long modulus;
  bool operator==(const Progression&) const = default;
};

enum class CertificateLevel { rigorous, heuristic, brute_force_only };

const char* certificate_name(CertificateLevel c);

// Return set of an orbit problem: finitely many arithmetic progressions plus
// a finite exceptional set.  Canonical form: progressions pairwise disjoint,
// none a subset of another, starts minimal (adjacent exceptional indices are
// absorbed), exceptional sorted and disjoint from every progression.
struct ReturnSetDecomposition {
  std::vector<Progression> progressions;
  std::vector<long> exceptional;
  CertificateLevel certificate = CertificateLevel::rigorous;
  uint64_t prime = 0; // 0 when no prime was used
  long d = 0;
  long period = 0; // M: period length of the underlying periodic point
  long burn_in = 0; // N0: indices checked directly before the analytic regime
  // When set: membership was verified exhaustively for n < verified_bound and
  // the certificate applies only to that window (brute-force-only results).
  std::optional<long> verified_bound;

  bool member(long n) const;
  std::vector<char> window(long n_max) const;
  std::string to_string() const;

  bool same_set(const ReturnSetDecomposition& other) const {
    return progressions == other.progressions && exceptional == other.exceptional;
  }
};

// Normalize raw solver output into the canonical form: residue classes are
// merged modulo the lcm of the moduli, re-expressed with the smallest moduli
// that still describe full classes, progression starts are walked down
// through adjacent exceptional members, and covered indices are removed from
// the exceptional list.
ReturnSetDecomposition canonicalize(std::vector<Progression> progressions,
                                    std::vector<long> exceptional);

} // namespace padicdyn
