#include "padicdyn/decomposition.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "padicdyn/errors.hpp"

namespace padicdyn {

namespace {

bool raw_member(const std::vector<Progression>& progs,
                const std::vector<long>& exc, long n) {
  for (const auto& pr : progs)
    if (n >= pr.start && (n - pr.start) % pr.modulus == 0) return true;
  return std::binary_search(exc.begin(), exc.end(), n);
}

std::vector<long> divisors_ascending(long L) {
  std::vector<long> ds;
  for (long d = 1; d * d <= L; ++d)
    if (L % d == 0) {
      ds.push_back(d);
      if (d != L / d) ds.push_back(L / d);
    }
  std::sort(ds.begin(), ds.end());
  return ds;
}

} // namespace

const char* certificate_name(CertificateLevel c) {
  switch (c) {
    case CertificateLevel::rigorous: return "rigorous";
    case CertificateLevel::heuristic: return "heuristic";
    case CertificateLevel::brute_force_only: return "brute-force-only";
  }
  return "unknown";
}

bool ReturnSetDecomposition::member(long n) const {
  if (n < 0) return false;
  return raw_member(progressions, exceptional, n);
}

std::vector<char> ReturnSetDecomposition::window(long n_max) const {
  std::vector<char> bits((size_t)std::max(n_max, 0L), 0);
  for (long n = 0; n < n_max; ++n) bits[(size_t)n] = member(n) ? 1 : 0;
  return bits;
}

std::string ReturnSetDecomposition::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& pr : progressions) {
    if (!first) os << ", ";
    first = false;
    os << pr.start << " + " << pr.modulus << "N";
  }
  for (long n : exceptional) {
    if (!first) os << ", ";
    first = false;
    os << n;
  }
  os << "} [" << certificate_name(certificate) << "]";
  return os.str();
}

ReturnSetDecomposition canonicalize(std::vector<Progression> progressions,
                                    std::vector<long> exceptional) {
  for (const auto& pr : progressions)
    if (pr.start < 0 || pr.modulus < 1)
      fail(errc::internal, "progression with negative start or modulus < 1");
  for (long n : exceptional)
    if (n < 0) fail(errc::internal, "negative exceptional index");
  std::sort(exceptional.begin(), exceptional.end());
  exceptional.erase(std::unique(exceptional.begin(), exceptional.end()),
                    exceptional.end());

  ReturnSetDecomposition out;
  if (progressions.empty()) {
    out.exceptional = std::move(exceptional);
    return out;
  }

  long L = 1;
  for (const auto& pr : progressions) {
    L = std::lcm(L, pr.modulus);
    if (L > 10'000'000L) fail(errc::internal, "progression lcm too large");
  }
  long T = 0;
  for (const auto& pr : progressions) T = std::max(T, pr.start);
  if (!exceptional.empty()) T = std::max(T, exceptional.back() + 1);

  // Residues mod L that are eventually members.
  std::vector<char> R((size_t)L, 0);
  for (const auto& pr : progressions)
    for (long r = pr.start % pr.modulus; r < L; r += pr.modulus)
      R[(size_t)r] = 1;

  // Partition the eventual residues into full classes with the smallest
  // moduli dividing L, smallest first, keeping classes pairwise disjoint.
  std::vector<char> covered((size_t)L, 0);
  std::vector<Progression> classes; // start holds the residue for now
  for (long m : divisors_ascending(L)) {
    for (long c = 0; c < m; ++c) {
      bool ok = true;
      for (long r = c; r < L; r += m)
        if (!R[(size_t)r] || covered[(size_t)r]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (long r = c; r < L; r += m) covered[(size_t)r] = 1;
      classes.push_back({c, m});
    }
  }

  // Minimal start per class: walk down through the pre-threshold prefix.
  for (auto& cl : classes) {
    long start = cl.start;
    for (long n = cl.start; n < T; n += cl.modulus)
      if (!raw_member(progressions, exceptional, n)) start = n + cl.modulus;
    cl.start = start;
  }
  std::sort(classes.begin(), classes.end(),
            [](const Progression& a, const Progression& b) {
              return a.start != b.start ? a.start < b.start
                                        : a.modulus < b.modulus;
            });

  // Members below the threshold not covered by a canonical class.
  std::vector<long> leftover;
  for (long n = 0; n < T; ++n) {
    if (!raw_member(progressions, exceptional, n)) continue;
    bool in_class = false;
    for (const auto& cl : classes)
      if (n >= cl.start && (n - cl.start) % cl.modulus == 0) {
        in_class = true;
        break;
      }
    if (!in_class) leftover.push_back(n);
  }

  out.progressions = std::move(classes);
  out.exceptional = std::move(leftover);
  return out;
}

} // namespace padicdyn
