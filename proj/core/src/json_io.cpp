#include "padicdyn/json_io.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "padicdyn/dml.hpp"
#include "padicdyn/errors.hpp"
#include "padicdyn/jordan_power.hpp"
#include "padicdyn/linearize.hpp"
#include "padicdyn/newton.hpp"
#include "padicdyn/sml.hpp"

namespace padicdyn {
namespace {

using json = nlohmann::ordered_json;

// Schema violation with a JSON pointer to the offending field.
struct schema_error {
  std::string pointer;
  std::string message;
};

[[noreturn]] void bad(const std::string& pointer, const std::string& message) {
  throw schema_error{pointer.empty() ? "/" : pointer, message};
}

void check_keys(const json& o, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!o.is_object()) bad(path, "expected an object");
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad(path + "/" + it.key(), "unknown field");
  }
}

const json& need(const json& o, const char* key, const std::string& path) {
  if (!o.is_object() || !o.contains(key))
    bad(path, std::string("missing required field '") + key + "'");
  return o.at(key);
}

Rat get_rat(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rat((long)v.get<long long>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const error& e) {
      bad(path, e.what());
    }
  }
  bad(path, "expected an integer or a rational string \"a/b\"");
}

long get_long(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return (long)v.get<long long>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

QMatrix get_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) bad(path, "expected a nonempty array of rows");
  int n = (int)v.size();
  std::vector<Rat> entries;
  entries.reserve((size_t)n * (size_t)n);
  for (int r = 0; r < n; ++r) {
    const json& row = v[(size_t)r];
    if (!row.is_array() || (int)row.size() != n)
      bad(path + "/" + std::to_string(r),
          "expected a row of length " + std::to_string(n));
    for (int c = 0; c < n; ++c)
      entries.push_back(get_rat(row[(size_t)c], path + "/" + std::to_string(r) +
                                                    "/" + std::to_string(c)));
  }
  return QMatrix(n, std::move(entries));
}

std::vector<Rat> get_point(const json& v, int g, const std::string& path) {
  if (!v.is_array() || (int)v.size() != g)
    bad(path, "expected an array of " + std::to_string(g) + " rationals");
  std::vector<Rat> out;
  for (int i = 0; i < g; ++i)
    out.push_back(get_rat(v[(size_t)i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<MultiPolyQ> get_variety(const json& v, int g, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of polynomial strings");
  std::vector<MultiPolyQ> out;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string s = get_string(v[i], path + "/" + std::to_string(i));
    try {
      out.push_back(parse_poly(s, g));
    } catch (const error& e) {
      bad(path + "/" + std::to_string(i), e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string rat_str(const Rat& x) { return rational_to_string(x); }

json padic_json(const PadicNumber& x) {
  json o;
  if (x.is_exact_zero()) {
    o["v"] = nullptr;
    o["unit"] = "0";
    o["N"] = nullptr;
  } else if (x.is_inexact_zero()) {
    o["v"] = nullptr;
    o["unit"] = "0";
    o["N"] = x.valuation_lower_bound();
  } else {
    o["v"] = x.valuation();
    o["unit"] = x.unit().get_str();
    o["N"] = x.relative_precision();
  }
  return o;
}

json multiseries_json(const MultiSeries& h) {
  json o;
  o["nvars"] = h.nvars();
  o["maxdeg"] = h.maxdeg();
  json terms = json::array();
  for (const auto& [e, c] : h.terms()) {
    json t;
    t["e"] = e;
    t["c"] = padic_json(c);
    terms.push_back(std::move(t));
  }
  o["terms"] = std::move(terms);
  return o;
}

const char* cert_name(CertificateLevel c) {
  switch (c) {
    case CertificateLevel::rigorous: return "rigorous";
    case CertificateLevel::heuristic: return "heuristic";
    default: return "brute-force-only";
  }
}

json decomposition_json(const ReturnSetDecomposition& d) {
  json o;
  json ps = json::array();
  for (const auto& pr : d.progressions) {
    json p;
    p["start"] = pr.start;
    p["modulus"] = pr.modulus;
    ps.push_back(std::move(p));
  }
  o["progressions"] = std::move(ps);
  o["exceptional"] = d.exceptional;
  o["certificate"] = cert_name(d.certificate);
  o["prime"] = d.prime == 0 ? json(nullptr) : json(d.prime);
  o["d"] = d.d;
  o["period"] = d.period;
  o["burn_in"] = d.burn_in;
  o["verified_bound"] = d.verified_bound ? json(*d.verified_bound) : json(nullptr);
  return o;
}

// ---------------------------------------------------------------------------
// Envelope and dispatch plumbing

std::string render(const json& j) { return j.dump(2) + "\n"; }

CliOutcome finish_envelope(json result, const std::string& certificate,
                           const std::string& input, bool timing, double ms) {
  json env;
  env["result"] = std::move(result);
  env["certificate"] = certificate;
  env["timing"] = timing ? json{{"ms", (long long)std::llround(ms)}} : json(nullptr);
  env["version"] = tool_version();
  env["input_hash"] = fnv1a64_hex(input);
  return {render(env), "", 0};
}

template <typename Body>
CliOutcome pipeline(const std::string& input, bool timing, Body&& body) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto [result, certificate] = body();
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    return finish_envelope(std::move(result), certificate, input, timing, ms);
  } catch (const schema_error& se) {
    json e;
    e["error"] = json{{"code", "InvalidInput"},
                      {"message", se.message},
                      {"pointer", se.pointer}};
    return {render(e), "invalid input at " + se.pointer + ": " + se.message, 1};
  } catch (const error& e) {
    int exit_code = (e.code() == errc::no_prime_found ||
                     e.code() == errc::all_strategies_failed)
                        ? 2
                        : 1;
    json j;
    j["error"] = json{{"code", errc_name(e.code())}, {"message", e.what()}};
    return {render(j), e.what(), exit_code};
  } catch (const std::exception& e) {
    json j;
    j["error"] = json{{"code", "InvalidInput"}, {"message", e.what()}};
    return {render(j), e.what(), 1};
  }
}

// The shared optional "options" block; CLI flags override file values.
struct Effective {
  std::optional<int> precision;
  std::optional<int> degree;
  std::optional<long> n_max;
};

Effective read_options(const json& in, const CliOptions& opts) {
  Effective eff;
  if (in.contains("options")) {
    const json& o = in.at("options");
    check_keys(o, "/options", {"precision", "degree", "nmax"});
    if (o.contains("precision")) eff.precision = (int)get_long(o.at("precision"), "/options/precision");
    if (o.contains("degree")) eff.degree = (int)get_long(o.at("degree"), "/options/degree");
    if (o.contains("nmax")) eff.n_max = get_long(o.at("nmax"), "/options/nmax");
  }
  if (opts.precision) eff.precision = opts.precision;
  if (opts.degree) eff.degree = opts.degree;
  if (opts.n_max) eff.n_max = opts.n_max;
  return eff;
}

void check_kind(const json& in, const char* kind) {
  if (in.contains("kind") && in.at("kind") != json(kind))
    bad("/kind", std::string("payload kind does not match subcommand '") + kind + "'");
}

}  // namespace

std::string tool_version() { return "padicdyn 0.1.0"; }

std::string fnv1a64_hex(const std::string& data) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return std::string(buf);
}

CliOutcome run_sml(const std::string& input, const CliOptions& opts) {
  return pipeline(input, opts.timing, [&]() -> std::pair<json, std::string> {
    json in = json::parse(input);
    check_keys(in, "", {"version", "kind", "options", "type", "matrix", "point",
                        "variety", "prime", "nmax"});
    check_kind(in, "sml");
    Effective eff = read_options(in, opts);

    const std::string type = get_string(need(in, "type", ""), "/type");
    if (type != "linear" && type != "torus")
      bad("/type", "expected \"linear\" or \"torus\"");
    QMatrix L = get_matrix(need(in, "matrix", ""), "/matrix");
    int g = L.dim();
    std::vector<Rat> alpha = get_point(need(in, "point", ""), g, "/point");
    std::vector<MultiPolyQ> variety =
        get_variety(need(in, "variety", ""), g, "/variety");

    std::optional<Prime> hint;
    if (opts.prime)
      hint = Prime((uint64_t)*opts.prime);
    else if (in.contains("prime"))
      hint = Prime((uint64_t)get_long(in.at("prime"), "/prime"));

    SolveOptions so;
    if (eff.precision) so.precision = *eff.precision;
    if (eff.degree) so.degree = *eff.degree;
    if (in.contains("nmax")) so.n_max = get_long(in.at("nmax"), "/nmax");
    if (eff.n_max) so.n_max = *eff.n_max;

    ReturnSetDecomposition dec;
    if (type == "linear") {
      LinearOrbitProblem pb{std::move(L), std::move(alpha), std::move(variety), hint};
      dec = solve_linear(pb, so);
    } else {
      TorusOrbitProblem pb{std::move(L), std::move(alpha), std::move(variety), hint};
      dec = solve_torus(pb, so);
    }
    return {decomposition_json(dec), cert_name(dec.certificate)};
  });
}

CliOutcome run_orbit(const std::string& input, const CliOptions& opts) {
  return pipeline(input, opts.timing, [&]() -> std::pair<json, std::string> {
    json in = json::parse(input);
    check_keys(in, "", {"version", "kind", "options", "p", "maps", "point",
                        "variety", "strategy", "bounds"});
    check_kind(in, "orbit");
    Effective eff = read_options(in, opts);

    OrbitProblem pb;
    const json& maps = need(in, "maps", "");
    if (!maps.is_array() || maps.empty())
      bad("/maps", "expected a nonempty array of polynomial strings in t");
    for (size_t i = 0; i < maps.size(); ++i) {
      const std::string s = get_string(maps[i], "/maps/" + std::to_string(i));
      try {
        pb.maps.push_back(parse_unipoly(s));
      } catch (const error& e) {
        bad("/maps/" + std::to_string(i), e.what());
      }
    }
    int g = (int)pb.maps.size();
    pb.alpha = get_point(need(in, "point", ""), g, "/point");
    pb.variety = get_variety(need(in, "variety", ""), g, "/variety");

    std::string strat = "auto";
    if (in.contains("strategy")) strat = get_string(in.at("strategy"), "/strategy");
    if (opts.strategy) strat = *opts.strategy;
    if (strat == "auto" || strat == "automatic")
      pb.strategy = OrbitStrategy::automatic;
    else if (strat == "attracting")
      pb.strategy = OrbitStrategy::attracting;
    else if (strat == "indifferent")
      pb.strategy = OrbitStrategy::indifferent;
    else if (strat == "brute-force" || strat == "brute_force")
      pb.strategy = OrbitStrategy::brute_force;
    else
      bad("/strategy",
          "expected auto, attracting, indifferent, or brute-force");

    if (opts.prime)
      pb.prime_hint = Prime((uint64_t)*opts.prime);
    else if (in.contains("p"))
      pb.prime_hint = Prime((uint64_t)get_long(in.at("p"), "/p"));

    if (in.contains("bounds")) {
      const json& b = in.at("bounds");
      check_keys(b, "/bounds",
                 {"M_max", "K_burn_in", "D", "N", "E_max", "n_max", "p_max"});
      if (b.contains("M_max")) pb.bounds.m_max = get_long(b.at("M_max"), "/bounds/M_max");
      if (b.contains("K_burn_in"))
        pb.bounds.burn_in_cap = get_long(b.at("K_burn_in"), "/bounds/K_burn_in");
      if (b.contains("D")) pb.bounds.degree = (int)get_long(b.at("D"), "/bounds/D");
      if (b.contains("N")) pb.bounds.precision = (int)get_long(b.at("N"), "/bounds/N");
      if (b.contains("E_max")) pb.bounds.e_max = (int)get_long(b.at("E_max"), "/bounds/E_max");
      if (b.contains("n_max")) pb.bounds.n_max = get_long(b.at("n_max"), "/bounds/n_max");
      if (b.contains("p_max")) pb.bounds.p_max = get_long(b.at("p_max"), "/bounds/p_max");
    }
    if (eff.precision) pb.bounds.precision = *eff.precision;
    if (eff.degree) pb.bounds.degree = *eff.degree;
    if (eff.n_max) pb.bounds.n_max = *eff.n_max;

    ReturnSetDecomposition dec = solve_orbit(pb);
    json result = decomposition_json(dec);
    long M = (dec.d > 0 && dec.prime > 0)
                 ? dec.period / (2 * (long)dec.prime * dec.d)
                 : dec.period;
    result["M"] = M;
    result["N0"] = dec.burn_in;
    result["diagnostics"] = json::array();
    return {std::move(result), cert_name(dec.certificate)};
  });
}

CliOutcome run_linearize(const std::string& input, const CliOptions& opts) {
  return pipeline(input, opts.timing, [&]() -> std::pair<json, std::string> {
    json in = json::parse(input);
    check_keys(in, "",
               {"version", "kind", "options", "p", "map", "regime", "degree", "e_max"});
    check_kind(in, "linearize");
    Effective eff = read_options(in, opts);

    Prime p((uint64_t)get_long(need(in, "p", ""), "/p"));
    const json& map = need(in, "map", "");
    if (!map.is_array() || map.empty())
      bad("/map", "expected a nonempty array of polynomial strings in x0..");
    int g = (int)map.size();
    std::vector<MultiPolyQ> polys;
    for (int i = 0; i < g; ++i) {
      const std::string s = get_string(map[(size_t)i], "/map/" + std::to_string(i));
      try {
        polys.push_back(parse_poly(s, g));
      } catch (const error& e) {
        bad("/map/" + std::to_string(i), e.what());
      }
    }
    const std::string regime = get_string(need(in, "regime", ""), "/regime");
    if (regime != "attracting" && regime != "indifferent")
      bad("/regime", "expected \"attracting\" or \"indifferent\"");

    int degree = 12;
    if (in.contains("degree")) degree = (int)get_long(in.at("degree"), "/degree");
    if (eff.degree) degree = *eff.degree;
    int e_max = 8;
    if (in.contains("e_max")) e_max = (int)get_long(in.at("e_max"), "/e_max");
    int prec = eff.precision ? *eff.precision : kDefaultPrecision;

    LocalMap m = make_local_map(p, polys, degree, prec);
    json result;
    Conjugacy c{{}, Rat(0), ConjugacyRegime::attracting_homothety,
                CertificateKind::rigorous};
    json small_div = nullptr;
    if (regime == "attracting") {
      c = linearize_attracting(m, degree);
    } else {
      auto [cc, rep] = linearize_indifferent(m, e_max, degree);
      c = std::move(cc);
      json ws = json::array();
      for (const auto& w : rep.witnesses) {
        json o;
        o["e"] = w.e;
        o["i"] = w.i;
        o["valuation"] = w.valuation;
        ws.push_back(std::move(o));
      }
      small_div = json{{"checked_degree", rep.checked_degree},
                       {"min_divisor_valuation", rat_str(rep.min_divisor_valuation)},
                       {"witnesses", std::move(ws)}};
    }
    ResidualReport rr = verify_conjugacy(m, c, degree);

    result["regime"] = regime;
    const char* cert =
        c.certificate == CertificateKind::rigorous ? "rigorous" : "heuristic";
    result["certificate"] = cert;
    result["radius_valuation"] = rat_str(c.radius_valuation);
    json hs = json::array();
    for (const auto& hi : c.h) hs.push_back(multiseries_json(hi));
    result["h"] = std::move(hs);
    result["residual"] =
        json{{"zero_to_precision", rr.zero_to_precision},
             {"min_valuation_bound", rr.min_valuation_bound == kAbsPrecInf
                                         ? json(nullptr)
                                         : json(rr.min_valuation_bound)},
             {"through_degree", rr.through_degree}};
    result["small_divisors"] = std::move(small_div);
    return {std::move(result), cert};
  });
}

CliOutcome run_newton(const std::string& input, const CliOptions& opts) {
  return pipeline(input, opts.timing, [&]() -> std::pair<json, std::string> {
    json in = json::parse(input);
    check_keys(in, "", {"version", "kind", "options", "p", "poly", "coefficients"});
    check_kind(in, "newton");
    Effective eff = read_options(in, opts);

    Prime p((uint64_t)get_long(need(in, "p", ""), "/p"));
    int prec = eff.precision ? *eff.precision : kDefaultPrecision;
    std::vector<Rat> coeffs;
    if (in.contains("poly") == in.contains("coefficients"))
      bad("", "provide exactly one of 'poly' or 'coefficients'");
    if (in.contains("poly")) {
      UniPolyQ f;
      try {
        f = parse_unipoly(get_string(in.at("poly"), "/poly"));
      } catch (const error& e) {
        bad("/poly", e.what());
      }
      for (int n = 0; n <= f.degree(); ++n) coeffs.push_back(f.coeff(n));
    } else {
      const json& cs = in.at("coefficients");
      if (!cs.is_array() || cs.empty())
        bad("/coefficients", "expected a nonempty array");
      for (size_t i = 0; i < cs.size(); ++i)
        coeffs.push_back(get_rat(cs[i], "/coefficients/" + std::to_string(i)));
    }
    std::vector<PadicNumber> embedded;
    for (const auto& c : coeffs)
      embedded.push_back(PadicNumber::embed_rational(c, p, prec));
    PadicSeries f(p, std::move(embedded), std::nullopt);

    NewtonPolygon np = polygon(f);
    StrassmanBound sb = strassman(f);
    json segs = json::array();
    for (const auto& s : np.segments) {
      json o;
      o["slope"] = rat_str(s.slope);
      o["length"] = s.length;
      segs.push_back(std::move(o));
    }
    json result;
    result["segments"] = std::move(segs);
    result["strassman"] = json{{"identically_zero_to_prec", sb.identically_zero_to_prec},
                               {"T", sb.T},
                               {"min_valuation", sb.min_valuation}};
    return {std::move(result), "rigorous"};
  });
}

CliOutcome run_jordan(const std::string& input, const CliOptions& opts) {
  return pipeline(input, opts.timing, [&]() -> std::pair<json, std::string> {
    json in = json::parse(input);
    check_keys(in, "", {"version", "kind", "options", "p", "matrix"});
    check_kind(in, "jordan");
    Effective eff = read_options(in, opts);

    Prime p((uint64_t)get_long(need(in, "p", ""), "/p"));
    QMatrix L = get_matrix(need(in, "matrix", ""), "/matrix");
    int prec = eff.precision ? *eff.precision : kDefaultPrecision;

    auto r = jordan_decompose(L, p, prec);
    if (std::holds_alternative<JordanFailure>(r))
      fail(errc::unsupported_field_extension, std::get<JordanFailure>(r).reason);
    const JordanForm& J = std::get<JordanForm>(r);
    json blocks = json::array();
    for (const auto& b : J.blocks) {
      json o;
      o["lambda"] = padic_json(b.lambda);
      o["size"] = b.size;
      blocks.push_back(std::move(o));
    }
    json result;
    result["blocks"] = std::move(blocks);
    result["d"] = choose_d(J);
    auto matrix_json = [](const PadicMatrix& m) {
      json rows = json::array();
      for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(padic_json(m.at(i, j)));
        rows.push_back(std::move(row));
      }
      return rows;
    };
    result["basis"] = J.basis ? matrix_json(*J.basis) : json(nullptr);
    result["basis_inv"] = J.basis_inv ? matrix_json(*J.basis_inv) : json(nullptr);
    return {std::move(result), "rigorous"};
  });
}

CliOutcome run_explain(const std::string& envelope_json) {
  try {
    json env = json::parse(envelope_json);
    if (!env.is_object() || !env.contains("result"))
      bad("", "expected a result envelope with a 'result' field");
    const json& r = env.at("result");
    std::ostringstream os;
    std::string cert =
        env.contains("certificate") ? env.at("certificate").get<std::string>() : "unknown";
    os << "certificate: " << cert << "\n";

    if (r.is_object() && r.contains("progressions")) {
      os << "prime: "
         << (r.contains("prime") && !r.at("prime").is_null()
                 ? r.at("prime").dump()
                 : std::string("none (exact enumeration)"));
      if (r.contains("M")) os << "   M: " << r.at("M").dump();
      if (r.contains("d")) os << "   d: " << r.at("d").dump();
      if (r.contains("N0"))
        os << "   N0: " << r.at("N0").dump();
      else if (r.contains("burn_in"))
        os << "   burn-in: " << r.at("burn_in").dump();
      os << "\n";
      const json& ps = r.at("progressions");
      if (ps.empty() && (!r.contains("exceptional") || r.at("exceptional").empty())) {
        os << "return set: empty (no index lands on the variety)\n";
      }
      for (const auto& pr : ps) {
        long s = pr.at("start").get<long>();
        long m = pr.at("modulus").get<long>();
        os << "class " << s << " + " << m
           << "N: membership series vanishes identically; every index of the "
              "class returns\n";
      }
      if (r.contains("exceptional"))
        for (const auto& e : r.at("exceptional"))
          os << "exceptional return at n = " << e.dump()
             << " (isolated zero, confirmed individually)\n";
      if (cert == "rigorous") {
        os << "caveats: none; linearization pathway with exact confirmations\n";
      } else if (cert == "heuristic") {
        os << "caveats: indifferent pathway; the small-divisor lower bound is "
              "assumed (no effective Yu-type bound computed) and confirmations "
              "beyond the exact window used modular witnesses\n";
      } else if (cert == "brute-force-only") {
        os << "caveats: no analytic certificate; membership verified only on [0, "
           << (r.contains("verified_bound") && !r.at("verified_bound").is_null()
                   ? r.at("verified_bound").dump()
                   : std::string("?"))
           << ")\n";
      }
    } else if (r.is_object() && r.contains("regime")) {
      os << "regime: " << r.at("regime").get<std::string>() << "\n";
      if (r.contains("radius_valuation"))
        os << "certified on the open polydisk v(x) > "
           << r.at("radius_valuation").get<std::string>() << "\n";
      if (r.contains("residual") && r.at("residual").is_object()) {
        const json& rr = r.at("residual");
        os << "residual: "
           << (rr.at("zero_to_precision").get<bool>() ? "zero to precision"
                                                      : "NONZERO")
           << " through degree " << rr.at("through_degree").dump() << "\n";
      }
      if (cert == "heuristic")
        os << "caveats: radius extrapolated from finitely many small divisors\n";
    } else {
      os << "result: " << r.dump() << "\n";
    }
    return {os.str(), "", 0};
  } catch (const schema_error& se) {
    return {"", "invalid envelope at " + se.pointer + ": " + se.message, 1};
  } catch (const std::exception& e) {
    return {"", std::string("invalid envelope: ") + e.what(), 1};
  }
}

}  // namespace padicdyn
