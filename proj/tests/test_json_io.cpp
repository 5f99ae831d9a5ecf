#include <string>

#include "doctest.h"
#include "json.hpp"

#include "padicdyn/json_io.hpp"

using namespace padicdyn;
using json = nlohmann::json;

namespace {

const char* kFib =
    R"({"type":"linear","matrix":[[0,1],[1,1]],"point":[0,1],"variety":["x0"]})";
const char* kOrbitDiag =
    R"({"maps":["2*t + t^2","2*t + t^2"],"point":[2,2],"variety":["x0 - x1"]})";

}  // namespace

TEST_CASE("the input hash is a stable fnv1a64 of the raw bytes") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("hello") == "a430d84680aabd0b");
}

TEST_CASE("solver envelopes carry result, certificate, version, and hash") {
  CliOptions opts;
  auto out = run_sml(kFib, opts);
  REQUIRE(out.exit_code == 0);
  json env = json::parse(out.out);
  CHECK(env.contains("result"));
  CHECK(env.at("certificate") == "rigorous");
  CHECK(env.at("timing").is_null());
  CHECK(env.at("version") == tool_version());
  CHECK(env.at("input_hash") == fnv1a64_hex(kFib));
  const json& r = env.at("result");
  CHECK(r.at("exceptional") == json::array({0}));
  CHECK(r.at("progressions").empty());
  CHECK(r.at("prime") == 11);
  CHECK(r.at("d") == 10);
}

TEST_CASE("identical queries produce byte-identical envelopes") {
  CliOptions opts;
  for (const char* input : {kFib, kOrbitDiag}) {
    auto a = input == kFib ? run_sml(input, opts) : run_orbit(input, opts);
    auto b = input == kFib ? run_sml(input, opts) : run_orbit(input, opts);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("orbit results expose the class geometry") {
  CliOptions opts;
  auto out = run_orbit(kOrbitDiag, opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  REQUIRE(r.at("progressions").size() == 1);
  CHECK(r.at("progressions")[0].at("start") == 0);
  CHECK(r.at("progressions")[0].at("modulus") == 1);
  CHECK(r.at("certificate") == "rigorous");
  CHECK(r.at("M") == 1);
  CHECK(r.at("N0") == 1);
}

TEST_CASE("unknown fields are rejected with a pointer to the offender") {
  CliOptions opts;
  auto out = run_sml(
      R"({"type":"linear","matrix":[[1]],"point":[1],"variety":[],"bogus":3})",
      opts);
  CHECK(out.exit_code == 1);
  json e = json::parse(out.out);
  CHECK(e.at("error").at("code") == "InvalidInput");
  CHECK(e.at("error").at("pointer") == "/bogus");
}

TEST_CASE("malformed json fails with exit code one") {
  CliOptions opts;
  auto out = run_sml("{nope", opts);
  CHECK(out.exit_code == 1);
  CHECK(!out.err.empty());
  json e = json::parse(out.out);
  CHECK(e.contains("error"));
}

TEST_CASE("lossy floating point rationals are refused") {
  CliOptions opts;
  auto out = run_sml(
      R"({"type":"linear","matrix":[[0.5]],"point":[1],"variety":["x0"]})",
      opts);
  CHECK(out.exit_code == 1);
  json e = json::parse(out.out);
  CHECK(e.at("error").at("pointer") == "/matrix/0/0");
}

TEST_CASE("rational strings parse wherever integers do") {
  CliOptions opts;
  const char* in =
      R"({"type":"linear","matrix":[["5/2",-1],[1,0]],"point":["5/2",2],"variety":["x1 - 2"]})";
  auto out = run_sml(in, opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  CHECK(r.at("exceptional") == json::array({0}));
}

TEST_CASE("solver failures distinguish themselves from schema failures") {
  CliOptions opts;
  auto out = run_orbit(
      R"({"maps":["2*t + t^2"],"point":[2],"variety":["x0 - 8"],"strategy":"indifferent","p":2})",
      opts);
  CHECK(out.exit_code == 2);
  json e = json::parse(out.out);
  CHECK(e.at("error").at("code") == "AllStrategiesFailed");
}

TEST_CASE("newton pipeline freezes the ramified quadratic") {
  CliOptions opts;
  auto out = run_newton(R"({"p":2,"poly":"t^2 - 2"})", opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  REQUIRE(r.at("segments").size() == 1);
  CHECK(r.at("segments")[0].at("slope") == "1/2");
  CHECK(r.at("segments")[0].at("length") == 2);
  CHECK(r.at("strassman").at("T") == 2);
}

TEST_CASE("newton accepts a coefficient list as an alternative spelling") {
  CliOptions opts;
  auto out = run_newton(R"({"p":2,"coefficients":[-2,0,1]})", opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  CHECK(r.at("segments")[0].at("slope") == "1/2");
  auto both = run_newton(R"({"p":2,"poly":"t","coefficients":[1]})", opts);
  CHECK(both.exit_code == 1);
}

TEST_CASE("linearize pipeline reports radius, conjugacy, and residual") {
  CliOptions opts;
  auto out = run_linearize(
      R"({"p":3,"map":["3*x0 + x0^2"],"regime":"attracting","degree":8})", opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  CHECK(r.at("regime") == "attracting");
  CHECK(r.at("certificate") == "rigorous");
  CHECK(r.at("radius_valuation") == "1");
  CHECK(r.at("residual").at("zero_to_precision") == true);
  CHECK(r.at("small_divisors").is_null());
  REQUIRE(r.at("h").size() == 1);
}

TEST_CASE("indifferent linearize carries small divisor witnesses") {
  CliOptions opts;
  auto out = run_linearize(
      R"({"p":5,"map":["2*x0 + x0^2"],"regime":"indifferent","degree":8,"e_max":10})",
      opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  CHECK(r.at("certificate") == "heuristic");
  CHECK(r.at("radius_valuation") == "1/4");
  CHECK(r.at("small_divisors").at("witnesses").size() == 9);
}

TEST_CASE("jordan pipeline emits blocks and the chosen power step") {
  CliOptions opts;
  auto out = run_jordan(R"({"p":5,"matrix":[[1,0],[0,2]]})", opts);
  REQUIRE(out.exit_code == 0);
  json r = json::parse(out.out).at("result");
  REQUIRE(r.at("blocks").size() == 2);
  CHECK(r.at("d") == 4);
  CHECK(!r.at("basis").is_null());
}

TEST_CASE("jordan failures surface the reason") {
  CliOptions opts;
  // x^2 + 1 does not split over Q_7? 7 = 3 mod 4, indeed irreducible
  auto out = run_jordan(R"({"p":7,"matrix":[[0,-1],[1,0]]})", opts);
  CHECK(out.exit_code == 1);
  json e = json::parse(out.out);
  CHECK(e.at("error").at("code") == std::string("UnsupportedFieldExtension"));
}

TEST_CASE("explain renders a human-readable certificate summary") {
  CliOptions opts;
  auto env = run_orbit(kOrbitDiag, opts);
  REQUIRE(env.exit_code == 0);
  auto rep = run_explain(env.out);
  REQUIRE(rep.exit_code == 0);
  CHECK(rep.out.find("certificate: rigorous") != std::string::npos);
  CHECK(rep.out.find("class 0 + 1N") != std::string::npos);
  CHECK(rep.out.find("caveats: none") != std::string::npos);
}

TEST_CASE("explain warns about heuristic and windowed certificates") {
  CliOptions opts;
  auto env = run_orbit(
      R"({"maps":["t + 1"],"point":[0],"variety":["x0 - 5"],"bounds":{"n_max":500}})",
      opts);
  REQUIRE(env.exit_code == 0);
  auto rep = run_explain(env.out);
  CHECK(rep.out.find("brute-force-only") != std::string::npos);
  CHECK(rep.out.find("[0, 500)") != std::string::npos);
  auto bad = run_explain("{\"no_result\": 1}");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("flags override file options") {
  CliOptions opts;
  opts.n_max = 300;
  auto env = run_orbit(
      R"({"maps":["t + 1"],"point":[0],"variety":["x0 - 5"],"bounds":{"n_max":500}})",
      opts);
  REQUIRE(env.exit_code == 0);
  json r = json::parse(env.out).at("result");
  CHECK(r.at("verified_bound") == 300);
}

TEST_CASE("timing is opt-in because it breaks determinism") {
  CliOptions opts;
  opts.timing = true;
  auto out = run_newton(R"({"p":2,"poly":"t^2 - 2"})", opts);
  REQUIRE(out.exit_code == 0);
  json env = json::parse(out.out);
  CHECK(env.at("timing").is_object());
  CHECK(env.at("timing").contains("ms"));
}
