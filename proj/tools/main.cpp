#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "padicdyn/json_io.hpp"

namespace {

bool read_input(const std::string& path, std::string& data, std::string& err) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    data = os.str();
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err = "cannot open input file: " + path;
    return false;
  }
  std::ostringstream os;
  os << in.rdbuf();
  data = os.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic return-set and linearization toolkit"};
  app.require_subcommand(1);

  std::string input = "-";
  padicdyn::CliOptions opts;

  auto add_common = [&](CLI::App* sub, bool solver) {
    sub->add_option("input", input, "input JSON file, or - for stdin")
        ->capture_default_str();
    sub->add_option("--precision", opts.precision, "working p-adic precision");
    sub->add_option("--degree", opts.degree, "series truncation degree");
    sub->add_flag("--timing", opts.timing,
                  "include wall-clock timing in the envelope");
    if (solver) {
      sub->add_option("--nmax", opts.n_max, "verification window bound");
      sub->add_option("--strategy", opts.strategy,
                      "auto|attracting|indifferent|brute-force");
      sub->add_option("--prime", opts.prime, "prime to work at");
    }
  };

  CLI::App* sml = app.add_subcommand(
      "sml", "decompose the return set of a linear or torus orbit");
  add_common(sml, true);
  CLI::App* orbit = app.add_subcommand(
      "orbit", "decompose the return set of a polynomial orbit");
  add_common(orbit, true);
  CLI::App* lin = app.add_subcommand(
      "linearize", "linearizing conjugacy at a fixed point of a local map");
  add_common(lin, false);
  CLI::App* newt = app.add_subcommand(
      "newton", "Newton polygon and Strassman bound of a polynomial");
  add_common(newt, false);
  CLI::App* jor =
      app.add_subcommand("jordan", "p-adic Jordan data of a rational matrix");
  add_common(jor, false);
  CLI::App* expl = app.add_subcommand(
      "explain", "render a result envelope as a plain-text report");
  expl->add_option("input", input, "envelope JSON file, or - for stdin")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  std::string data;
  std::string ioerr;
  if (!read_input(input, data, ioerr)) {
    std::cerr << ioerr << "\n";
    return 1;
  }

  padicdyn::CliOutcome out;
  if (sml->parsed())
    out = padicdyn::run_sml(data, opts);
  else if (orbit->parsed())
    out = padicdyn::run_orbit(data, opts);
  else if (lin->parsed())
    out = padicdyn::run_linearize(data, opts);
  else if (newt->parsed())
    out = padicdyn::run_newton(data, opts);
  else if (jor->parsed())
    out = padicdyn::run_jordan(data, opts);
  else
    out = padicdyn::run_explain(data);

  if (!out.out.empty()) std::cout << out.out;
  if (!out.err.empty()) std::cerr << out.err << "\n";
  return out.exit_code;
}
