// Command-line workbench for the X sequent calculus: parsing, reduction
// traces and graphs, derivation checking, the lambda-calculus bridge, the
// counterexample demos and the property-test harnesses.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "xcalc/demos.hpp"
#include "xcalc/generate.hpp"
#include "xcalc/json_io.hpp"
#include "xcalc/lambda.hpp"
#include "xcalc/parse.hpp"
#include "xcalc/search.hpp"

using namespace xcalc;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_parse(const std::string& input) {
  NetPtr n = parse_net(slurp(input));
  std::cout << print_net(n) << "\n";
  return 0;
}

int run_reduce(const std::string& input, const std::string& regime_s, int fuel, bool graph,
               int budget, bool json, bool random, unsigned seed) {
  auto regime = regime_from_name(regime_s);
  if (!regime) {
    std::cerr << "unknown regime: " << regime_s << "\n";
    return 2;
  }
  NetPtr n = parse_net(slurp(input));
  if (graph) {
    auto g = reduction_graph(n, *regime, budget);
    std::cout << "nodes: " << g.nodes.size() << (g.truncated ? " (truncated)" : "") << "\n";
    auto sinks = g.sinks();
    std::cout << "normal forms: " << sinks.size() << "\n";
    for (int s : sinks) std::cout << "  " << print_net(g.nodes[s]) << "\n";
    return 0;
  }
  Trace tr = reduce(n, *regime, fuel, random ? Choose::Random : Choose::DeterministicFirst, seed);
  if (json) {
    std::cout << trace_to_json(tr).dump(2) << "\n";
  } else {
    std::cout << print_trace(tr);
  }
  return 0;
}

int run_check(const std::string& input, bool emit) {
  DerivPtr d = derivation_from_json(nlohmann::json::parse(slurp(input)));
  if (auto err = check_derivation(d)) {
    std::string path;
    for (size_t i = 0; i < err->path.size(); ++i) {
      if (i) path += ".";
      path += std::to_string(err->path[i]);
    }
    std::cout << "error at [" << (path.empty() ? "root" : path) << "]: " << err->reason << "\n";
    return 1;
  }
  std::cout << "ok: " << print_judgement(d->conclusion) << "\n";
  if (emit) std::cout << derivation_to_json(d).dump(2) << "\n";
  return 0;
}

int run_translate(const std::string& input, const std::string& plug) {
  LamPtr m = parse_lam(slurp(input));
  std::cout << print_net(translate(m, plug)) << "\n";
  return 0;
}

int run_demo(const std::string& which, unsigned seed, int cases) {
  DemoReport rep;
  if (which == "counterexample-1")
    rep = demos::run_counterexample_1();
  else if (which == "counterexample-2")
    rep = demos::run_counterexample_2();
  else if (which == "expansion")
    rep = demos::run_expansion_property(seed, cases);
  else if (which == "cbn-preservation")
    rep = demos::run_preservation_property(System::CBN, seed, cases);
  else if (which == "cbv-preservation")
    rep = demos::run_preservation_property(System::CBV, seed, cases);
  else if (which == "restricted-expansion")
    rep = demos::run_restricted_expansion_failure();
  else {
    std::cerr << "unknown demo: " << which << "\n";
    return 2;
  }
  std::cout << rep.text;
  std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

int run_proptest(unsigned seed, int cases) {
  bool ok = true;
  for (auto rep : {demos::run_preservation_property(System::Simple, seed, cases),
                   demos::run_preservation_property(System::CBN, seed + 1, cases),
                   demos::run_preservation_property(System::CBV, seed + 2, cases),
                   demos::run_expansion_property(seed + 3, cases)}) {
    std::cout << rep.text;
    ok = ok && rep.pass;
  }
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for the X sequent calculus"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string regime = "full";
  std::string plug = "a";
  std::string which;
  int fuel = 10000;
  int budget = 5000;
  int cases = 500;
  unsigned seed = 0;
  bool graph = false, json = false, emit = false, random = false;

  auto* p = app.add_subcommand("parse", "parse a net and print its canonical form");
  p->add_option("input", input, "net file, or - for stdin");

  auto* r = app.add_subcommand("reduce", "reduce a net, printing the trace or the graph");
  r->add_option("input", input, "net file, or - for stdin");
  r->add_option("--regime", regime, "full | cbn | cbv");
  r->add_option("--fuel", fuel, "maximum number of steps");
  bool trace = false;
  r->add_flag("--trace", trace, "print the step trace (the default output)");
  r->add_flag("--graph", graph, "explore the reduction graph instead of one trace");
  r->add_option("--budget", budget, "graph node budget");
  r->add_flag("--json", json, "emit the trace as JSON");
  r->add_flag("--random", random, "random redex choice (see --seed)");
  r->add_option("--seed", seed, "random seed");

  auto* c = app.add_subcommand("check", "check a derivation JSON file");
  c->add_option("input", input, "derivation file, or - for stdin");
  c->add_flag("--emit", emit, "re-emit the canonical JSON after checking");

  auto* t = app.add_subcommand("translate", "translate a lambda term into a net");
  t->add_option("input", input, "lambda term file, or - for stdin");
  t->add_option("--plug", plug, "output plug name");

  auto* d = app.add_subcommand("demo", "run a packaged demonstration");
  d->add_option("which", which,
                "counterexample-1 | counterexample-2 | expansion | cbn-preservation | "
                "cbv-preservation | restricted-expansion")
      ->required();
  d->add_option("--seed", seed, "random seed");
  d->add_option("--cases", cases, "number of random cases");

  auto* pt = app.add_subcommand("proptest", "run the property-test harnesses");
  pt->add_option("--seed", seed, "random seed");
  pt->add_option("--cases", cases, "number of random cases per property");

  CLI11_PARSE(app, argc, argv);

  try {
    if (p->parsed()) return run_parse(input);
    if (r->parsed()) return run_reduce(input, regime, fuel, graph, budget, json, random, seed);
    if (c->parsed()) return run_check(input, emit);
    if (t->parsed()) return run_translate(input, plug);
    if (d->parsed()) return run_demo(which, seed, cases);
    if (pt->parsed()) return run_proptest(seed, cases);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
