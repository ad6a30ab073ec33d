#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "xcalc/lambda.hpp"
#include "xcalc/parse.hpp"
#include "xcalc/rewrite.hpp"

using namespace xcalc;

namespace {

NetPtr random_net(std::mt19937& rng, int depth) {
  auto name = [&rng](const char* prefix) {
    return std::string(prefix) + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng));
  };
  int pick = depth <= 0 ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
  switch (pick) {
    case 1:
      return Net::exp(name("x"), random_net(rng, depth - 1), name("a"), name("a"));
    case 2:
      return Net::imp(random_net(rng, depth - 1), name("a"), name("x"), name("x"),
                      random_net(rng, depth - 1));
    case 3: {
      int act = std::uniform_int_distribution<int>(0, 5)(rng);
      return Net::cut(random_net(rng, depth - 1), name("a"),
                      act <= 3 ? Activation::None : act == 4 ? Activation::Left : Activation::Right,
                      name("x"), random_net(rng, depth - 1));
    }
    default:
      return Net::capsule(name("x"), name("a"));
  }
}

NetPtr random_barendregt_net(std::mt19937& rng, int depth) {
  NameGen gen;
  return barendregt(random_net(rng, depth), gen);
}

bool contains_rule(const std::vector<Redex>& rs, RuleId id) {
  for (auto& r : rs)
    if (r.rule == id) return true;
  return false;
}

}  // namespace

TEST_CASE("logical redexes at an introduced-introduced cut") {
  NetPtr ax = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  auto rs = find_redexes(ax, Regime::Full);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].rule == RuleId::Ax);
  CHECK(rs[0].position.empty());
  CHECK(net_equal(step(ax, rs[0]), parse_net("<y.b>")));

  CHECK(find_redexes(parse_net("<x.a>"), Regime::Full).empty());

  // both connectors absent: the critical pair activates both ways
  NetPtr crit = parse_net("(<p.c>) a^ + x^ (<q.d>)");
  auto crs = find_redexes(crit, Regime::Full);
  CHECK(contains_rule(crs, RuleId::ActL));
  CHECK(contains_rule(crs, RuleId::ActR));
  CHECK(crs.size() == 2);
}

TEST_CASE("exp-imp yields both bracketings under Full, one each under CBN/CBV") {
  NetPtr n = parse_net("(y^ <y.b> b^ . a) a^ + x^ ((<q.g>) g^ [x] z^ (<z.d>))");
  auto full = find_redexes(n, Regime::Full);
  CHECK(contains_rule(full, RuleId::ExpImpLeftAssoc));
  CHECK(contains_rule(full, RuleId::ExpImpRightAssoc));
  auto cbn = find_redexes(n, Regime::CBN);
  CHECK(contains_rule(cbn, RuleId::ExpImpLeftAssoc));
  CHECK_FALSE(contains_rule(cbn, RuleId::ExpImpRightAssoc));
  auto cbv = find_redexes(n, Regime::CBV);
  CHECK(contains_rule(cbv, RuleId::ExpImpRightAssoc));
  CHECK_FALSE(contains_rule(cbv, RuleId::ExpImpLeftAssoc));

  NetPtr left, right;
  for (auto& r : full) {
    if (r.rule == RuleId::ExpImpLeftAssoc) left = step(n, r);
    if (r.rule == RuleId::ExpImpRightAssoc) right = step(n, r);
  }
  CHECK(alpha_eq(left, parse_net("((<q.g>) g^ + y^ (<y.b>)) b^ + z^ (<z.d>)")));
  CHECK(alpha_eq(right, parse_net("(<q.g>) g^ + y^ ((<y.b>) b^ + z^ (<z.d>))")));
}

TEST_CASE("propagation rule shapes") {
  NetPtr cap = parse_net("(<y.b>) a^ <+ x^ (<x.c>)");
  auto rs = find_redexes(cap, Regime::Full);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].rule == RuleId::DL_cap);
  CHECK(net_equal(step(cap, rs[0]), parse_net("<y.b>")));

  NetPtr rcap = parse_net("(<z.a>) a^ +> x^ (<y.b>)");
  auto rr = find_redexes(rcap, Regime::Full);
  REQUIRE(rr.size() == 1);
  CHECK(rr[0].rule == RuleId::DR_cap);
  CHECK(net_equal(step(rcap, rr[0]), parse_net("<y.b>")));

  NetPtr eo = parse_net("(y^ <y.a> b^ . a) a^ <+ x^ (<x.c>)");
  auto er = find_redexes(eo, Regime::Full);
  REQUIRE(er.size() == 1);
  CHECK(er[0].rule == RuleId::DL_expOuts);
  NetPtr stepped = step(eo, er[0]);
  CHECK(is_barendregt(stepped));
  CHECK(stepped->kind == NetKind::Cut);

  NetPtr io = parse_net("(<z.a>) a^ +> x^ ((<x.g>) g^ [x] w^ (<w.b>))");
  auto ir = find_redexes(io, Regime::Full);
  REQUIRE(ir.size() == 1);
  CHECK(ir[0].rule == RuleId::DR_impOuts);
  CHECK(is_barendregt(step(io, ir[0])));
}

TEST_CASE("stale redex is an error") {
  NetPtr ax = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  Redex bogus{{0}, RuleId::Ax};
  CHECK_THROWS_AS(step(ax, bogus), StaleRedex);
}

TEST_CASE("interface preservation and regime soundness on random nets") {
  std::mt19937 rng(41);
  int steps = 0;
  for (int i = 0; i < 400; ++i) {
    NetPtr n = random_barendregt_net(rng, 4);
    auto full = find_redexes(n, Regime::Full);
    for (Regime reg : {Regime::CBN, Regime::CBV}) {
      for (auto& r : find_redexes(n, reg)) {
        bool found = false;
        for (auto& f : full)
          if (f.position == r.position && f.rule == r.rule) found = true;
        CHECK(found);
      }
    }
    for (auto& r : full) {
      NetPtr m = step(n, r);
      ++steps;
      CHECK(is_barendregt(m));
      auto fs_n = free_sockets(n);
      auto fp_n = free_plugs(n);
      for (auto& s : free_sockets(m)) CHECK(fs_n.count(s));
      for (auto& p : free_plugs(m)) CHECK(fp_n.count(p));
    }
  }
  CHECK(steps > 300);
}

TEST_CASE("deterministic-first reduce is reproducible") {
  std::mt19937 rng(43);
  for (int i = 0; i < 50; ++i) {
    NetPtr n = random_barendregt_net(rng, 3);
    Trace t1 = reduce(n, Regime::CBN, 100);
    Trace t2 = reduce(n, Regime::CBN, 100);
    REQUIRE(t1.steps.size() == t2.steps.size());
    for (size_t k = 0; k < t1.steps.size(); ++k)
      CHECK(net_equal(t1.steps[k].result, t2.steps[k].result));
  }
  CHECK(reduce(parse_net("<x.a>"), Regime::Full).steps.empty());
}

TEST_CASE("reduction graph basics") {
  NetPtr ax = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  auto g = reduction_graph(ax, Regime::Full);
  CHECK(g.nodes.size() == 2);
  CHECK(g.edges[0].size() == 1);

  // critical pair: both P and Q are sinks of the Full graph
  NetPtr P = parse_net("p^ <p.c> c^ . e");
  NetPtr Q = parse_net("q^ <q.d> d^ . f");
  NetPtr crit = Net::cut(P, "a", Activation::None, "x", Q);
  auto cg = reduction_graph(crit, Regime::Full, 2000);
  CHECK_FALSE(cg.truncated);
  bool sawP = false, sawQ = false;
  for (int s : cg.sinks()) {
    if (alpha_eq(cg.nodes[s], P)) sawP = true;
    if (alpha_eq(cg.nodes[s], Q)) sawQ = true;
  }
  CHECK(sawP);
  CHECK(sawQ);
}

TEST_CASE("CBN and CBV graphs of small nets have a unique sink") {
  std::mt19937 rng(47);
  int graphs = 0;
  for (int i = 0; i < 120; ++i) {
    NetPtr n = random_barendregt_net(rng, 3);
    for (Regime reg : {Regime::CBN, Regime::CBV}) {
      auto g = reduction_graph(n, reg, 3000);
      if (g.truncated) continue;
      CHECK(g.sinks().size() <= 1);
      ++graphs;
    }
  }
  CHECK(graphs > 150);
}

TEST_CASE("figure reduction: the translated self-application reaches the identity") {
  LamPtr term = parse_lam("(\\x. x x) (\\y. y)");
  NetPtr start = translate(term, "a");
  NetPtr target = translate(parse_lam("\\y. y"), "a");

  Trace tr = reduce(start, Regime::Full, 200);
  CHECK_FALSE(tr.fuel_exhausted);
  CHECK(alpha_eq(tr.final_net(), target));

  // Under CBN and CBV the target is the unique normal form found by the
  // 5,000-node graph exploration, and the deterministic run reaches it.
  for (Regime reg : {Regime::CBN, Regime::CBV}) {
    Trace ts = reduce(start, reg, 200);
    CHECK_FALSE(ts.fuel_exhausted);
    CHECK(alpha_eq(ts.final_net(), target));
    auto g = reduction_graph(start, reg, 5000);
    auto sinks = g.sinks();
    REQUIRE(!sinks.empty());
    for (int s : sinks) CHECK(alpha_eq(g.nodes[s], target));
  }
}

namespace {

// Activation-free random nets: the propagation path for a garbage or
// renaming cut then exists all the way down.
NetPtr random_inactive_net(std::mt19937& rng, int depth) {
  auto name = [&rng](const char* prefix) {
    return std::string(prefix) + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng));
  };
  int pick = depth <= 0 ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
  switch (pick) {
    case 1:
      return Net::exp(name("x"), random_inactive_net(rng, depth - 1), name("a"), name("a"));
    case 2:
      return Net::imp(random_inactive_net(rng, depth - 1), name("a"), name("x"), name("x"),
                      random_inactive_net(rng, depth - 1));
    case 3:
      return Net::cut(random_inactive_net(rng, depth - 1), name("a"), Activation::None, name("x"),
                      random_inactive_net(rng, depth - 1));
    default:
      return Net::capsule(name("x"), name("a"));
  }
}

}  // namespace

TEST_CASE("admissible rules are reachable via core rules") {
  std::mt19937 rng(53);
  int checked = 0;
  for (int i = 0; i < 1200 && checked < 120; ++i) {
    NameGen gen0;
    NetPtr p = barendregt(random_inactive_net(rng, 2), gen0);
    NetPtr q = barendregt(random_inactive_net(rng, 2), gen0);
    NameGen gen;
    bool left = i % 2 == 0;
    NetPtr n = barendregt(
        Net::cut(p, "zz", left ? Activation::Left : Activation::Right, "ww", q), gen);
    auto rs = find_redexes(n, Regime::Full, true);
    for (auto& r : rs) {
      if (!rule_admissible(r.rule) || !r.position.empty()) continue;
      NetPtr shortcut = step(n, r);
      CHECK(reachable(n, shortcut, Regime::Full, 20000));
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("renaming shortcuts") {
  NetPtr n = parse_net("(x^ <x.g> g^ . d) d^ + z^ (<z.a>)");
  auto rs = find_redexes(n, Regime::Full, true);
  bool found = false;
  for (auto& r : rs) {
    if (r.rule != RuleId::Ren_L) continue;
    found = true;
    NetPtr m = step(n, r);
    CHECK(alpha_eq(m, parse_net("x^ <x.g> g^ . a")));
    CHECK(reachable(n, m, Regime::Full, 2000));
  }
  CHECK(found);
  CHECK_FALSE(contains_rule(find_redexes(n, Regime::Full), RuleId::Ren_L));
}

TEST_CASE("trace serialization") {
  NetPtr ax = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  Trace tr = reduce(ax, Regime::Full, 10);
  std::string text = print_trace(tr);
  CHECK(text.find("STEP 1: Ax @ root  ==>  <y.b>") != std::string::npos);
}
