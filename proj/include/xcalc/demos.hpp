#pragma once

#include <algorithm>
#include <functional>
#include <sstream>
#include <string>

#include "xcalc/generate.hpp"
#include "xcalc/lambda.hpp"
#include "xcalc/parse.hpp"
#include "xcalc/search.hpp"
#include "xcalc/transform.hpp"

namespace xcalc {

// The workbench's headline demonstrations: the intersection-union system is
// closed under expansion but not reduction, and the CBN/CBV restrictions
// recover reduction at the price of expansion.

struct DemoReport {
  bool pass = true;
  std::string text;
};

namespace demos {

inline void line(DemoReport& rep, const std::string& s) { rep.text += s + "\n"; }

inline void verdict(DemoReport& rep, bool ok, const std::string& what) {
  rep.pass = rep.pass && ok;
  line(rep, std::string(ok ? "  [ok]   " : "  [FAIL] ") + what);
}

// First counterexample: the self-application pair. Typable at
// x : A & (A->C) & (A->C->D) |- b : D; its CBV reduct is not, its CBN
// normal form is.
struct Counterexample1 {
  NetPtr start = parse_net(
      "((<x.g>) g^ [x] v^ (<v.a>)) a^ + y^ ((<y.d>) d^ [y] w^ (<w.b>))");
  NetPtr cbv_reduct = parse_net("(<x.g>) g^ [x] v^ ((<v.d>) d^ [v] w^ (<w.b>))");
  NetPtr cbn_normal_form = parse_net(
      "(<x.g>) g^ [x] v^ (((<x.g2>) g2^ [x] u^ (<u.d>)) d^ [v] w^ (<w.b>))");
  Ctx gamma{{"x", normalize(parse_type("A & (A -> C) & (A -> C -> D)"))}};
  Ctx delta{{"b", normalize(parse_type("D"))}};
};

inline DemoReport run_counterexample_1(int depth = 6, int universe = 12) {
  DemoReport rep;
  Counterexample1 ce;
  line(rep, "first counterexample");
  line(rep, "  start net:    " + print_net(ce.start));
  line(rep, "  contexts:     " + print_ctx(ce.gamma) + " |- " + print_ctx(ce.delta));

  SearchBudget b;
  b.depth = depth;
  b.universe = universe;
  // The positive search needs the candidate C & (C -> D) in its universe;
  // the refutations run at the tight budgets.
  SearchBudget find = b;
  find.universe = std::max(universe, 40);
  auto found = search_derivation(System::IU, ce.start, ce.gamma, ce.delta, find);
  verdict(rep, found.derivation && checks(found.derivation),
          "start net is typable (search found a derivation)");

  // CBV run reaches the reduct.
  Trace tr = reduce(ce.start, Regime::CBV, 50);
  bool reduct_hit = false;
  for (auto& st : tr.steps)
    if (alpha_eq(st.result, ce.cbv_reduct)) reduct_hit = true;
  verdict(rep, reduct_hit, "the CBV trace passes through the offending reduct");
  line(rep, "  CBV reduct:   " + print_net(ce.cbv_reduct));

  auto refuted = search_derivation(System::IU, ce.cbv_reduct, ce.gamma, ce.delta, b);
  verdict(rep, !refuted.derivation && !refuted.exhausted_budget,
          "the CBV reduct is refuted at the same contexts (search exhausted, " +
              std::to_string(refuted.explored) + " judgements)");

  SearchBudget wide;
  wide.depth = depth + 2;
  wide.universe = universe + 8;
  auto refuted2 = search_derivation(System::IU, ce.cbv_reduct, ce.gamma, ce.delta, wide);
  verdict(rep, !refuted2.derivation && !refuted2.exhausted_budget,
          "the refutation is stable under a wider budget");

  auto cbn_ok = search_derivation(System::IU, ce.cbn_normal_form, ce.gamma, ce.delta, b);
  verdict(rep, cbn_ok.derivation && checks(cbn_ok.derivation),
          "the CBN normal form is typable at the same contexts");
  return rep;
}

// Second counterexample: dual failure. Typable at |- g : (C->A) | (C->A->B);
// the CBN reduct is refuted, the CBV reduct is typable.
struct Counterexample2 {
  NetPtr start = parse_net("(x^ <x.d> b^ . d) d^ + z^ (v^ <z.a> a^ . g)");
  NetPtr cbn_reduct = parse_net("v^ (x^ <x.a> b^ . a) a^ . g");
  NetPtr cbv_reduct = parse_net("v^ (x^ (y^ <x.e> e^ . g) b^ . a) a^ . g");
  Ctx gamma;
  Ctx delta{{"g", normalize(parse_type("(C -> A) | (C -> A -> B)"))}};
};

inline DemoReport run_counterexample_2(int depth = 6, int universe = 24) {
  DemoReport rep;
  Counterexample2 ce;
  line(rep, "second counterexample");
  line(rep, "  start net:    " + print_net(ce.start));
  line(rep, "  contexts:     " + print_ctx(ce.gamma) + " |- " + print_ctx(ce.delta));

  SearchBudget b;
  b.depth = depth;
  b.universe = universe;
  SearchBudget find = b;
  find.universe = std::max(universe, 40);
  auto found = search_derivation(System::IU, ce.start, ce.gamma, ce.delta, find);
  verdict(rep, found.derivation && checks(found.derivation),
          "start net is typable (search found a derivation)");

  Trace tr = reduce(ce.start, Regime::CBN, 50);
  verdict(rep, alpha_eq(tr.final_net(), ce.cbn_reduct),
          "the CBN run ends at the offending reduct");
  line(rep, "  CBN reduct:   " + print_net(ce.cbn_reduct));

  auto refuted = search_derivation(System::IU, ce.cbn_reduct, ce.gamma, ce.delta, b);
  verdict(rep, !refuted.derivation && !refuted.exhausted_budget,
          "the CBN reduct is refuted at the same contexts (search exhausted, " +
              std::to_string(refuted.explored) + " judgements)");

  SearchBudget wide;
  wide.depth = depth + 2;
  wide.universe = universe + 8;
  auto refuted2 = search_derivation(System::IU, ce.cbn_reduct, ce.gamma, ce.delta, wide);
  verdict(rep, !refuted2.derivation && !refuted2.exhausted_budget,
          "the refutation is stable under a wider budget");

  Trace tv = reduce(ce.start, Regime::CBV, 50);
  verdict(rep, alpha_eq(tv.final_net(), ce.cbv_reduct), "the CBV run ends at its normal form");
  auto cbv_ok = search_derivation(System::IU, ce.cbv_reduct, ce.gamma, ce.delta, b);
  verdict(rep, cbv_ok.derivation && checks(cbv_ok.derivation),
          "the CBV reduct is typable at the same contexts");
  return rep;
}

// Expansion failure for the restricted systems: Q = <y.b> is CBN-typable,
// its one-step predecessor P = <y.b> a^ <+ x^ <z.d> needs rule cutL with the
// socket introduced in <z.d>, which fails.
inline DemoReport run_restricted_expansion_failure() {
  DemoReport rep;
  line(rep, "expansion failure under the CBN restriction");
  NetPtr q = parse_net("<y.b>");
  NetPtr p = parse_net("(<y.b>) a^ <+ x^ (<z.d>)");
  Ctx gamma{{"y", normalize(parse_type("A"))}, {"z", normalize(parse_type("B"))}};
  Ctx delta{{"b", normalize(parse_type("A"))}};
  line(rep, "  P = " + print_net(p));
  line(rep, "  Q = " + print_net(q) + "   (one cap-erasure step below P)");

  DerivPtr dq = mk_ax(System::CBN, q, gamma, delta);
  verdict(rep, checks(dq), "Q is typable under the CBN restriction");

  auto rs = find_redexes(p, Regime::CBN);
  bool step_ok = rs.size() == 1 && rs[0].rule == RuleId::DL_cap &&
                 alpha_eq(step(p, rs[0]), q);
  verdict(rep, step_ok, "P fires the cap-erasure step to Q under CBN");

  auto refuted = search_derivation(System::CBN, p, gamma, delta);
  verdict(rep, !refuted.derivation && !refuted.exhausted_budget,
          "P is refuted under the CBN restriction (search exhausted, " +
              std::to_string(refuted.explored) + " judgements)");

  // The unrestricted system expands fine, pinning the failure on the side
  // condition.
  DerivPtr dp = expand(p, rs[0], cast_system(dq, System::IU));
  verdict(rep, checks(dp), "the unrestricted system expands the same step");
  return rep;
}

// Property-run demos: the expansion and preservation harnesses at a chosen
// size, reporting counts.
inline DemoReport run_expansion_property(unsigned seed, int cases) {
  DemoReport rep;
  line(rep, "witness expansion over " + std::to_string(cases) + " random pairs");
  std::mt19937 rng(seed);
  int done = 0, guard = 0;
  while (done < cases && guard++ < cases * 60) {
    auto dq = random_iu_typed(rng, 4);
    if (!dq || !checks(*dq)) continue;
    auto pair = anti_step(rng, *dq);
    if (!pair) continue;
    DerivPtr dp = expand(pair->p, pair->redex, pair->dq);
    if (!checks(dp) || !ctx_equal(dp->conclusion.gamma, pair->dq->conclusion.gamma) ||
        !ctx_equal(dp->conclusion.delta, pair->dq->conclusion.delta)) {
      verdict(rep, false, "pair " + std::to_string(done) + " failed");
      return rep;
    }
    ++done;
  }
  verdict(rep, done == cases, std::to_string(done) + " pairs expanded, zero failures");
  return rep;
}

inline DemoReport run_preservation_property(System sys, unsigned seed, int cases) {
  DemoReport rep;
  Regime reg = sys == System::CBN ? Regime::CBN
               : sys == System::CBV ? Regime::CBV
                                    : Regime::Full;
  line(rep, std::string("witness reduction (") + system_name(sys) + ") over " +
                std::to_string(cases) + " random typed nets, every legal step");
  std::mt19937 rng(seed);
  int nets = 0, steps = 0, guard = 0;
  while (nets < cases && guard++ < cases * 60) {
    DerivPtr d;
    if (sys == System::Simple) {
      auto s = random_simple_typed(rng, 5);
      if (!s) continue;
      d = *s;
    } else {
      auto corpus = typed_corpus(rng, sys, 1, 4, reg, 2);
      if (corpus.empty()) continue;
      d = corpus[0];
    }
    ++nets;
    for (auto& r : find_redexes(d->conclusion.net, reg)) {
      DerivPtr d2 = preserve(d, r);
      ++steps;
      if (!checks(d2) || !ctx_equal(d2->conclusion.gamma, d->conclusion.gamma) ||
          !ctx_equal(d2->conclusion.delta, d->conclusion.delta)) {
        verdict(rep, false, "step " + std::to_string(steps) + " failed");
        return rep;
      }
    }
  }
  verdict(rep, nets == cases,
          std::to_string(nets) + " nets, " + std::to_string(steps) + " steps, zero failures");
  return rep;
}

}  // namespace demos

}  // namespace xcalc
