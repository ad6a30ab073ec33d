#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "xcalc/generate.hpp"
#include "xcalc/infer.hpp"
#include "xcalc/lambda.hpp"
#include "xcalc/parse.hpp"
#include "xcalc/transform.hpp"

using namespace xcalc;

namespace {

TypePtr ty(const char* s) { return normalize(parse_type(s)); }

DerivPtr peirce_derivation() {
  // z^ ((y^ <y.e> h^ . a) a^ [z] w^ <w.e>) e^ . g   at  |- g:((A->B)->A)->A
  NetPtr inner_exp = parse_net("y^ <y.e> h^ . a");
  DerivPtr ax_y = mk_ax(System::Simple, inner_exp->body,
                        Ctx{{"y", ty("A")}}, Ctx{{"e", ty("A")}, {"h", ty("B")}});
  DerivPtr d_exp = mk_arr_r(inner_exp, ax_y);
  NetPtr imp = Net::imp(inner_exp, "a", "z", "w", Net::capsule("w", "e"));
  DerivPtr ax_w = mk_ax(System::Simple, imp->right, Ctx{{"w", ty("A")}}, Ctx{{"e", ty("A")}});
  DerivPtr d_imp = mk_arr_l(imp, d_exp, ax_w);
  NetPtr whole = Net::exp("z", imp, "e", "g");
  return mk_arr_r(whole, d_imp);
}

}  // namespace

TEST_CASE("axiom holds in all four systems") {
  NetPtr cap = parse_net("<y.a>");
  for (System sys : {System::Simple, System::IU, System::CBN, System::CBV}) {
    DerivPtr d = mk_ax(sys, cap, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
    CHECK(checks(d));
  }
  // mediated axioms: an intersection on the socket, a union on the plug
  DerivPtr m1 = mk_ax(System::IU, cap, Ctx{{"y", ty("A & B")}}, Ctx{{"a", ty("A")}});
  CHECK(checks(m1));
  DerivPtr m2 = mk_ax(System::IU, cap, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A | C")}});
  CHECK(checks(m2));
  CHECK_THROWS_AS(mk_ax(System::IU, cap, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("B")}}), BuildError);
}

TEST_CASE("Peirce derivation checks; any single type edit fails locally") {
  DerivPtr d = peirce_derivation();
  CHECK(checks(d));
  CHECK(type_equal(ctx_get(d->conclusion.delta, "g"), ty("((A -> B) -> A) -> A")));

  std::function<int(const DerivPtr&)> count_nodes = [&](const DerivPtr& n) {
    int c = 1;
    for (auto& p : n->premises) c += count_nodes(p);
    return c;
  };
  int mutations = 0;
  std::function<DerivPtr(const DerivPtr&, int&, bool&)> mutate =
      [&](const DerivPtr& n, int& k, bool& done) -> DerivPtr {
    std::vector<DerivPtr> prems;
    for (auto& p : n->premises) prems.push_back(mutate(p, k, done));
    Judgement j = n->conclusion;
    if (!done && k-- == 0) {
      done = true;
      if (!j.gamma.empty())
        j.gamma.begin()->second = ty("Z9 -> Z9");
      else
        j.delta.begin()->second = ty("Z9 -> Z9");
    }
    return mk_node(n->system, n->rule, std::move(j), std::move(prems), n->data);
  };
  for (int i = 0; i < count_nodes(d); ++i) {
    int k = i;
    bool done = false;
    DerivPtr bad = mutate(d, k, done);
    auto err = check_derivation(bad);
    REQUIRE(err.has_value());
    ++mutations;
  }
  CHECK(mutations >= 4);
}

TEST_CASE("the simple subsumption: simple derivations check under IU unchanged") {
  std::mt19937 rng(71);
  int n = 0;
  for (int i = 0; i < 60; ++i) {
    auto d = random_simple_typed(rng, 4);
    if (!d) continue;
    CHECK(checks(*d));
    CHECK(checks(cast_system(*d, System::IU)));
    ++n;
  }
  CHECK(n >= 40);
}

TEST_CASE("context introduction and elimination") {
  NetPtr cap = parse_net("<y.a>");
  DerivPtr a1 = mk_ax(System::IU, cap, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
  DerivPtr a2 = mk_ax(System::IU, cap, Ctx{{"y", ty("B")}}, Ctx{{"a", ty("B")}});
  DerivPtr both = mk_inter_r("a", {a1, a2});
  CHECK(checks(both));
  CHECK(type_equal(ctx_get(both->conclusion.delta, "a"), ty("A & B")));
  CHECK(type_equal(ctx_get(both->conclusion.gamma, "y"), ty("A & B")));

  auto projs = elim_inter(both, "a");
  REQUIRE(projs.size() == 2);
  for (auto& p : projs) CHECK(checks(p));
  CHECK_THROWS_AS(elim_inter(a1, "a"), BuildError);

  DerivPtr u = mk_union_l("y", {a1, a2});
  CHECK(checks(u));
  auto uprojs = elim_union(u, "y");
  REQUIRE(uprojs.size() == 2);
  for (auto& p : uprojs) CHECK(checks(p));
}

TEST_CASE("weaken and thin") {
  NetPtr cap = parse_net("<y.a>");
  DerivPtr d = mk_ax(System::IU, cap, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
  DerivPtr w = weaken(d, "z", ty("B"), true);
  CHECK(checks(w));
  CHECK(ctx_has(w->conclusion.gamma, "z"));
  CHECK(weaken(w, "z", ty("B & B"), true) == w);
  CHECK_THROWS_AS(weaken(w, "z", ty("C"), true), BuildError);

  DerivPtr t = thin(w, "z");
  CHECK(checks(t));
  CHECK_FALSE(ctx_has(t->conclusion.gamma, "z"));
  CHECK_THROWS_AS(thin(d, "y"), BuildError);  // free subject

  DerivPtr t2 = thin_to_free(w);
  CHECK(t2->conclusion.gamma.size() == 1);
}

TEST_CASE("system restriction: unionL at a non-introduced socket fails under CBN") {
  // x occurs free inside the left subnet, so the import does not introduce it
  NetPtr n = parse_net("(<x.b>) b^ [x] y^ (<y.a>)");
  DerivPtr l1 = mk_ax(System::IU, n->left, Ctx{{"x", ty("A")}}, Ctx{{"b", ty("A")}});
  DerivPtr r1 = mk_ax(System::IU, n->right, Ctx{{"y", ty("C")}}, Ctx{{"a", ty("C")}});
  DerivPtr imp = mk_arr_l(n, l1, r1);
  DerivPtr d = decorate_union(imp, "x");
  CHECK(checks(d));
  auto err = check_derivation(cast_system(d, System::CBN));
  REQUIRE(err.has_value());
  CHECK(err->reason.find("introduced") != std::string::npos);

  DerivPtr di = decorate_inter(imp, "a");
  CHECK(checks(di));
  auto err2 = check_derivation(cast_system(di, System::CBV));
  REQUIRE(err2.has_value());
  CHECK(err2->reason.find("introduced") != std::string::npos);
}

TEST_CASE("generation facts") {
  NetPtr cap = parse_net("<x.a>");
  DerivPtr axd = mk_ax(System::IU, cap, Ctx{{"x", ty("A & B")}}, Ctx{{"a", ty("A")}});
  GenerationFacts f = invert(axd);
  CHECK(f.shape == NetKind::Capsule);
  CHECK(leq(f.left_type, f.right_type));

  DerivPtr p = peirce_derivation();
  GenerationFacts fe = invert(cast_system(p, System::IU));
  CHECK(fe.shape == NetKind::Export);
  CHECK(leq(Type::arrow(fe.left_type, fe.right_type), ctx_get(p->conclusion.delta, "g")));

  std::mt19937 rng(97);
  int cuts = 0;
  for (int i = 0; i < 40 && cuts < 10; ++i) {
    auto c = compose_union_case_cut(rng, 2, System::IU);
    if (!c) continue;
    GenerationFacts fc = invert(*c);
    CHECK(fc.shape == NetKind::Cut);
    CHECK(fc.cut_shape == 2);
    ++cuts;
  }
  CHECK(cuts >= 5);

  // the other two cut shapes
  int shape1 = 0, shape3 = 0;
  for (int i = 0; i < 60 && (shape1 < 5 || shape3 < 5); ++i) {
    if (auto c = compose_inter_case_cut(rng, 2, System::IU)) {
      if (invert(*c).cut_shape == 1) ++shape1;
    }
    if (auto s = random_simple_typed(rng, 3)) {
      if (is_cut((*s)->conclusion.net) && invert(cast_system(*s, System::IU)).cut_shape == 3)
        ++shape3;
    }
  }
  CHECK(shape1 >= 5);
  CHECK(shape3 >= 5);
  NetPtr c2 = parse_net("<y.a>");
  DerivPtr a1 = mk_ax(System::IU, c2, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
  CHECK_THROWS_AS(invert(mk_inter_r("a", {a1, a1})), BuildError);
}

TEST_CASE("renaming cuts") {
  NetPtr n = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  DerivPtr l = mk_ax(System::IU, n->left, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
  DerivPtr r = mk_ax(System::IU, n->right, Ctx{{"x", ty("A")}}, Ctx{{"b", ty("A")}});
  DerivPtr d = mk_cut(n, l, r);
  DerivPtr ren = rename_cut_derivation(d);
  CHECK(checks(ren));
  CHECK(net_equal(ren->conclusion.net, parse_net("<y.b>")));
  CHECK(ctx_equal(ren->conclusion.gamma, d->conclusion.gamma));
  CHECK(ctx_equal(ren->conclusion.delta, d->conclusion.delta));

  NetPtr m = parse_net("(x^ <x.g> g^ . a) a^ + z^ (<z.b>)");
  DerivPtr ax = mk_ax(System::IU, m->left->body, Ctx{{"x", ty("A")}}, Ctx{{"g", ty("A")}});
  DerivPtr ex = mk_arr_r(m->left, ax);
  DerivPtr rz = mk_ax(System::IU, m->right, Ctx{{"z", ty("A -> A")}}, Ctx{{"b", ty("A -> A")}});
  DerivPtr dm = mk_cut(m, ex, rz);
  DerivPtr renm = rename_cut_derivation(dm);
  CHECK(checks(renm));
  CHECK(alpha_eq(renm->conclusion.net, parse_net("x^ <x.g> g^ . b")));

  NetPtr k = parse_net("(<y.a>) a^ + x^ ((<x.g>) g^ [w] v^ (<v.b>))");
  DerivPtr kl = mk_ax(System::IU, k->left, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
  DerivPtr k1 = mk_ax(System::IU, k->right->left, Ctx{{"x", ty("A")}}, Ctx{{"g", ty("A")}});
  DerivPtr k2 = mk_ax(System::IU, k->right->right, Ctx{{"v", ty("B")}}, Ctx{{"b", ty("B")}});
  DerivPtr kimp = mk_arr_l(k->right, k1, k2);
  DerivPtr kd = mk_cut(k, kl, kimp);
  DerivPtr renk = rename_cut_derivation(kd);
  CHECK(checks(renk));
  CHECK(alpha_eq(renk->conclusion.net, parse_net("(<y.g>) g^ [w] v^ (<v.b>)")));
}

TEST_CASE("simple witness reduction over random typed nets, every full step") {
  std::mt19937 rng(101);
  int nets = 0, steps = 0;
  while (nets < 120) {
    auto d0 = random_simple_typed(rng, 5);
    if (!d0) continue;
    ++nets;
    const DerivPtr& d = *d0;
    for (auto& r : find_redexes(d->conclusion.net, Regime::Full)) {
      DerivPtr d2 = preserve(d, r);
      ++steps;
      CHECK(checks(d2));
      CHECK(ctx_equal(d2->conclusion.gamma, d->conclusion.gamma));
      CHECK(ctx_equal(d2->conclusion.delta, d->conclusion.delta));
    }
  }
  CHECK(steps > 150);
}

TEST_CASE("CBN and CBV witness reduction over their corpora") {
  std::mt19937 rng(103);
  for (System sys : {System::CBN, System::CBV}) {
    Regime reg = sys == System::CBN ? Regime::CBN : Regime::CBV;
    auto corpus = typed_corpus(rng, sys, 80, 4, reg, 2);
    CHECK(corpus.size() >= 60);
    int steps = 0;
    for (auto& d : corpus) {
      for (auto& r : find_redexes(d->conclusion.net, reg)) {
        DerivPtr d2 = preserve(d, r);
        ++steps;
        CHECK(checks(d2));
        CHECK(ctx_equal(d2->conclusion.gamma, d->conclusion.gamma));
        CHECK(ctx_equal(d2->conclusion.delta, d->conclusion.delta));
      }
    }
    CHECK(steps > 80);
  }
}

TEST_CASE("witness expansion over random pairs") {
  std::mt19937 rng(107);
  int pairs = 0;
  while (pairs < 150) {
    auto dq = random_iu_typed(rng, 4);
    if (!dq || !checks(*dq)) continue;
    auto pair = anti_step(rng, *dq);
    if (!pair) continue;
    ++pairs;
    DerivPtr dp = expand(pair->p, pair->redex, pair->dq);
    CHECK(checks(dp));
    CHECK(net_equal(dp->conclusion.net, pair->p));
    CHECK(ctx_equal(dp->conclusion.gamma, pair->dq->conclusion.gamma));
    CHECK(ctx_equal(dp->conclusion.delta, pair->dq->conclusion.delta));
  }
}

TEST_CASE("expansion over forward steps: reduce then expand returns to the redex") {
  std::mt19937 rng(109);
  int pairs = 0;
  while (pairs < 120) {
    auto d0 = random_simple_typed(rng, 4);
    if (!d0) continue;
    DerivPtr d = *d0;
    auto redexes = find_redexes(d->conclusion.net, Regime::Full);
    if (redexes.empty()) continue;
    for (auto& r : redexes) {
      DerivPtr dq = cast_system(preserve(d, r), System::IU);
      DerivPtr dp = expand(d->conclusion.net, r, dq);
      ++pairs;
      CHECK(checks(dp));
      CHECK(ctx_equal(dp->conclusion.gamma, dq->conclusion.gamma));
      CHECK(ctx_equal(dp->conclusion.delta, dq->conclusion.delta));
    }
  }
}

TEST_CASE("expansion proof cases that need TOP and BOT") {
  NetPtr q = parse_net("<y.b>");
  DerivPtr dq = cast_system(mk_ax(System::Simple, q, Ctx{{"y", ty("A")}}, Ctx{{"b", ty("A")}}),
                            System::IU);
  NetPtr p = parse_net("(<y.b>) a^ <+ x^ (<t.c>)");
  auto rs = find_redexes(p, Regime::Full);
  REQUIRE(rs.size() == 1);
  REQUIRE(rs[0].rule == RuleId::DL_cap);
  DerivPtr dp = expand(p, rs[0], dq);
  CHECK(checks(dp));
  bool found_bot = false;
  std::function<void(const DerivPtr&)> scan = [&](const DerivPtr& n) {
    for (auto& [k, v] : n->conclusion.gamma)
      if (normalize(v)->kind == TypeKind::Bot) found_bot = true;
    for (auto& pr : n->premises) scan(pr);
  };
  scan(dp);
  CHECK(found_bot);

  NetPtr p2 = parse_net("(<t.c>) a^ +> x^ (<y.b>)");
  auto rs2 = find_redexes(p2, Regime::Full);
  REQUIRE(rs2.size() == 1);
  REQUIRE(rs2[0].rule == RuleId::DR_cap);
  DerivPtr dp2 = expand(p2, rs2[0], dq);
  CHECK(checks(dp2));
}

TEST_CASE("CBN expansion-failure pair") {
  // Q = <y.b> is CBN-typable; P = <y.b> a <+ x <z.d> needs rule cutL with x
  // introduced in <z.d>, which fails.
  NetPtr q = parse_net("<y.b>");
  DerivPtr dq = mk_ax(System::CBN, q, Ctx{{"y", ty("A")}, {"z", ty("B")}}, Ctx{{"b", ty("A")}});
  CHECK(checks(dq));
  NetPtr p = parse_net("(<y.b>) a^ <+ x^ (<z.d>)");
  auto rs = find_redexes(p, Regime::Full);
  REQUIRE(rs[0].rule == RuleId::DL_cap);
  DerivPtr dp_iu = expand(p, rs[0], cast_system(dq, System::IU));
  CHECK(checks(dp_iu));
  auto err = check_derivation(cast_system(dp_iu, System::CBN));
  REQUIRE(err.has_value());
}

TEST_CASE("the whole self-application trace expands backward at |- a : C -> C") {
  // Type the normal form, then fold witness expansion backward along the
  // deterministic trace: every intermediate net of the reduction gets a
  // checked derivation at the same contexts.
  NetPtr start = translate(parse_lam("(\\x. x x) (\\y. y)"), "a");
  for (Regime reg : {Regime::Full, Regime::CBN, Regime::CBV}) {
    Trace tr = reduce(start, reg, 200);
    NetPtr nf = tr.final_net();
    REQUIRE(nf->kind == NetKind::Export);
    DerivPtr ax = mk_ax(System::IU, nf->body, Ctx{{nf->bind_socket, ty("C")}},
                        Ctx{{nf->bind_plug, ty("C")}});
    DerivPtr d = mk_arr_r(nf, ax);
    REQUIRE(checks(d));
    for (int i = static_cast<int>(tr.steps.size()) - 1; i >= 0; --i) {
      NetPtr src = i == 0 ? tr.start : tr.steps[i - 1].result;
      d = expand(src, tr.steps[i].redex, d);
      CHECK(checks(d));
    }
    CHECK(net_equal(d->conclusion.net, start));
    CHECK(d->conclusion.gamma.empty());
    CHECK(type_equal(ctx_get(d->conclusion.delta, "a"), ty("C -> C")));
  }
}

TEST_CASE("preserve flags illegal inputs loudly") {
  NetPtr n = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  DerivPtr l = mk_ax(System::Simple, n->left, Ctx{{"y", ty("A")}}, Ctx{{"a", ty("A")}});
  DerivPtr r = mk_ax(System::Simple, n->right, Ctx{{"x", ty("A")}}, Ctx{{"b", ty("A")}});
  DerivPtr d = mk_cut(n, l, r);
  Redex bogus{{0}, RuleId::Ax};
  CHECK_THROWS(preserve(d, bogus));
}
