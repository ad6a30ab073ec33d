#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xcalc/builders.hpp"
#include "xcalc/derivation.hpp"
#include "xcalc/net.hpp"
#include "xcalc/rewrite.hpp"
#include "xcalc/types.hpp"

namespace xcalc {

// ---------------------------------------------------------------------------
// Lambda terms.

enum class LamKind { Var, Abs, App };

struct Lam;
using LamPtr = std::shared_ptr<const Lam>;

struct Lam {
  LamKind kind;
  std::string name;  // Var / Abs binder
  LamPtr body;       // Abs
  LamPtr fn, arg;    // App

  static LamPtr var(std::string n) {
    auto t = std::make_shared<Lam>();
    t->kind = LamKind::Var;
    t->name = std::move(n);
    return t;
  }
  static LamPtr abs(std::string n, LamPtr b) {
    auto t = std::make_shared<Lam>();
    t->kind = LamKind::Abs;
    t->name = std::move(n);
    t->body = std::move(b);
    return t;
  }
  static LamPtr app(LamPtr f, LamPtr a) {
    auto t = std::make_shared<Lam>();
    t->kind = LamKind::App;
    t->fn = std::move(f);
    t->arg = std::move(a);
    return t;
  }
};

inline void lam_free_vars(const LamPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case LamKind::Var:
      out.insert(t->name);
      return;
    case LamKind::Abs: {
      std::set<std::string> b;
      lam_free_vars(t->body, b);
      b.erase(t->name);
      out.insert(b.begin(), b.end());
      return;
    }
    case LamKind::App:
      lam_free_vars(t->fn, out);
      lam_free_vars(t->arg, out);
      return;
  }
}

inline std::set<std::string> lam_free_vars(const LamPtr& t) {
  std::set<std::string> s;
  lam_free_vars(t, s);
  return s;
}

inline std::string print_lam(const LamPtr& t, int ctx = 0) {
  // ctx: 0 top, 1 function position, 2 argument position
  switch (t->kind) {
    case LamKind::Var:
      return t->name;
    case LamKind::Abs: {
      std::string s = "\\" + t->name + ". " + print_lam(t->body, 0);
      return ctx == 0 ? s : "(" + s + ")";
    }
    case LamKind::App: {
      std::string s = print_lam(t->fn, 1) + " " + print_lam(t->arg, 2);
      return ctx == 2 ? "(" + s + ")" : s;
    }
  }
  return {};
}

// term := ident | "\" ident "." term | term term | "(" term ")"
inline LamPtr parse_lam(const std::string& src) {
  size_t i = 0;
  auto skip = [&] {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
  };
  auto ident = [&]() -> std::string {
    skip();
    size_t j = i;
    while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
      ++j;
    if (j == i) throw std::runtime_error("lambda syntax error at offset " + std::to_string(i));
    std::string s = src.substr(i, j - i);
    i = j;
    return s;
  };
  std::function<LamPtr()> term, atom;
  atom = [&]() -> LamPtr {
    skip();
    if (i < src.size() && src[i] == '(') {
      ++i;
      LamPtr t = term();
      skip();
      if (i >= src.size() || src[i] != ')')
        throw std::runtime_error("expected ')' at offset " + std::to_string(i));
      ++i;
      return t;
    }
    if (i < src.size() && src[i] == '\\') {
      ++i;
      std::string x = ident();
      skip();
      if (i >= src.size() || src[i] != '.')
        throw std::runtime_error("expected '.' at offset " + std::to_string(i));
      ++i;
      return Lam::abs(x, term());
    }
    return Lam::var(ident());
  };
  term = [&]() -> LamPtr {
    LamPtr t = atom();
    for (;;) {
      skip();
      if (i >= src.size() || src[i] == ')') return t;
      t = Lam::app(t, atom());
    }
  };
  LamPtr t = term();
  skip();
  if (i != src.size()) throw std::runtime_error("trailing input at offset " + std::to_string(i));
  return t;
}

// Capture-avoiding substitution with on-demand renaming.
inline LamPtr lam_subst(const LamPtr& t, const std::string& x, const LamPtr& s, int& fresh) {
  switch (t->kind) {
    case LamKind::Var:
      return t->name == x ? s : t;
    case LamKind::Abs: {
      if (t->name == x) return t;
      auto fv = lam_free_vars(s);
      if (fv.count(t->name)) {
        std::string nn = "u" + std::to_string(fresh++);
        while (fv.count(nn) || lam_free_vars(t->body).count(nn)) nn = "u" + std::to_string(fresh++);
        LamPtr renamed = lam_subst(t->body, t->name, Lam::var(nn), fresh);
        return Lam::abs(nn, lam_subst(renamed, x, s, fresh));
      }
      return Lam::abs(t->name, lam_subst(t->body, x, s, fresh));
    }
    case LamKind::App:
      return Lam::app(lam_subst(t->fn, x, s, fresh), lam_subst(t->arg, x, s, fresh));
  }
  return t;
}

// All one-step contextual beta contractions.
inline std::vector<LamPtr> beta_step(const LamPtr& t) {
  std::vector<LamPtr> out;
  switch (t->kind) {
    case LamKind::Var:
      return out;
    case LamKind::Abs:
      for (auto& b : beta_step(t->body)) out.push_back(Lam::abs(t->name, b));
      return out;
    case LamKind::App: {
      if (t->fn->kind == LamKind::Abs) {
        int fresh = 0;
        out.push_back(lam_subst(t->fn->body, t->fn->name, t->arg, fresh));
      }
      for (auto& f : beta_step(t->fn)) out.push_back(Lam::app(f, t->arg));
      for (auto& a : beta_step(t->arg)) out.push_back(Lam::app(t->fn, a));
      return out;
    }
  }
  return out;
}

inline bool lam_is_value(const LamPtr& t) { return t->kind != LamKind::App; }

// Call-by-name steps: head contractions only, never under an abstraction.
inline std::vector<LamPtr> beta_step_cbn(const LamPtr& t) {
  std::vector<LamPtr> out;
  if (t->kind != LamKind::App) return out;
  if (t->fn->kind == LamKind::Abs) {
    int fresh = 0;
    out.push_back(lam_subst(t->fn->body, t->fn->name, t->arg, fresh));
  }
  for (auto& f : beta_step_cbn(t->fn)) out.push_back(Lam::app(f, t->arg));
  return out;
}

// Call-by-value steps: the argument must be a value, evaluation left to
// right, never under an abstraction.
inline std::vector<LamPtr> beta_step_cbv(const LamPtr& t) {
  std::vector<LamPtr> out;
  if (t->kind != LamKind::App) return out;
  if (t->fn->kind == LamKind::Abs && lam_is_value(t->arg)) {
    int fresh = 0;
    out.push_back(lam_subst(t->fn->body, t->fn->name, t->arg, fresh));
  }
  for (auto& f : beta_step_cbv(t->fn)) out.push_back(Lam::app(f, t->arg));
  if (lam_is_value(t->fn))
    for (auto& a : beta_step_cbv(t->arg)) out.push_back(Lam::app(t->fn, a));
  return out;
}

inline bool lam_alpha_eq(const LamPtr& a, const LamPtr& b,
                         std::map<std::string, std::string> m = {},
                         std::map<std::string, std::string> r = {}) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case LamKind::Var: {
      auto ia = m.find(a->name);
      auto ib = r.find(b->name);
      if (ia != m.end() || ib != r.end())
        return ia != m.end() && ib != r.end() && ia->second == b->name && ib->second == a->name;
      return a->name == b->name;
    }
    case LamKind::Abs: {
      auto m2 = m;
      auto r2 = r;
      m2[a->name] = b->name;
      r2[b->name] = a->name;
      return lam_alpha_eq(a->body, b->body, m2, r2);
    }
    case LamKind::App:
      return lam_alpha_eq(a->fn, b->fn, m, r) && lam_alpha_eq(a->arg, b->arg, m, r);
  }
  return false;
}

// Renames bound term variables apart from each other and from the frees.
inline LamPtr lam_barendregt(const LamPtr& t) {
  std::set<std::string> seen = lam_free_vars(t);
  int next = 0;
  std::function<LamPtr(const LamPtr&, std::map<std::string, std::string>)> go =
      [&](const LamPtr& u, std::map<std::string, std::string> ren) -> LamPtr {
    switch (u->kind) {
      case LamKind::Var: {
        auto it = ren.find(u->name);
        return it == ren.end() ? u : Lam::var(it->second);
      }
      case LamKind::Abs: {
        std::string nn = u->name;
        if (!seen.insert(nn).second) {
          do nn = "w" + std::to_string(next++);
          while (!seen.insert(nn).second);
          ren[u->name] = nn;
        } else {
          ren.erase(u->name);
        }
        return Lam::abs(nn, go(u->body, ren));
      }
      case LamKind::App:
        return Lam::app(go(u->fn, ren), go(u->arg, ren));
    }
    return u;
  };
  return go(t, {});
}

inline int lam_size(const LamPtr& t) {
  switch (t->kind) {
    case LamKind::Var:
      return 1;
    case LamKind::Abs:
      return 1 + lam_size(t->body);
    case LamKind::App:
      return 1 + lam_size(t->fn) + lam_size(t->arg);
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Principal Curry typing by first-order unification.

namespace detail {

struct Unifier {
  std::map<std::string, TypePtr> subst;
  int next = 0;

  TypePtr fresh() { return Type::var("t" + std::to_string(next++)); }

  TypePtr walk(TypePtr t) {
    while (t->kind == TypeKind::Var) {
      auto it = subst.find(t->name);
      if (it == subst.end()) return t;
      t = it->second;
    }
    return t;
  }

  TypePtr resolve(TypePtr t) {
    t = walk(t);
    if (t->kind == TypeKind::Arrow) return Type::arrow(resolve(t->lhs), resolve(t->rhs));
    return t;
  }

  bool occurs(const std::string& v, TypePtr t) {
    t = walk(t);
    if (t->kind == TypeKind::Var) return t->name == v;
    if (t->kind == TypeKind::Arrow) return occurs(v, t->lhs) || occurs(v, t->rhs);
    return false;
  }

  bool unify(TypePtr a, TypePtr b) {
    a = walk(a);
    b = walk(b);
    if (a->kind == TypeKind::Var) {
      if (b->kind == TypeKind::Var && a->name == b->name) return true;
      if (occurs(a->name, b)) return false;
      subst[a->name] = b;
      return true;
    }
    if (b->kind == TypeKind::Var) return unify(b, a);
    return unify(a->lhs, b->lhs) && unify(a->rhs, b->rhs);
  }

  std::map<const Lam*, TypePtr> node_type;

  bool infer(const LamPtr& t, std::map<std::string, TypePtr>& env, TypePtr& out) {
    switch (t->kind) {
      case LamKind::Var: {
        auto it = env.find(t->name);
        if (it == env.end()) {
          env[t->name] = fresh();
          it = env.find(t->name);
        }
        out = it->second;
        node_type[t.get()] = out;
        return true;
      }
      case LamKind::Abs: {
        TypePtr a = fresh();
        auto saved = env.find(t->name) != env.end() ? std::optional<TypePtr>(env[t->name])
                                                    : std::nullopt;
        env[t->name] = a;
        TypePtr b;
        if (!infer(t->body, env, b)) return false;
        if (saved)
          env[t->name] = *saved;
        else
          env.erase(t->name);
        out = Type::arrow(a, b);
        node_type[t.get()] = out;
        return true;
      }
      case LamKind::App: {
        TypePtr f, a;
        if (!infer(t->fn, env, f) || !infer(t->arg, env, a)) return false;
        TypePtr r = fresh();
        if (!unify(f, Type::arrow(a, r))) return false;
        out = r;
        node_type[t.get()] = out;
        return true;
      }
    }
    return false;
  }
};

}  // namespace detail

struct CurryResult {
  Ctx gamma;  // types of free term variables
  TypePtr type;
};

// Principal Curry typing; nullopt for untypable terms.
inline std::optional<CurryResult> curry_infer(const LamPtr& t) {
  detail::Unifier u;
  std::map<std::string, TypePtr> env;
  TypePtr out;
  if (!u.infer(t, env, out)) return std::nullopt;
  CurryResult r;
  r.type = u.resolve(out);
  for (auto& fv : lam_free_vars(t)) r.gamma[fv] = u.resolve(env[fv]);
  // Rename the unification variables to A, B, C, ... deterministically.
  std::map<std::string, std::string> ren;
  const char* names = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::function<void(const TypePtr&)> assign = [&](const TypePtr& ty) {
    if (ty->kind == TypeKind::Var && !ren.count(ty->name)) {
      size_t k = ren.size();
      std::string nn = k < 26 ? std::string(1, names[k]) : "T" + std::to_string(k);
      ren[ty->name] = nn;
    }
    if (ty->kind == TypeKind::Arrow) {
      assign(ty->lhs);
      assign(ty->rhs);
    }
  };
  for (auto& [_, ty] : r.gamma) assign(ty);
  assign(r.type);
  for (auto& [k, ty] : r.gamma) ty = rename_type_vars(ty, ren);
  r.type = rename_type_vars(r.type, ren);
  return r;
}

// ---------------------------------------------------------------------------
// The natural-deduction intersection system for LC (checker only).
// Rules: Ax, interI (n >= 0, TOP as the empty intersection), interE, arrI,
// arrE.

struct LCDerivation;
using LCDerivPtr = std::shared_ptr<const LCDerivation>;

enum class LCRule { Ax, ArrI, ArrE, InterI, InterE };

struct LCDerivation {
  LCRule rule;
  Ctx gamma;
  LamPtr term;
  TypePtr type;
  std::vector<LCDerivPtr> premises;
  int index = 0;  // interE

  static LCDerivPtr mk(LCRule r, Ctx g, LamPtr t, TypePtr ty, std::vector<LCDerivPtr> ps,
                       int idx = 0) {
    auto d = std::make_shared<LCDerivation>();
    d->rule = r;
    d->gamma = normalize_ctx(g);
    d->term = std::move(t);
    d->type = normalize(ty);
    d->premises = std::move(ps);
    d->index = idx;
    return d;
  }
};

inline std::optional<std::string> check_lc_inter(const LCDerivPtr& d) {
  for (auto& p : d->premises) {
    if (auto err = check_lc_inter(p)) return err;
  }
  switch (d->rule) {
    case LCRule::Ax: {
      if (d->term->kind != LamKind::Var) return "Ax: term is not a variable";
      TypePtr g = ctx_get(d->gamma, d->term->name);
      if (!g) return "Ax: variable not in context";
      if (!type_equal(g, d->type)) return "Ax: context type differs from the statement";
      return std::nullopt;
    }
    case LCRule::ArrI: {
      if (d->term->kind != LamKind::Abs) return "arrI: term is not an abstraction";
      if (d->premises.size() != 1) return "arrI: expected one premise";
      const auto& p = d->premises[0];
      TypePtr nt = normalize(d->type);
      if (nt->kind != TypeKind::Arrow) return "arrI: statement type is not an arrow";
      if (!lam_alpha_eq(Lam::abs(d->term->name, p->term), d->term))
        return "arrI: premise term is not the body";
      TypePtr a = ctx_get(p->gamma, d->term->name);
      if (!a || !type_equal(a, normalize(nt->lhs))) return "arrI: binder type mismatch";
      if (!type_equal(p->type, normalize(nt->rhs))) return "arrI: body type mismatch";
      if (!ctx_equal(ctx_without(p->gamma, d->term->name), d->gamma))
        return "arrI: context mismatch";
      return std::nullopt;
    }
    case LCRule::ArrE: {
      if (d->term->kind != LamKind::App) return "arrE: term is not an application";
      if (d->premises.size() != 2) return "arrE: expected two premises";
      const auto& f = d->premises[0];
      const auto& a = d->premises[1];
      if (!lam_alpha_eq(f->term, d->term->fn) || !lam_alpha_eq(a->term, d->term->arg))
        return "arrE: premise terms mismatch";
      TypePtr ft = normalize(f->type);
      if (ft->kind != TypeKind::Arrow) return "arrE: function type is not an arrow";
      if (!type_equal(normalize(ft->lhs), a->type)) return "arrE: argument type mismatch";
      if (!type_equal(normalize(ft->rhs), d->type)) return "arrE: result type mismatch";
      if (!ctx_equal(f->gamma, d->gamma) || !ctx_equal(a->gamma, d->gamma))
        return "arrE: contexts differ between premises";
      return std::nullopt;
    }
    case LCRule::InterI: {
      std::vector<TypePtr> parts;
      for (auto& p : d->premises) {
        if (!lam_alpha_eq(p->term, d->term)) return "interI: premise term mismatch";
        if (!ctx_equal(p->gamma, d->gamma)) return "interI: premise context mismatch";
        parts.push_back(p->type);
      }
      if (!type_equal(d->type, normalize(make_inter(parts))))
        return "interI: statement is not the intersection of the premises";
      return std::nullopt;
    }
    case LCRule::InterE: {
      if (d->premises.size() != 1) return "interE: expected one premise";
      const auto& p = d->premises[0];
      if (!lam_alpha_eq(p->term, d->term)) return "interE: premise term mismatch";
      if (!ctx_equal(p->gamma, d->gamma)) return "interE: premise context mismatch";
      auto spine = inter_spine(p->type);
      if (d->index < 1 || d->index > static_cast<int>(spine.size())) return "interE: bad index";
      if (!type_equal(d->type, normalize(spine[d->index - 1]))) return "interE: wrong component";
      return std::nullopt;
    }
  }
  return "unknown rule";
}

// ---------------------------------------------------------------------------
// The interpretation of lambda terms into nets via a plug.

inline NetPtr translate(const LamPtr& t, const std::string& plug, NameGen& gen) {
  switch (t->kind) {
    case LamKind::Var:
      return Net::capsule(t->name, plug);
    case LamKind::Abs: {
      std::string b = gen.fresh_plug();
      return Net::exp(t->name, translate(t->body, b, gen), b, plug);
    }
    case LamKind::App: {
      std::string g = gen.fresh_plug();
      std::string b = gen.fresh_plug();
      std::string x = gen.fresh_socket();
      std::string y = gen.fresh_socket();
      NetPtr fn = translate(t->fn, g, gen);
      NetPtr arg = translate(t->arg, b, gen);
      return Net::cut(fn, g, Activation::None, x,
                      Net::imp(arg, b, x, y, Net::capsule(y, plug)));
    }
  }
  throw std::logic_error("translate: bad term");
}

inline void lam_all_names(const LamPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case LamKind::Var:
      out.insert(t->name);
      return;
    case LamKind::Abs:
      out.insert(t->name);
      lam_all_names(t->body, out);
      return;
    case LamKind::App:
      lam_all_names(t->fn, out);
      lam_all_names(t->arg, out);
      return;
  }
}

inline NetPtr translate(const LamPtr& t, const std::string& plug) {
  NameGen gen;
  gen.mark_used(plug);
  std::set<std::string> names;
  lam_all_names(t, names);
  for (auto& v : names) gen.mark_used(v);
  // Bound term variables become bound sockets; a final pass refreshes any
  // clash so the result is in Barendregt form regardless of source names.
  NetPtr n = translate(t, plug, gen);
  NameGen g2;
  return barendregt(n, g2);
}

// The optional explicit-substitution clause: M<x:=N> as a right-activated cut.
inline NetPtr translate_esub(const LamPtr& m, const std::string& x, const LamPtr& n,
                             const std::string& plug) {
  NameGen gen;
  gen.mark_used(plug);
  for (auto& v : lam_free_vars(m)) gen.mark_used(v);
  for (auto& v : lam_free_vars(n)) gen.mark_used(v);
  std::string g = gen.fresh_plug();
  NetPtr body = translate(m, plug, gen);
  NetPtr sub = translate(n, g, gen);
  NetPtr out = Net::cut(sub, g, Activation::Right, x, body);
  NameGen g2;
  return barendregt(out, g2);
}

// ---------------------------------------------------------------------------
// Simulation: every step of the regime's own lambda strategy has the
// translated reduct reachable in the regime's reduction relation. Full checks
// all beta steps; CBN and CBV check their strategies' steps (the restricted
// X reductions cannot rewrite inside positions their strategies never touch,
// e.g. a non-value argument under call-by-value).
//
// The witness path is built constructively — fire the exp-imp variant, turn
// the continuation cut into a renaming, then push the substitution cut
// through the body, erasing or renaming at each leaf — and every edge is an
// actual engine step (renaming/garbage shortcuts included; those are
// themselves checked core-reachable elsewhere). An undirected bounded search
// is the fallback for shapes the builder does not recognise.

namespace detail {

struct SimWalk {
  NetPtr cur;
  Regime regime;

  void fire(RuleId rule, const Path& pos) {
    for (auto& r : find_redexes(cur, regime, true)) {
      if (r.position == pos && r.rule == rule) {
        NameGen gen;
        cur = step(cur, r, gen);
        return;
      }
    }
    throw std::runtime_error(std::string("simulation path: ") + rule_name(rule) + " @ " +
                             print_path(pos) + " does not fire");
  }

  static bool in_fv(const LamPtr& t, const std::string& x) { return lam_free_vars(t).count(x); }

  // cur at `pos` is cutR [[na]] d^ +> x^ [[mb]]c; pushes it to [[mb[na/x]]]c.
  void subst_active(Path pos, const LamPtr& mb, const std::string& x) {
    switch (mb->kind) {
      case LamKind::Var: {
        // mb == x (callers erase the cut otherwise)
        fire(RuleId::DR_d, pos);
        fire(RuleId::Ren_L, pos);
        return;
      }
      case LamKind::Abs: {
        fire(RuleId::DR_exp, pos);
        Path inner = pos;
        inner.push_back(0);
        subst_entry(inner, mb->body, x, true);
        return;
      }
      case LamKind::App: {
        fire(RuleId::DR_cut, pos);
        Path right = pos;
        right.push_back(1);
        fire(RuleId::DR_impIns, right);
        Path cap = right;
        cap.push_back(1);
        fire(RuleId::DR_cap, cap);
        Path arg = right;
        arg.push_back(0);
        subst_entry(arg, mb->arg, x, true);
        Path fn = pos;
        fn.push_back(0);
        subst_entry(fn, mb->fn, x, true);
        return;
      }
    }
  }

  // cur at `pos` is the substitution cut for [[mb]]; active when the parent
  // propagation already activated it.
  void subst_entry(Path pos, const LamPtr& mb, const std::string& x, bool active) {
    if (!in_fv(mb, x)) {
      if (!active) fire(RuleId::ActR, pos);
      fire(RuleId::GC_R, pos);
      return;
    }
    if (mb->kind == LamKind::Var) {
      if (active) fire(RuleId::DR_d, pos);
      fire(RuleId::Ren_L, pos);
      return;
    }
    if (!active) fire(RuleId::ActR, pos);
    subst_active(pos, mb, x);
  }

  // cur at `pos` is the translated beta redex cut((x^ [[mb]] e^.g), g, w,
  // ([[na]] d [w] u <u.c>)).
  void contract(Path pos, const LamPtr& mb, const std::string& x, const LamPtr&) {
    if (regime == Regime::CBN) {
      fire(RuleId::ExpImpLeftAssoc, pos);
      Path inner = pos;
      inner.push_back(0);
      subst_entry(inner, mb, x, false);
      fire(RuleId::Ren_L, pos);
      return;
    }
    fire(RuleId::ExpImpRightAssoc, pos);
    Path inner = pos;
    inner.push_back(1);
    fire(RuleId::Ren_L, inner);
    subst_entry(pos, mb, x, false);
  }
};

// Walks the term to the redex occurrence, building both the net path of its
// translation and the contraction callback.
inline bool sim_try_paths(const LamPtr& m, Regime regime, const NetPtr& src, const NetPtr& dst) {
  // Enumerate redex occurrences with their net positions and the reduct.
  struct Occ {
    Path net_pos;
    LamPtr mb, na;
    std::string x;
    LamPtr reduct_whole;
  };
  std::vector<Occ> occs;
  std::function<LamPtr(const LamPtr&, Path, const std::function<LamPtr(LamPtr)>&)> walk =
      [&](const LamPtr& t, Path pos, const std::function<LamPtr(LamPtr)>& rebuild) -> LamPtr {
    switch (t->kind) {
      case LamKind::Var:
        return t;
      case LamKind::Abs: {
        Path body = pos;
        body.push_back(0);
        walk(t->body, body,
             [&](LamPtr b) { return rebuild(Lam::abs(t->name, std::move(b))); });
        return t;
      }
      case LamKind::App: {
        if (t->fn->kind == LamKind::Abs) {
          int fresh = 0;
          LamPtr contractum = lam_subst(t->fn->body, t->fn->name, t->arg, fresh);
          occs.push_back({pos, t->fn->body, t->arg, t->fn->name, rebuild(contractum)});
        }
        Path fn = pos;
        fn.push_back(0);
        walk(t->fn, fn, [&](LamPtr f) { return rebuild(Lam::app(std::move(f), t->arg)); });
        Path arg = pos;
        arg.push_back(1);
        arg.push_back(0);
        walk(t->arg, arg, [&](LamPtr a) { return rebuild(Lam::app(t->fn, std::move(a))); });
        return t;
      }
    }
    return t;
  };
  walk(m, {}, [](LamPtr t) { return t; });
  for (auto& occ : occs) {
    NetPtr expect = translate(occ.reduct_whole, "a0");
    if (!alpha_eq(expect, dst)) continue;
    try {
      SimWalk w{src, regime};
      w.contract(occ.net_pos, occ.mb, occ.x, occ.na);
      if (alpha_eq(w.cur, dst)) return true;
    } catch (const std::exception&) {
      // fall through to the next occurrence or the caller's search
    }
  }
  return false;
}

}  // namespace detail

struct SimulationReport {
  bool verified = true;   // all strategy steps simulated
  bool truncated = false; // some fallback search hit the node budget
  int steps_checked = 0;
};

inline SimulationReport check_simulation(const LamPtr& m_in, Regime regime,
                                         int node_budget = 20000) {
  SimulationReport rep;
  LamPtr m = lam_barendregt(m_in);
  NetPtr src = translate(m, "a0");
  std::vector<LamPtr> steps = regime == Regime::Full  ? beta_step(m)
                              : regime == Regime::CBN ? beta_step_cbn(m)
                                                      : beta_step_cbv(m);
  for (auto& n : steps) {
    ++rep.steps_checked;
    NetPtr dst = translate(n, "a0");
    if (detail::sim_try_paths(m, regime, src, dst)) continue;
    if (!reachable(src, dst, regime, node_budget)) {
      rep.verified = false;
      rep.truncated = true;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Typing preservation: an LC intersection derivation of Gamma |- M : A maps
// to a checked IU derivation of [[M]]a : Gamma |- a:A, by the constructive
// induction (Ax via interR over the spine, arrI via arrR, arrE via
// cut + arrL, interI via interR, interE via the elimination rule).

inline DerivPtr lc_to_net_derivation(const LCDerivPtr& d, const NetPtr& net,
                                     const std::string& plug, System sys) {
  switch (d->rule) {
    case LCRule::Ax: {
      // net is a capsule <x.plug>; the statement type may be an intersection,
      // handled by interR over per-component axioms.
      Ctx gamma = d->gamma;
      TypePtr a = normalize(d->type);
      auto spine = inter_spine(a);
      if (spine.size() <= 1)
        return mk_ax(sys, net, gamma, Ctx{{plug, a}});
      std::vector<DerivPtr> parts;
      for (auto& comp : spine) {
        Ctx g = ctx_with(gamma, net->src, comp);
        parts.push_back(mk_ax(sys, net, g, Ctx{{plug, comp}}));
      }
      return mk_inter_r(plug, parts);
    }
    case LCRule::ArrI: {
      // net = x^ (body) b^ . plug
      DerivPtr body = lc_to_net_derivation(d->premises[0], net->body, net->bind_plug, sys);
      return mk_arr_r(net, body);
    }
    case LCRule::ArrE: {
      // net = (fn) g^ + x^ ((arg) b^ [x] y^ <y.plug>)
      const NetPtr& imp = net->right;
      DerivPtr fn = lc_to_net_derivation(d->premises[0], net->left, net->cut_plug, sys);
      DerivPtr arg = lc_to_net_derivation(d->premises[1], imp->left, imp->bind_plug_l, sys);
      TypePtr res = normalize(d->type);
      DerivPtr ax = mk_ax(sys, imp->right, Ctx{{imp->right->src, res}}, Ctx{{plug, res}});
      DerivPtr impd = mk_arr_l(imp, arg, ax);
      return mk_cut(net, fn, impd);
    }
    case LCRule::InterI: {
      if (d->premises.empty()) return mk_top_leaf(sys, net, d->gamma, Ctx{}, plug);
      std::vector<DerivPtr> parts;
      for (auto& p : d->premises) parts.push_back(lc_to_net_derivation(p, net, plug, sys));
      return mk_inter_r(plug, parts);
    }
    case LCRule::InterE: {
      DerivPtr p = lc_to_net_derivation(d->premises[0], net, plug, sys);
      // The premise's plug statement normalizes; find the component equal to
      // the conclusion type.
      auto spine = inter_spine(ctx_get(p->conclusion.delta, plug));
      for (int j = 1; j <= static_cast<int>(spine.size()); ++j) {
        if (type_equal(normalize(spine[j - 1]), d->type)) return mk_inter_e(p, plug, j);
      }
      throw BuildError("lc_to_net_derivation: interE component not found after normalization");
    }
  }
  throw BuildError("lc_to_net_derivation: bad rule");
}

inline DerivPtr check_typing_preservation(const LCDerivPtr& d, const std::string& plug,
                                          System sys = System::IU) {
  if (auto err = check_lc_inter(d)) throw BuildError("LC derivation does not check: " + *err);
  if (print_lam(d->term) != print_lam(lam_barendregt(d->term)))
    throw BuildError("check_typing_preservation: bound term variables must be pairwise distinct");
  NetPtr net = translate(d->term, plug);
  return lc_to_net_derivation(d, net, plug, sys);
}

// Curry typing converts to a simple-system derivation of the translation:
// one global inference pass records every node's type, then the syntax-
// directed LC derivation maps through the interpretation.
inline std::optional<std::pair<CurryResult, DerivPtr>> curry_to_simple(const LamPtr& m_in,
                                                                       const std::string& plug) {
  LamPtr m = lam_barendregt(m_in);
  detail::Unifier u;
  std::map<std::string, TypePtr> env;
  TypePtr out;
  if (!u.infer(m, env, out)) return std::nullopt;
  // Deterministic variable names, over every node's resolved type.
  std::map<std::string, std::string> ren;
  const char* names = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::function<void(const TypePtr&)> assign = [&](const TypePtr& ty) {
    if (ty->kind == TypeKind::Var && !ren.count(ty->name)) {
      size_t k = ren.size();
      ren[ty->name] = k < 26 ? std::string(1, names[k]) : "T" + std::to_string(k);
    }
    if (ty->kind == TypeKind::Arrow) {
      assign(ty->lhs);
      assign(ty->rhs);
    }
  };
  auto resolved = [&](const Lam* node) {
    TypePtr ty = u.resolve(u.node_type.at(node));
    assign(ty);
    return rename_type_vars(ty, ren);
  };
  std::function<LCDerivPtr(const LamPtr&, Ctx)> build = [&](const LamPtr& t,
                                                            Ctx g) -> LCDerivPtr {
    TypePtr ty = resolved(t.get());
    switch (t->kind) {
      case LamKind::Var:
        return LCDerivation::mk(LCRule::Ax, g, t, ty, {});
      case LamKind::Abs: {
        TypePtr nt = normalize(ty);
        Ctx inner = ctx_with(g, t->name, nt->lhs);
        return LCDerivation::mk(LCRule::ArrI, g, t, ty, {build(t->body, inner)});
      }
      case LamKind::App:
        return LCDerivation::mk(LCRule::ArrE, g, t, ty, {build(t->fn, g), build(t->arg, g)});
    }
    throw BuildError("curry_to_simple: bad term");
  };
  Ctx gamma;
  for (auto& fv : lam_free_vars(m)) {
    TypePtr ty = u.resolve(env[fv]);
    assign(ty);
    gamma[fv] = rename_type_vars(ty, ren);
  }
  LCDerivPtr lc = build(m, gamma);
  if (auto err = check_lc_inter(lc)) throw BuildError("curry_to_simple: " + *err);
  CurryResult result{gamma, lc->type};
  DerivPtr x = check_typing_preservation(lc, plug, System::Simple);
  return std::make_pair(result, x);
}

}  // namespace xcalc
