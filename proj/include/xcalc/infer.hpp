#pragma once

#include <map>
#include <optional>
#include <string>

#include "xcalc/builders.hpp"
#include "xcalc/derivation.hpp"
#include "xcalc/net.hpp"

namespace xcalc {

// Principal simple typing of a net by first-order unification over the
// connector names (names are unique under the Barendregt convention, so one
// variable per name suffices). Constraints:
//   <x.a>              T(x) = T(a)
//   y^ B b^ . a        T(a) = T(y) -> T(b)
//   L b^ [y] x^ R      T(y) = T(b) -> T(x)
//   L a^ + x^ R        T(a) = T(x)
// The derivation is rebuilt syntax-directed from the solution.

namespace detail {

struct SimpleUnifier {
  std::map<std::string, TypePtr> subst;
  int next = 0;

  TypePtr var_for(const std::string& name) { return Type::var("c_" + name); }

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

  bool constrain(const NetPtr& n) {
    switch (n->kind) {
      case NetKind::Capsule:
        return unify(var_for(n->src), var_for(n->dst));
      case NetKind::Export:
        return constrain(n->body) &&
               unify(var_for(n->out),
                     Type::arrow(var_for(n->bind_socket), var_for(n->bind_plug)));
      case NetKind::Import:
        return constrain(n->left) && constrain(n->right) &&
               unify(var_for(n->mid),
                     Type::arrow(var_for(n->bind_plug_l), var_for(n->bind_sock_r)));
      case NetKind::Cut:
        return constrain(n->left) && constrain(n->right) &&
               unify(var_for(n->cut_plug), var_for(n->cut_sock));
    }
    return false;
  }
};

}  // namespace detail

inline std::optional<DerivPtr> infer_simple(const NetPtr& net) {
  detail::SimpleUnifier u;
  if (!u.constrain(net)) return std::nullopt;
  // Ground residual variables deterministically.
  std::map<std::string, std::string> ren;
  std::function<void(const TypePtr&)> assign = [&](const TypePtr& t) {
    if (t->kind == TypeKind::Var && !ren.count(t->name))
      ren[t->name] = "p" + std::to_string(ren.size());
    if (t->kind == TypeKind::Arrow) {
      assign(t->lhs);
      assign(t->rhs);
    }
  };
  auto type_of = [&](const std::string& name) {
    TypePtr t = u.resolve(u.var_for(name));
    assign(t);
    return rename_type_vars(t, ren);
  };
  std::function<DerivPtr(const NetPtr&)> build = [&](const NetPtr& n) -> DerivPtr {
    switch (n->kind) {
      case NetKind::Capsule:
        return mk_ax(System::Simple, n, Ctx{{n->src, type_of(n->src)}},
                     Ctx{{n->dst, type_of(n->dst)}});
      case NetKind::Export: {
        DerivPtr body = build(n->body);
        if (!ctx_has(body->conclusion.gamma, n->bind_socket))
          body = weaken(body, n->bind_socket, type_of(n->bind_socket), true);
        if (!ctx_has(body->conclusion.delta, n->bind_plug))
          body = weaken(body, n->bind_plug, type_of(n->bind_plug), false);
        return mk_arr_r(n, body);
      }
      case NetKind::Import: {
        DerivPtr l = build(n->left);
        DerivPtr r = build(n->right);
        if (!ctx_has(l->conclusion.delta, n->bind_plug_l))
          l = weaken(l, n->bind_plug_l, type_of(n->bind_plug_l), false);
        if (!ctx_has(r->conclusion.gamma, n->bind_sock_r))
          r = weaken(r, n->bind_sock_r, type_of(n->bind_sock_r), true);
        return mk_arr_l(n, l, r);
      }
      case NetKind::Cut: {
        DerivPtr l = build(n->left);
        DerivPtr r = build(n->right);
        if (!ctx_has(l->conclusion.delta, n->cut_plug))
          l = weaken(l, n->cut_plug, type_of(n->cut_plug), false);
        if (!ctx_has(r->conclusion.gamma, n->cut_sock))
          r = weaken(r, n->cut_sock, type_of(n->cut_sock), true);
        return mk_cut(n, l, r);
      }
    }
    throw BuildError("infer_simple: bad net");
  };
  try {
    return build(net);
  } catch (const BuildError&) {
    return std::nullopt;
  }
}

}  // namespace xcalc
