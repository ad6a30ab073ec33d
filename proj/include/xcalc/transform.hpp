#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xcalc/builders.hpp"
#include "xcalc/derivation.hpp"
#include "xcalc/rewrite.hpp"

namespace xcalc {

// Witness reduction (preserve) and witness expansion (expand): constructive
// derivation transformers following the per-rule case analyses. Both keep the
// conclusion contexts of every judgement they traverse.

struct TransformError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void tfail(const std::string& msg) { throw TransformError(msg); }

inline void treq(bool cond, const std::string& msg) {
  if (!cond) tfail(msg);
}

inline DerivPtr retarget_if_needed(const DerivPtr& d, const NetPtr& target) {
  if (net_equal(d->conclusion.net, target)) return d;
  return retarget(d, target);
}

// When a socket carries BOT (or a plug carries TOP) the whole judgement is a
// one-leaf derivation; the universal escape hatch for erased branches.
inline DerivPtr try_absurd_leaf(System sys, const NetPtr& net, const Ctx& gamma,
                                const Ctx& delta) {
  for (auto& [s, t] : gamma) {
    if (normalize(t)->kind != TypeKind::Bot) continue;
    if (sys == System::CBN && !introduces_socket(net, s)) continue;
    return mk_bot_leaf(sys, net, gamma, delta, s);
  }
  for (auto& [p, t] : delta) {
    if (normalize(t)->kind != TypeKind::Top) continue;
    if (sys == System::CBV && !introduces_plug(net, p)) continue;
    return mk_top_leaf(sys, net, gamma, delta, p);
  }
  return nullptr;
}

// Retypes the socket statement of a derivation to a union of elements of its
// current spine, via unionE projections rejoined by unionL.
inline DerivPtr socket_retype(const DerivPtr& d, const std::string& x, const TypePtr& want) {
  TypePtr have = ctx_get(d->conclusion.gamma, x);
  treq(have != nullptr, "socket_retype: statement missing");
  TypePtr w = normalize(want);
  if (type_equal(have, w)) return d;
  auto have_spine = union_spine(have);
  std::vector<DerivPtr> branches;
  for (auto& p : union_spine(w)) {
    int idx = 0;
    for (int j = 1; j <= static_cast<int>(have_spine.size()); ++j)
      if (equiv(have_spine[j - 1], p)) {
        idx = j;
        break;
      }
    treq(idx > 0, "socket_retype: wanted part " + print_type(p) + " not in the current spine");
    branches.push_back(mk_union_e(d, x, idx));
  }
  treq(!branches.empty(), "socket_retype: empty union target");
  if (branches.size() == 1) return branches[0];
  return mk_union_l(x, branches);
}

// Dual: retypes a plug statement to an intersection of current spine parts.
inline DerivPtr plug_retype(const DerivPtr& d, const std::string& a, const TypePtr& want) {
  TypePtr have = ctx_get(d->conclusion.delta, a);
  treq(have != nullptr, "plug_retype: statement missing");
  TypePtr w = normalize(want);
  if (type_equal(have, w)) return d;
  auto have_spine = inter_spine(have);
  std::vector<DerivPtr> branches;
  for (auto& p : inter_spine(w)) {
    int idx = 0;
    for (int j = 1; j <= static_cast<int>(have_spine.size()); ++j)
      if (equiv(have_spine[j - 1], p)) {
        idx = j;
        break;
      }
    treq(idx > 0, "plug_retype: wanted part " + print_type(p) + " not in the current spine");
    branches.push_back(mk_inter_e(d, a, idx));
  }
  treq(!branches.empty(), "plug_retype: empty intersection target");
  if (branches.size() == 1) return branches[0];
  return mk_inter_r(a, branches);
}

inline DerivPtr weaken_in_plug(const DerivPtr& d, const std::string& a, const TypePtr& t) {
  if (ctx_has(d->conclusion.delta, a)) return d;
  return weaken(d, a, t, false);
}

inline DerivPtr weaken_in_socket(const DerivPtr& d, const std::string& x, const TypePtr& t) {
  if (ctx_has(d->conclusion.gamma, x)) return d;
  return weaken(d, x, t, true);
}

// Renames a free plug column (fusing if the target is already present) and
// retargets onto a net; duplicated subnets carry refreshed binder names, so
// their premise columns move along.
inline DerivPtr move_plug(const DerivPtr& d, const std::string& from, const std::string& to,
                          const NetPtr& target) {
  DerivPtr out = from == to ? d : fuse_plug_walk(d, from, to);
  return retarget_if_needed(out, target);
}

inline DerivPtr move_socket(const DerivPtr& d, const std::string& from, const std::string& to,
                            const NetPtr& target) {
  DerivPtr out = from == to ? d : fuse_socket_walk(d, from, to);
  return retarget_if_needed(out, target);
}

// Generic traversal: maps a transformation over a derivation, descending
// through context-introduction wrappers and the syntax-directed node at each
// net-path component until the redex node, where `fn` takes over. Every
// wrapper and enclosing rule is rebuilt from the transformed premises; the
// theorems guarantee the contexts line up.
inline DerivPtr map_to_target(const DerivPtr& d, const NetPtr& target, const Path& pos, size_t idx,
                              const std::function<DerivPtr(const DerivPtr&, const NetPtr&)>& fn) {
  switch (d->rule) {
    case RuleName::InterR:
    case RuleName::UnionL: {
      std::vector<DerivPtr> prems;
      for (auto& p : d->premises) prems.push_back(map_to_target(p, target, pos, idx, fn));
      if (prems.empty()) {
        // TOP/BOT leaf: transplant onto the target net.
        Judgement j = d->conclusion;
        j.net = target;
        if (d->system == System::CBV && d->rule == RuleName::InterR)
          treq(introduces_plug(target, d->data.subject), "map: CBV top-leaf subject not introduced");
        if (d->system == System::CBN && d->rule == RuleName::UnionL)
          treq(introduces_socket(target, d->data.subject), "map: CBN bot-leaf subject not introduced");
        return mk_node(d->system, d->rule, std::move(j), {}, d->data);
      }
      return d->rule == RuleName::InterR ? mk_inter_r(d->data.subject, prems)
                                         : mk_union_l(d->data.subject, prems);
    }
    case RuleName::InterE: {
      DerivPtr p = map_to_target(d->premises[0], target, pos, idx, fn);
      return mk_inter_e(p, d->data.subject, d->data.index);
    }
    case RuleName::UnionE: {
      DerivPtr p = map_to_target(d->premises[0], target, pos, idx, fn);
      return mk_union_e(p, d->data.subject, d->data.index);
    }
    default:
      break;
  }
  if (idx == pos.size()) return fn(d, target);
  int c = pos[idx];
  switch (d->rule) {
    case RuleName::ArrR: {
      treq(c == 0, "map: bad path under an export");
      DerivPtr body = map_to_target(d->premises[0], target->body, pos, idx + 1, fn);
      return mk_arr_r(target, body);
    }
    case RuleName::ArrL: {
      DerivPtr l = c == 0 ? map_to_target(d->premises[0], target->left, pos, idx + 1, fn)
                          : retarget_if_needed(d->premises[0], target->left);
      DerivPtr r = c == 1 ? map_to_target(d->premises[1], target->right, pos, idx + 1, fn)
                          : retarget_if_needed(d->premises[1], target->right);
      return mk_arr_l(target, l, r);
    }
    case RuleName::Cut:
    case RuleName::CutL:
    case RuleName::CutR: {
      DerivPtr l = c == 0 ? map_to_target(d->premises[0], target->left, pos, idx + 1, fn)
                          : retarget_if_needed(d->premises[0], target->left);
      DerivPtr r = c == 1 ? map_to_target(d->premises[1], target->right, pos, idx + 1, fn)
                          : retarget_if_needed(d->premises[1], target->right);
      return mk_cut(target, l, r);
    }
    default:
      tfail("map: path descends through a leaf");
  }
}

// Pads/weakens a derivation to exactly the given contexts; the simple system
// only ever needs new columns.
inline DerivPtr conform(const DerivPtr& d, const Ctx& gamma, const Ctx& delta) {
  return pad_to(d, gamma, delta);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Witness reduction.

namespace detail {

struct CutParts {
  NetPtr net;          // the redex cut
  DerivPtr l, r;       // premises
  TypePtr cut_type;    // shared type
  std::string a, x;    // bound plug / socket
};

inline CutParts cut_parts(const DerivPtr& d) {
  treq(d->rule == RuleName::Cut || d->rule == RuleName::CutL || d->rule == RuleName::CutR,
       "preserve: redex node is not concluded by a cut rule");
  CutParts p;
  p.net = d->conclusion.net;
  p.l = d->premises[0];
  p.r = d->premises[1];
  p.a = p.net->cut_plug;
  p.x = p.net->cut_sock;
  p.cut_type = ctx_get(p.l->conclusion.delta, p.a);
  return p;
}

// Left premise at the cut plug projected to one component (used when a
// restricted rule needs a non-intersection cut type). An interR branch that
// carries the component directly is preferred; otherwise an interE node
// projects the statement.
inline DerivPtr project_left(const DerivPtr& l, const std::string& a, const TypePtr& want) {
  if (l->rule == RuleName::InterR && l->data.subject == a) {
    for (auto& br : l->premises) {
      TypePtr t = ctx_get(br->conclusion.delta, a);
      if (t && equiv(t, want)) return br;
    }
  }
  TypePtr have = ctx_get(l->conclusion.delta, a);
  treq(have != nullptr, "project_left: statement missing");
  auto spine = inter_spine(have);
  for (int j = 1; j <= static_cast<int>(spine.size()); ++j)
    if (equiv(spine[j - 1], want)) return mk_inter_e(l, a, j);
  tfail("project_left: component " + print_type(want) + " not in the spine");
}

inline DerivPtr project_right(const DerivPtr& r, const std::string& x, const TypePtr& want) {
  if (r->rule == RuleName::UnionL && r->data.subject == x) {
    for (auto& br : r->premises) {
      TypePtr t = ctx_get(br->conclusion.gamma, x);
      if (t && equiv(t, want)) return br;
    }
  }
  TypePtr have = ctx_get(r->conclusion.gamma, x);
  treq(have != nullptr, "project_right: statement missing");
  auto spine = union_spine(have);
  for (int j = 1; j <= static_cast<int>(spine.size()); ++j)
    if (equiv(spine[j - 1], want)) return mk_union_e(r, x, j);
  tfail("project_right: component " + print_type(want) + " not in the spine");
}

inline DerivPtr preserve_pure(const DerivPtr& d, RuleId rule, const NetPtr& target);

// Entry for one redex node.
inline DerivPtr preserve_node(const DerivPtr& d, RuleId rule, const NetPtr& target) {
  const Ctx& gamma = d->conclusion.gamma;
  const Ctx& delta = d->conclusion.delta;
  if (DerivPtr leaf = try_absurd_leaf(d->system, target, gamma, delta)) return leaf;
  DerivPtr out = preserve_pure(d, rule, target);
  return conform(out, gamma, delta);
}

inline DerivPtr preserve_pure(const DerivPtr& d, RuleId rule, const NetPtr& target) {
  System sys = d->system;
  CutParts cp = cut_parts(d);
  const NetPtr& P = cp.net->left;
  const NetPtr& Q = cp.net->right;

  auto as_arr_r = [&](const DerivPtr& n) {
    treq(n->rule == RuleName::ArrR, "preserve: expected an arrR premise, found " +
                                        std::string(rule_text(n->rule)));
    return n;
  };
  auto as_arr_l = [&](const DerivPtr& n) {
    treq(n->rule == RuleName::ArrL, "preserve: expected an arrL premise, found " +
                                        std::string(rule_text(n->rule)));
    return n;
  };

  // Reduces the left premise to a syntax node, selecting the interR branch
  // that carries a given type when necessary.
  auto left_syntax_at = [&](const TypePtr& want) -> DerivPtr {
    if (cp.l->rule != RuleName::InterR) return cp.l;
    treq(cp.l->data.subject == cp.a, "preserve: left premise introduces a foreign plug");
    for (auto& br : cp.l->premises) {
      TypePtr t = ctx_get(br->conclusion.delta, cp.a);
      if (t && equiv(t, want)) return br;
    }
    tfail("preserve: no interR branch carries " + print_type(want));
  };
  // Dual for the right premise and unionL.
  auto right_syntax_at = [&](const TypePtr& want) -> DerivPtr {
    if (cp.r->rule != RuleName::UnionL) return cp.r;
    treq(cp.r->data.subject == cp.x, "preserve: right premise introduces a foreign socket");
    for (auto& br : cp.r->premises) {
      TypePtr t = ctx_get(br->conclusion.gamma, cp.x);
      if (t && equiv(t, want)) return br;
    }
    tfail("preserve: no unionL branch carries " + print_type(want));
  };

  switch (rule) {
    case RuleId::Ax:
    case RuleId::ExpR:
    case RuleId::ImpL: {
      // Renaming cuts: the reduct is P[b/a] (resp. Q[y/x]).
      DerivPtr renamed = rename_cut_derivation(d);
      return retarget_if_needed(renamed, target);
    }
    case RuleId::ExpImpLeftAssoc:
    case RuleId::ExpImpRightAssoc: {
      // l concludes an export of A=>B, r an import consuming it.
      DerivPtr rr = cp.r;
      if (rr->rule == RuleName::UnionL) rr = right_syntax_at(cp.cut_type);
      DerivPtr rimp = as_arr_l(rr);
      TypePtr a_t = ctx_get(rimp->premises[0]->conclusion.delta, Q->bind_plug_l);
      TypePtr b_t = ctx_get(rimp->premises[1]->conclusion.gamma, Q->bind_sock_r);
      TypePtr arrow = normalize(Type::arrow(a_t, b_t));
      DerivPtr ll = cp.l->rule == RuleName::InterR ? left_syntax_at(arrow) : cp.l;
      DerivPtr lexp = as_arr_r(ll);
      DerivPtr dP = lexp->premises[0];   // P-body at y:A |- b:B
      DerivPtr dQl = rimp->premises[0];  // import left at g:A
      DerivPtr dQr = rimp->premises[1];  // import right at z:B
      if (rule == RuleId::ExpImpLeftAssoc) {
        // (Ql g + y Pb) b + z Qr
        const NetPtr& inner = target->left;
        DerivPtr il = retarget_if_needed(dQl, inner->left);
        DerivPtr ir = retarget_if_needed(dP, inner->right);
        DerivPtr innerd = mk_cut(inner, il, ir);
        DerivPtr outr = retarget_if_needed(dQr, target->right);
        return mk_cut(target, innerd, outr);
      }
      // Ql g + y (Pb b + z Qr)
      const NetPtr& inner = target->right;
      DerivPtr il = retarget_if_needed(dP, inner->left);
      DerivPtr ir = retarget_if_needed(dQr, inner->right);
      DerivPtr innerd = mk_cut(inner, il, ir);
      DerivPtr outl = retarget_if_needed(dQl, target->left);
      return mk_cut(target, outl, innerd);
    }
    case RuleId::DL_d:
    case RuleId::DR_d: {
      // Deactivation: the unrestricted cut rule absorbs it.
      DerivPtr l = retarget_if_needed(cp.l, target->left);
      DerivPtr r = retarget_if_needed(cp.r, target->right);
      return mk_cut(target, l, r);
    }
    case RuleId::ActR: {
      if (sys != System::CBV || !is_union_kind(cp.cut_type)) {
        DerivPtr l = retarget_if_needed(cp.l, target->left);
        DerivPtr r = retarget_if_needed(cp.r, target->right);
        return mk_cut(target, l, r);
      }
      // CBV: rule cutR needs a non-union type; the plug is introduced
      // (activation side condition), so one spine component carries it.
      auto spine = union_spine(normalize(cp.cut_type));
      treq(!spine.empty(), "preserve ActR: BOT-typed cut with an introduced plug");
      treq(is_capsule(P), "preserve ActR: plug introduced by an unexpected shape");
      std::function<DerivPtr(const DerivPtr&)> build = [&](const DerivPtr& ll) -> DerivPtr {
        if ((ll->rule == RuleName::InterR || ll->rule == RuleName::UnionL) &&
            !ll->premises.empty()) {
          std::vector<DerivPtr> branches;
          for (auto& br : ll->premises) branches.push_back(build(br));
          return ll->rule == RuleName::InterR ? mk_inter_r(ll->data.subject, branches)
                                              : mk_union_l(ll->data.subject, branches);
        }
        TypePtr G = ctx_get(ll->conclusion.gamma, P->src);
        treq(G != nullptr, "preserve ActR: capsule statement missing");
        TypePtr m = ax_mediator(G, ctx_get(ll->conclusion.delta, cp.a));
        treq(m != nullptr, "preserve ActR: no mediator at the capsule");
        for (auto& comp : spine) {
          if (!leq(m, comp)) continue;
          Ctx ld = ctx_with(ll->conclusion.delta, cp.a, comp);
          DerivPtr lj = mk_ax(sys, P, ll->conclusion.gamma, ld);
          DerivPtr rj = project_right(cp.r, cp.x, comp);
          DerivPtr l2 = retarget_if_needed(lj, target->left);
          DerivPtr r2 = retarget_if_needed(rj, target->right);
          return mk_cut(target, l2, r2);
        }
        tfail("preserve ActR: no spine component above the mediator");
      };
      return build(cp.l);
    }
    case RuleId::ActL: {
      if (sys != System::CBN) {
        DerivPtr l = retarget_if_needed(cp.l, target->left);
        DerivPtr r = retarget_if_needed(cp.r, target->right);
        return mk_cut(target, l, r);
      }
      // CBN: the left-activated cut needs rule cutL with a non-intersection
      // type. The socket is introduced (activation side condition), so a
      // single spine component suffices; which one, the right premise knows.
      if (!is_intersection_kind(cp.cut_type)) {
        DerivPtr l = retarget_if_needed(cp.l, target->left);
        DerivPtr r = retarget_if_needed(cp.r, target->right);
        return mk_cut(target, l, r);
      }
      auto spine = inter_spine(normalize(cp.cut_type));
      treq(!spine.empty(), "preserve ActL: TOP-typed cut with an introduced socket");
      if (is_capsule(Q)) {
        // <x.b>: per capsule judgement, a mediator m has cut_type <= m <= D
        // and some spine component sits below m; that component mediates and
        // rule cutL fires at it. A wrapped right premise transforms branch by
        // branch, the wrapper re-applies on top.
        std::function<DerivPtr(const DerivPtr&)> build = [&](const DerivPtr& rr) -> DerivPtr {
          if ((rr->rule == RuleName::InterR || rr->rule == RuleName::UnionL) &&
              !rr->premises.empty()) {
            std::vector<DerivPtr> branches;
            for (auto& br : rr->premises) branches.push_back(build(br));
            return rr->rule == RuleName::InterR ? mk_inter_r(rr->data.subject, branches)
                                                : mk_union_l(rr->data.subject, branches);
          }
          TypePtr D = ctx_get(rr->conclusion.delta, Q->dst);
          treq(D != nullptr, "preserve ActL: capsule statement missing");
          TypePtr m = ax_mediator(ctx_get(rr->conclusion.gamma, cp.x), D);
          treq(m != nullptr, "preserve ActL: no mediator at the capsule");
          for (auto& comp : spine) {
            if (!leq(comp, m)) continue;
            DerivPtr lj = project_left(cp.l, cp.a, comp);
            Ctx rg = ctx_with(rr->conclusion.gamma, cp.x, comp);
            DerivPtr rj = mk_ax(sys, Q, rg, rr->conclusion.delta);
            DerivPtr l2 = retarget_if_needed(lj, target->left);
            DerivPtr r2 = retarget_if_needed(rj, target->right);
            return mk_cut(target, l2, r2);
          }
          tfail("preserve ActL: no spine component below the mediator");
        };
        return build(cp.r);
      }
      if (is_import(Q)) {
        // mid = x: the arrL node consumed one arrow of the spine; retype the
        // premises without the spurious rest.
        DerivPtr rimp = as_arr_l(cp.r);
        TypePtr a_t = ctx_get(rimp->premises[0]->conclusion.delta, Q->bind_plug_l);
        TypePtr b_t = ctx_get(rimp->premises[1]->conclusion.gamma, Q->bind_sock_r);
        TypePtr arrow = normalize(Type::arrow(a_t, b_t));
        DerivPtr lj = project_left(cp.l, cp.a, arrow);
        DerivPtr p0 = rimp->premises[0];
        DerivPtr p1 = rimp->premises[1];
        if (ctx_has(p0->conclusion.gamma, cp.x)) p0 = thin(p0, cp.x);
        if (ctx_has(p1->conclusion.gamma, cp.x)) p1 = thin(p1, cp.x);
        DerivPtr rj = mk_arr_l(Q, p0, p1);
        DerivPtr l2 = retarget_if_needed(lj, target->left);
        DerivPtr r2 = retarget_if_needed(rj, target->right);
        return mk_cut(target, l2, r2);
      }
      tfail("preserve ActL: socket introduced by an unexpected shape");
    }
    case RuleId::DL_cap: {
      // <y.b> a <+ x Q erases Q; the capsule retypes at the merged contexts.
      treq(is_capsule(target), "preserve DL_cap: target is not a capsule");
      Ctx g = ctx_merge_inter(cp.l->conclusion.gamma,
                              ctx_without(cp.r->conclusion.gamma, cp.x));
      Ctx dl = ctx_merge_union(ctx_without(cp.l->conclusion.delta, cp.a),
                               cp.r->conclusion.delta);
      return mk_ax(sys, target, g, dl);
    }
    case RuleId::DR_cap: {
      treq(is_capsule(target), "preserve DR_cap: target is not a capsule");
      Ctx g = ctx_merge_inter(cp.l->conclusion.gamma,
                              ctx_without(cp.r->conclusion.gamma, cp.x));
      Ctx dl = ctx_merge_union(ctx_without(cp.l->conclusion.delta, cp.a),
                               cp.r->conclusion.delta);
      return mk_ax(sys, target, g, dl);
    }
    case RuleId::DL_expIns: {
      // (y^ B b^ . g) a <+ x Q  ->  y^ (B a <+ x Q) b^ . g
      DerivPtr lexp = as_arr_r(cp.l);
      DerivPtr dB = lexp->premises[0];
      dB = weaken_in_plug(dB, cp.a, cp.cut_type);
      const NetPtr& inner = target->body;
      DerivPtr il = retarget_if_needed(dB, inner->left);
      DerivPtr ir = retarget_if_needed(cp.r, inner->right);
      DerivPtr innerd = mk_cut(inner, il, ir);
      return mk_arr_r(target, innerd);
    }
    case RuleId::DL_expOuts: {
      // (y^ B b^ . a) a <+ x Q -> (y^ (B a <+ x Q') b^ . g) g + x Q''
      DerivPtr lexp = as_arr_r(cp.l);
      DerivPtr dB = lexp->premises[0];
      TypePtr arrow = normalize(Type::arrow(ctx_get(dB->conclusion.gamma, P->bind_socket),
                                            ctx_get(dB->conclusion.delta, P->bind_plug)));
      TypePtr inner_type = ctx_get(dB->conclusion.delta, cp.a);
      if (!inner_type) {
        inner_type = cp.cut_type;
        dB = weaken_in_plug(dB, cp.a, inner_type);
      }
      const NetPtr& mid_exp = target->left;
      const NetPtr& inner = mid_exp->body;
      DerivPtr rin = socket_retype(cp.r, cp.x, inner_type);
      DerivPtr innerd = mk_cut(inner, move_plug(dB, cp.a, inner->cut_plug, inner->left),
                               move_socket(rin, cp.x, inner->cut_sock, inner->right));
      DerivPtr expd = mk_arr_r(mid_exp, innerd);
      DerivPtr rout = socket_retype(cp.r, cp.x, arrow);
      return mk_cut(target, expd,
                    move_socket(rout, cp.x, target->cut_sock, target->right));
    }
    case RuleId::DL_imp:
    case RuleId::DL_cut: {
      // (L1 p [z] w L2) a <+ x Q -> (L1 a <+ x Q') p [z] w (L2 a <+ x Q'')
      // (L1 p  +  w L2) a <+ x Q -> (L1 a <+ x Q') p  +  w (L2 a <+ x Q'')
      bool is_imp = rule == RuleId::DL_imp;
      DerivPtr node = is_imp ? as_arr_l(cp.l) : cp.l;
      if (!is_imp)
        treq(node->rule == RuleName::Cut, "preserve DL_cut: inner premise is not a cut");
      DerivPtr d1 = node->premises[0];
      DerivPtr d2 = node->premises[1];
      TypePtr c1 = ctx_get(d1->conclusion.delta, cp.a);
      TypePtr c2 = ctx_get(d2->conclusion.delta, cp.a);
      if (!c1) {
        d1 = weaken_in_plug(d1, cp.a, c2 ? c2 : cp.cut_type);
        c1 = ctx_get(d1->conclusion.delta, cp.a);
      }
      if (!c2) {
        d2 = weaken_in_plug(d2, cp.a, c1);
        c2 = ctx_get(d2->conclusion.delta, cp.a);
      }
      const NetPtr& in1 = target->left;
      const NetPtr& in2 = target->right;
      DerivPtr r1 = socket_retype(cp.r, cp.x, c1);
      DerivPtr r2 = socket_retype(cp.r, cp.x, c2);
      DerivPtr c1d = mk_cut(in1, move_plug(d1, cp.a, in1->cut_plug, in1->left),
                            move_socket(r1, cp.x, in1->cut_sock, in1->right));
      DerivPtr c2d = mk_cut(in2, move_plug(d2, cp.a, in2->cut_plug, in2->left),
                            move_socket(r2, cp.x, in2->cut_sock, in2->right));
      return is_imp ? mk_arr_l(target, c1d, c2d) : mk_cut(target, c1d, c2d);
    }
    case RuleId::DR_exp: {
      // L a +> x (y^ B b^ . g) -> y^ (L a +> x B) b^ . g
      DerivPtr rexp = as_arr_r(cp.r);
      DerivPtr dB = rexp->premises[0];
      dB = weaken_in_socket(dB, cp.x, cp.cut_type);
      const NetPtr& inner = target->body;
      DerivPtr innerd = mk_cut(inner, move_plug(cp.l, cp.a, inner->cut_plug, inner->left),
                               move_socket(dB, cp.x, inner->cut_sock, inner->right));
      return mk_arr_r(target, innerd);
    }
    case RuleId::DR_impIns:
    case RuleId::DR_impOuts:
    case RuleId::DR_cut: {
      bool is_outs = rule == RuleId::DR_impOuts;
      DerivPtr node;
      if (rule == RuleId::DR_cut) {
        treq(cp.r->rule == RuleName::Cut, "preserve DR_cut: inner premise is not a cut");
        node = cp.r;
      } else {
        node = as_arr_l(cp.r);
      }
      DerivPtr d1 = node->premises[0];
      DerivPtr d2 = node->premises[1];
      TypePtr c1 = ctx_get(d1->conclusion.gamma, cp.x);
      TypePtr c2 = ctx_get(d2->conclusion.gamma, cp.x);
      if (!c1) {
        d1 = weaken_in_socket(d1, cp.x, c2 ? c2 : cp.cut_type);
        c1 = ctx_get(d1->conclusion.gamma, cp.x);
      }
      if (!c2) {
        d2 = weaken_in_socket(d2, cp.x, c1);
        c2 = ctx_get(d2->conclusion.gamma, cp.x);
      }
      // The two inner cuts; for imp-outs they hang under the fresh import.
      const NetPtr& in1 = is_outs ? target->right->left : target->left;
      const NetPtr& in2 = is_outs ? target->right->right : target->right;
      DerivPtr l1 = plug_retype(cp.l, cp.a, c1);
      DerivPtr l2 = plug_retype(cp.l, cp.a, c2);
      DerivPtr c1d = mk_cut(in1, move_plug(l1, cp.a, in1->cut_plug, in1->left),
                            move_socket(d1, cp.x, in1->cut_sock, in1->right));
      DerivPtr c2d = mk_cut(in2, move_plug(l2, cp.a, in2->cut_plug, in2->left),
                            move_socket(d2, cp.x, in2->cut_sock, in2->right));
      if (rule == RuleId::DR_impIns) return mk_arr_l(target, c1d, c2d);
      if (rule == RuleId::DR_cut) return mk_cut(target, c1d, c2d);
      // outs: one more copy of L feeds the fresh outer cut at the arrow type.
      TypePtr a1 = ctx_get(d1->conclusion.delta, Q->bind_plug_l);
      TypePtr b1 = ctx_get(d2->conclusion.gamma, Q->bind_sock_r);
      TypePtr arrow = normalize(Type::arrow(a1, b1));
      DerivPtr impd = mk_arr_l(target->right, c1d, c2d);
      DerivPtr louter = plug_retype(cp.l, cp.a, arrow);
      return mk_cut(target, move_plug(louter, cp.a, target->cut_plug, target->left), impd);
    }
    default:
      tfail(std::string("preserve: rule not supported: ") + rule_name(rule));
  }
}

}  // namespace detail

// Witness reduction: from a checked derivation of the redex net, a checked
// derivation of the one-step reduct, same system, same contexts.
inline DerivPtr preserve(const DerivPtr& d, const Redex& r) {
  NameGen gen;
  NetPtr result = step(d->conclusion.net, r, gen);
  RuleId rule = r.rule;
  DerivPtr out = detail::map_to_target(
      d, result, r.position, 0, [rule](const DerivPtr& node, const NetPtr& target) {
        return detail::preserve_node(node, rule, target);
      });
  out = detail::conform(out, d->conclusion.gamma, d->conclusion.delta);
  check_or_throw(out);
  return out;
}

// ---------------------------------------------------------------------------
// Witness expansion (the IU system).

namespace detail {

inline std::vector<DerivPtr> inter_branches(const DerivPtr& d, const std::string& subject) {
  if (d->rule == RuleName::InterR && d->data.subject == subject && !d->premises.empty())
    return d->premises;
  return {d};
}

inline std::vector<DerivPtr> union_branches(const DerivPtr& d, const std::string& subject) {
  if (d->rule == RuleName::UnionL && d->data.subject == subject && !d->premises.empty())
    return d->premises;
  return {d};
}

// Padding and projection wrappers accumulate on premises along chained
// transformations; descend to the syntax node beneath them. Dropped wrapper
// context is recovered by the caller's final conform.
inline DerivPtr descend_wrappers(const DerivPtr& d) {
  DerivPtr cur = d;
  for (;;) {
    if (cur->rule == RuleName::InterE || cur->rule == RuleName::UnionE) {
      cur = cur->premises[0];
      continue;
    }
    if ((cur->rule == RuleName::InterR || cur->rule == RuleName::UnionL) &&
        !cur->premises.empty()) {
      DerivPtr next = nullptr;
      for (auto& p : cur->premises) {
        bool leaf = (p->rule == RuleName::InterR || p->rule == RuleName::UnionL) &&
                    p->premises.empty();
        if (!leaf) {
          next = p;
          break;
        }
      }
      if (!next) return cur;
      cur = next;
      continue;
    }
    return cur;
  }
}

inline DerivPtr as_cut_node(const DerivPtr& d_in, const char* who) {
  DerivPtr d = descend_wrappers(d_in);
  treq(d->rule == RuleName::Cut || d->rule == RuleName::CutL || d->rule == RuleName::CutR,
       std::string(who) + ": expected a cut node, found " + rule_text(d->rule));
  return d;
}

// Best-effort removal of statements about connectors that are neither free
// in the derivation's net nor explicitly kept. Chained transformations leave
// spurious columns behind (leaf pads mention sibling contexts); dragging
// them under fresh binders would poison the rebuilt tree.
inline DerivPtr thin_except(const DerivPtr& d, const std::set<std::string>& keep) {
  auto fs = free_sockets(d->conclusion.net);
  auto fp = free_plugs(d->conclusion.net);
  DerivPtr cur = d;
  std::vector<std::string> junk;
  for (auto& [k, _] : d->conclusion.gamma)
    if (!fs.count(k) && !keep.count(k)) junk.push_back(k);
  for (auto& [k, _] : d->conclusion.delta)
    if (!fp.count(k) && !keep.count(k)) junk.push_back(k);
  for (auto& k : junk) {
    try {
      cur = thin(cur, k);
    } catch (const BuildError&) {
      // load-bearing somewhere; leave it and let the caller's checks decide
    }
  }
  return cur;
}

inline DerivPtr expand_pure(const DerivPtr& d, RuleId rule, const NetPtr& target);

inline DerivPtr expand_node(const DerivPtr& d, RuleId rule, const NetPtr& target) {
  const Ctx& gamma = d->conclusion.gamma;
  const Ctx& delta = d->conclusion.delta;
  if (DerivPtr leaf = try_absurd_leaf(d->system, target, gamma, delta)) return leaf;
  DerivPtr out = expand_pure(d, rule, target);
  std::set<std::string> keep;
  for (auto& [k, _] : gamma) keep.insert(k);
  for (auto& [k, _] : delta) keep.insert(k);
  out = thin_except(out, keep);
  return conform(out, gamma, delta);
}

inline DerivPtr expand_pure(const DerivPtr& d, RuleId rule, const NetPtr& target) {
  System sys = d->system;
  const Ctx& gamma = d->conclusion.gamma;
  const Ctx& delta = d->conclusion.delta;

  auto as_arr_r = [&](const DerivPtr& n_in) {
    DerivPtr n = descend_wrappers(n_in);
    treq(n->rule == RuleName::ArrR, "expand: expected an arrR node, found " +
                                        std::string(rule_text(n->rule)));
    return n;
  };
  auto as_arr_l = [&](const DerivPtr& n_in) {
    DerivPtr n = descend_wrappers(n_in);
    treq(n->rule == RuleName::ArrL, "expand: expected an arrL node, found " +
                                        std::string(rule_text(n->rule)));
    return n;
  };

  switch (rule) {
    case RuleId::Ax: {
      // <y.a> a + x <x.b>  <=  <y.b>
      treq(d->rule == RuleName::Ax, "expand Ax: reduct node is not an axiom");
      const NetPtr& capL = target->left;
      const NetPtr& capR = target->right;
      TypePtr G = ctx_get(gamma, capL->src);
      TypePtr D = ctx_get(delta, capR->dst);
      TypePtr m = ax_mediator(G, D);
      treq(m != nullptr, "expand Ax: no mediator");
      DerivPtr l = mk_ax(sys, capL, gamma, ctx_with(delta, target->cut_plug, m));
      DerivPtr r = mk_ax(sys, capR, ctx_with(gamma, target->cut_sock, m), delta);
      return mk_cut(target, l, r);
    }
    case RuleId::ExpR: {
      // (y^ B b^ . a) a + x <x.g>  <=  y^ B b^ . g
      DerivPtr node = as_arr_r(d);
      const NetPtr& expP = target->left;
      DerivPtr dB = retarget_if_needed(node->premises[0], expP->body);
      dB = thin_except(dB, {expP->bind_socket, expP->bind_plug});
      DerivPtr l = mk_arr_r(expP, dB);
      TypePtr arrow = ctx_get(l->conclusion.delta, target->cut_plug);
      DerivPtr r = mk_ax(sys, target->right, ctx_with(gamma, target->cut_sock, arrow), delta);
      return mk_cut(target, l, r);
    }
    case RuleId::ImpL: {
      // <y.a> a + x (Ql b [x] z Qr)  <=  Ql b [y] z Qr
      DerivPtr node = as_arr_l(d);
      const NetPtr& impP = target->right;
      DerivPtr d1 = thin_except(retarget_if_needed(node->premises[0], impP->left),
                                {impP->bind_plug_l});
      DerivPtr d2 = thin_except(retarget_if_needed(node->premises[1], impP->right),
                                {impP->bind_sock_r});
      DerivPtr r = mk_arr_l(impP, d1, d2);
      TypePtr arrow = ctx_get(r->conclusion.gamma, target->cut_sock);
      DerivPtr l = mk_ax(sys, target->left, gamma, ctx_with(delta, target->cut_plug, arrow));
      return mk_cut(target, l, r);
    }
    case RuleId::ExpImpLeftAssoc:
    case RuleId::ExpImpRightAssoc: {
      // (y^ Pb b^ . a) a + x (Ql g [x] z Qr)
      //   <=  (Ql g + y Pb) b + z Qr        (left associated)
      //   <=  Ql g + y (Pb b + z Qr)        (right associated)
      DerivPtr outer = as_cut_node(d, "expand exp-imp");
      DerivPtr dQl, dPb, dQr;
      if (rule == RuleId::ExpImpLeftAssoc) {
        DerivPtr inner = as_cut_node(outer->premises[0], "expand exp-imp inner");
        dQl = inner->premises[0];
        dPb = inner->premises[1];
        dQr = outer->premises[1];
      } else {
        dQl = outer->premises[0];
        DerivPtr inner = as_cut_node(outer->premises[1], "expand exp-imp inner");
        dPb = inner->premises[0];
        dQr = inner->premises[1];
      }
      const NetPtr& expP = target->left;
      const NetPtr& impP = target->right;
      DerivPtr dPb2 = thin_except(retarget_if_needed(dPb, expP->body),
                                  {expP->bind_socket, expP->bind_plug});
      DerivPtr l = mk_arr_r(expP, dPb2);
      DerivPtr d1 = thin_except(retarget_if_needed(dQl, impP->left), {impP->bind_plug_l});
      DerivPtr d2 = thin_except(retarget_if_needed(dQr, impP->right), {impP->bind_sock_r});
      DerivPtr r = mk_arr_l(impP, d1, d2);
      return mk_cut(target, l, r);
    }
    case RuleId::ActL:
    case RuleId::ActR:
    case RuleId::DL_d:
    case RuleId::DR_d: {
      // Activation flips; the IU cut rule covers them all.
      DerivPtr node = as_cut_node(d, "expand act");
      DerivPtr l = thin_except(retarget_if_needed(node->premises[0], target->left),
                               {target->cut_plug});
      DerivPtr r = thin_except(retarget_if_needed(node->premises[1], target->right),
                               {target->cut_sock});
      return mk_cut(target, l, r);
    }
    case RuleId::DL_cap: {
      // <y.b> a <+ x R  <=  <y.b>   (uses x:BOT)
      treq(d->rule == RuleName::Ax, "expand cap-L: reduct node is not an axiom");
      DerivPtr l = mk_ax(sys, target->left, gamma, ctx_with(delta, target->cut_plug, Type::bot()));
      DerivPtr r = mk_bot_leaf(sys, target->right, gamma, delta, target->cut_sock);
      return mk_cut(target, l, r);
    }
    case RuleId::DR_cap: {
      // L a +> x <y.b>  <=  <y.b>   (uses a:TOP)
      treq(d->rule == RuleName::Ax, "expand cap-R: reduct node is not an axiom");
      DerivPtr l = mk_top_leaf(sys, target->left, gamma, delta, target->cut_plug);
      DerivPtr r = mk_ax(sys, target->right, ctx_with(gamma, target->cut_sock, Type::top()), delta);
      return mk_cut(target, l, r);
    }
    case RuleId::DL_expIns: {
      // (y^ B b^ . g) a <+ x R  <=  y^ (B a <+ x R) b^ . g
      DerivPtr node = as_arr_r(d);
      DerivPtr inner = as_cut_node(node->premises[0], "expand exp-ins");
      const NetPtr& expP = target->left;
      DerivPtr dB = thin_except(retarget_if_needed(inner->premises[0], expP->body),
                                {expP->bind_socket, expP->bind_plug, target->cut_plug});
      DerivPtr l = mk_arr_r(expP, dB);
      DerivPtr r = thin_except(retarget_if_needed(inner->premises[1], target->right),
                               {target->cut_sock});
      return mk_cut(target, l, r);
    }
    case RuleId::DR_exp: {
      // L a +> x (y^ B b^ . g)  <=  y^ (L a +> x B) b^ . g
      DerivPtr node = as_arr_r(d);
      DerivPtr inner = as_cut_node(node->premises[0], "expand dr-exp");
      const NetPtr& expP = target->right;
      DerivPtr dB = thin_except(retarget_if_needed(inner->premises[1], expP->body),
                                {expP->bind_socket, expP->bind_plug, target->cut_sock});
      DerivPtr r = mk_arr_r(expP, dB);
      DerivPtr l = thin_except(retarget_if_needed(inner->premises[0], target->left),
                               {target->cut_plug});
      return mk_cut(target, l, r);
    }
    case RuleId::DL_expOuts: {
      // (y^ B b^ . a) a <+ x R  <=  (y^ (B a <+ x R1) b^ . g) g + x R2
      DerivPtr outer = as_cut_node(d, "expand exp-outs");
      DerivPtr dExp = as_arr_r(outer->premises[0]);
      DerivPtr dR2 = outer->premises[1];
      DerivPtr innerCut = as_cut_node(dExp->premises[0], "expand exp-outs inner");
      DerivPtr dB = innerCut->premises[0];
      DerivPtr dR1 = innerCut->premises[1];
      const NetPtr& Q = d->conclusion.net;              // the reduct
      const std::string& a1 = Q->left->body->cut_plug;  // inner bound plug
      const std::string& x1 = Q->left->body->cut_sock;  // inner bound socket
      const std::string& x2 = Q->cut_sock;
      const std::string& a = target->cut_plug;
      const std::string& x = target->cut_sock;
      const NetPtr& expP = target->left;
      DerivPtr dB2 = thin_except(move_plug(dB, a1, a, expP->body),
                                 {expP->bind_socket, expP->bind_plug, a});
      DerivPtr l = mk_arr_r(expP, dB2);
      std::vector<DerivPtr> branches;
      for (auto& br : union_branches(dR1, x1))
        branches.push_back(thin_except(move_socket(br, x1, x, target->right), {x}));
      for (auto& br : union_branches(dR2, x2))
        branches.push_back(thin_except(move_socket(br, x2, x, target->right), {x}));
      DerivPtr r = branches.size() == 1 ? branches[0] : mk_union_l(x, branches);
      // The union introduction rebuilds the socket statement; project it to
      // the plug statement the export produced when the merges collapsed.
      TypePtr at = ctx_get(l->conclusion.delta, a);
      DerivPtr r2 = socket_retype(r, x, at);
      return mk_cut(target, l, r2);
    }
    case RuleId::DL_imp:
    case RuleId::DL_cut: {
      // (L1 p [z] w L2) a <+ x R   <=  (L1 a <+ x R1) p [z] w (L2 a <+ x R2)
      // (L1 p + w L2) a <+ x R     <=  (L1 a <+ x R1) p + w (L2 a <+ x R2)
      bool is_imp = rule == RuleId::DL_imp;
      DerivPtr node = is_imp ? as_arr_l(d) : as_cut_node(d, "expand dl-cut");
      DerivPtr dC1 = as_cut_node(node->premises[0], "expand dl split");
      DerivPtr dC2 = as_cut_node(node->premises[1], "expand dl split");
      const NetPtr& Q = d->conclusion.net;
      const std::string& a1 = Q->left->cut_plug;
      const std::string& x1 = Q->left->cut_sock;
      const std::string& a2 = Q->right->cut_plug;
      const std::string& x2 = Q->right->cut_sock;
      const std::string& a = target->cut_plug;
      const std::string& x = target->cut_sock;
      const NetPtr& impP = target->left;
      std::string left_keep = is_imp ? impP->bind_plug_l : impP->cut_plug;
      std::string right_keep = is_imp ? impP->bind_sock_r : impP->cut_sock;
      DerivPtr dL1 = thin_except(move_plug(dC1->premises[0], a1, a, impP->left), {a, left_keep});
      DerivPtr dL2 = thin_except(move_plug(dC2->premises[0], a2, a, impP->right), {a, right_keep});
      DerivPtr l = is_imp ? mk_arr_l(impP, dL1, dL2) : mk_cut(impP, dL1, dL2);
      std::vector<DerivPtr> branches;
      for (auto& br : union_branches(dC1->premises[1], x1))
        branches.push_back(thin_except(move_socket(br, x1, x, target->right), {x}));
      for (auto& br : union_branches(dC2->premises[1], x2))
        branches.push_back(thin_except(move_socket(br, x2, x, target->right), {x}));
      DerivPtr r = branches.size() == 1 ? branches[0] : mk_union_l(x, branches);
      TypePtr at = ctx_get(l->conclusion.delta, a);
      DerivPtr r2 = socket_retype(r, x, at);
      return mk_cut(target, l, r2);
    }
    case RuleId::DR_impIns:
    case RuleId::DR_cut: {
      // L a +> x (B1 p [z] w B2)  <=  (L1 a +> x B1) p [z] w (L2 a +> x B2)
      bool is_imp = rule == RuleId::DR_impIns;
      DerivPtr node = is_imp ? as_arr_l(d) : as_cut_node(d, "expand dr-cut");
      DerivPtr dC1 = as_cut_node(node->premises[0], "expand dr split");
      DerivPtr dC2 = as_cut_node(node->premises[1], "expand dr split");
      const NetPtr& Q = d->conclusion.net;
      const std::string& a1 = Q->left->cut_plug;
      const std::string& x1 = Q->left->cut_sock;
      const std::string& a2 = Q->right->cut_plug;
      const std::string& x2 = Q->right->cut_sock;
      const std::string& a = target->cut_plug;
      const std::string& x = target->cut_sock;
      const NetPtr& impP = target->right;
      std::string left_keep = is_imp ? impP->bind_plug_l : impP->cut_plug;
      std::string right_keep = is_imp ? impP->bind_sock_r : impP->cut_sock;
      DerivPtr dB1 = thin_except(move_socket(dC1->premises[1], x1, x, impP->left), {x, left_keep});
      DerivPtr dB2 = thin_except(move_socket(dC2->premises[1], x2, x, impP->right), {x, right_keep});
      DerivPtr r = is_imp ? mk_arr_l(impP, dB1, dB2) : mk_cut(impP, dB1, dB2);
      std::vector<DerivPtr> branches;
      for (auto& br : inter_branches(dC1->premises[0], a1))
        branches.push_back(thin_except(move_plug(br, a1, a, target->left), {a}));
      for (auto& br : inter_branches(dC2->premises[0], a2))
        branches.push_back(thin_except(move_plug(br, a2, a, target->left), {a}));
      DerivPtr l = branches.size() == 1 ? branches[0] : mk_inter_r(a, branches);
      TypePtr xt = ctx_get(r->conclusion.gamma, x);
      DerivPtr l2 = plug_retype(l, a, xt);
      return mk_cut(target, l2, r);
    }
    case RuleId::DR_impOuts: {
      // L a +> x (B1 p [x] w B2)
      //   <=  L0 a0 + v ((L1 a +> x B1) p [v] w (L2 a +> x B2))
      DerivPtr outer = as_cut_node(d, "expand imp-outs");
      DerivPtr dL0 = outer->premises[0];
      DerivPtr dImp = as_arr_l(outer->premises[1]);
      DerivPtr dC1 = as_cut_node(dImp->premises[0], "expand imp-outs split");
      DerivPtr dC2 = as_cut_node(dImp->premises[1], "expand imp-outs split");
      const NetPtr& Q = d->conclusion.net;
      const std::string& a0 = Q->cut_plug;
      const std::string& a1 = Q->right->left->cut_plug;
      const std::string& x1 = Q->right->left->cut_sock;
      const std::string& a2 = Q->right->right->cut_plug;
      const std::string& x2 = Q->right->right->cut_sock;
      const std::string& a = target->cut_plug;
      const std::string& x = target->cut_sock;
      const NetPtr& impP = target->right;
      DerivPtr dB1 = thin_except(move_socket(dC1->premises[1], x1, x, impP->left),
                                 {x, impP->bind_plug_l});
      DerivPtr dB2 = thin_except(move_socket(dC2->premises[1], x2, x, impP->right),
                                 {x, impP->bind_sock_r});
      DerivPtr r = mk_arr_l(impP, dB1, dB2);
      std::vector<DerivPtr> branches;
      for (auto& br : inter_branches(dL0, a0))
        branches.push_back(thin_except(move_plug(br, a0, a, target->left), {a}));
      for (auto& br : inter_branches(dC1->premises[0], a1))
        branches.push_back(thin_except(move_plug(br, a1, a, target->left), {a}));
      for (auto& br : inter_branches(dC2->premises[0], a2))
        branches.push_back(thin_except(move_plug(br, a2, a, target->left), {a}));
      DerivPtr l = branches.size() == 1 ? branches[0] : mk_inter_r(a, branches);
      TypePtr xt = ctx_get(r->conclusion.gamma, x);
      DerivPtr l2 = plug_retype(l, a, xt);
      return mk_cut(target, l2, r);
    }
    default:
      tfail(std::string("expand: rule not supported: ") + rule_name(rule));
  }
}

}  // namespace detail

// Witness expansion: P fires `r` to a net alpha-equal to dQ's; the result is
// a checked IU derivation of P at dQ's contexts.
inline DerivPtr expand(const NetPtr& P, const Redex& r, const DerivPtr& dQ_in) {
  detail::treq(dQ_in->system == System::IU, "expand: derivation must be in the IU system");
  NameGen gen;
  NetPtr Q = step(P, r, gen);
  detail::treq(alpha_eq(Q, dQ_in->conclusion.net),
               "expand: derivation is not of the step's reduct");
  DerivPtr dQ = retarget(dQ_in, Q);
  RuleId rule = r.rule;
  DerivPtr out = detail::map_to_target(
      dQ, P, r.position, 0, [rule](const DerivPtr& node, const NetPtr& target) {
        return detail::expand_node(node, rule, target);
      });
  out = detail::conform(out, dQ->conclusion.gamma, dQ->conclusion.delta);
  check_or_throw(out);
  return out;
}

}  // namespace xcalc
