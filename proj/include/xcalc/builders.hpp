#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xcalc/derivation.hpp"

namespace xcalc {

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void breq(bool cond, const std::string& msg) {
  if (!cond) throw BuildError(msg);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Rule builders. Each computes the conclusion from the premises; the checker
// accepts everything they produce.

inline DerivPtr mk_ax(System sys, const NetPtr& net, Ctx gamma, Ctx delta) {
  detail::breq(is_capsule(net), "mk_ax: not a capsule");
  gamma = normalize_ctx(gamma);
  delta = normalize_ctx(delta);
  TypePtr g = ctx_get(gamma, net->src);
  TypePtr d = ctx_get(delta, net->dst);
  detail::breq(g && d, "mk_ax: subject statements missing");
  detail::breq(ax_mediated(g, d), "mk_ax: no proper mediator for " + print_type(g) + " <= " + print_type(d));
  return mk_node(sys, RuleName::Ax, {net, std::move(gamma), std::move(delta)}, {});
}

inline DerivPtr mk_arr_r(const NetPtr& net, const DerivPtr& p) {
  detail::breq(is_export(net), "mk_arr_r: not an export");
  detail::breq(net_equal(p->conclusion.net, net->body), "mk_arr_r: premise net mismatch");
  TypePtr a = ctx_get(p->conclusion.gamma, net->bind_socket);
  TypePtr b = ctx_get(p->conclusion.delta, net->bind_plug);
  detail::breq(a && b, "mk_arr_r: binder statements missing from premise");
  Ctx gamma = ctx_without(p->conclusion.gamma, net->bind_socket);
  Ctx delta = ctx_merge_union(ctx_without(p->conclusion.delta, net->bind_plug),
                              {{net->out, normalize(Type::arrow(a, b))}});
  return mk_node(p->system, RuleName::ArrR, {net, std::move(gamma), std::move(delta)}, {p});
}

inline DerivPtr mk_arr_l(const NetPtr& net, const DerivPtr& p1, const DerivPtr& p2) {
  detail::breq(is_import(net), "mk_arr_l: not an import");
  detail::breq(net_equal(p1->conclusion.net, net->left), "mk_arr_l: left premise net mismatch");
  detail::breq(net_equal(p2->conclusion.net, net->right), "mk_arr_l: right premise net mismatch");
  TypePtr a = ctx_get(p1->conclusion.delta, net->bind_plug_l);
  TypePtr b = ctx_get(p2->conclusion.gamma, net->bind_sock_r);
  detail::breq(a && b, "mk_arr_l: binder statements missing from premises");
  Ctx gamma = ctx_merge_inter(
      ctx_merge_inter(p1->conclusion.gamma, ctx_without(p2->conclusion.gamma, net->bind_sock_r)),
      {{net->mid, normalize(Type::arrow(a, b))}});
  Ctx delta = ctx_merge_union(ctx_without(p1->conclusion.delta, net->bind_plug_l),
                              p2->conclusion.delta);
  return mk_node(p1->system, RuleName::ArrL, {net, std::move(gamma), std::move(delta)}, {p1, p2});
}

inline DerivPtr mk_cut(const NetPtr& net, const DerivPtr& p1, const DerivPtr& p2) {
  detail::breq(is_cut(net), "mk_cut: not a cut");
  detail::breq(net_equal(p1->conclusion.net, net->left), "mk_cut: left premise net mismatch");
  detail::breq(net_equal(p2->conclusion.net, net->right), "mk_cut: right premise net mismatch");
  TypePtr a1 = ctx_get(p1->conclusion.delta, net->cut_plug);
  TypePtr a2 = ctx_get(p2->conclusion.gamma, net->cut_sock);
  detail::breq(a1 && a2, "mk_cut: cut statements missing from premises");
  detail::breq(type_equal(a1, a2),
               "mk_cut: cut types differ: " + print_type(a1) + " vs " + print_type(a2));
  System sys = p1->system;
  RuleName rule = RuleName::Cut;
  if (sys == System::CBN && net->act == Activation::Left) {
    rule = RuleName::CutL;
    detail::breq(!is_intersection_kind(a1), "mk_cut: cutL needs a non-intersection type");
    detail::breq(introduces_socket(net->right, net->cut_sock),
                 "mk_cut: cutL needs the socket introduced on the right");
  }
  if (sys == System::CBV && net->act == Activation::Right) {
    rule = RuleName::CutR;
    detail::breq(!is_union_kind(a1), "mk_cut: cutR needs a non-union type");
    detail::breq(introduces_plug(net->left, net->cut_plug),
                 "mk_cut: cutR needs the plug introduced on the left");
  }
  Ctx gamma = ctx_merge_inter(p1->conclusion.gamma,
                              ctx_without(p2->conclusion.gamma, net->cut_sock));
  Ctx delta = ctx_merge_union(ctx_without(p1->conclusion.delta, net->cut_plug),
                              p2->conclusion.delta);
  RuleData data;
  data.cut_type = a1;
  return mk_node(sys, rule, {net, std::move(gamma), std::move(delta)}, {p1, p2}, data);
}

// n >= 1 intersection introduction on plug `subject`.
inline DerivPtr mk_inter_r(const std::string& subject, const std::vector<DerivPtr>& prems) {
  detail::breq(!prems.empty(), "mk_inter_r: use mk_top_leaf for the zero case");
  System sys = prems[0]->system;
  const NetPtr& net = prems[0]->conclusion.net;
  std::vector<TypePtr> parts;
  Ctx gamma, delta;
  bool first = true;
  for (auto& p : prems) {
    detail::breq(net_equal(p->conclusion.net, net), "mk_inter_r: premise nets differ");
    TypePtr ai = ctx_get(p->conclusion.delta, subject);
    detail::breq(ai != nullptr, "mk_inter_r: subject missing from a premise");
    parts.push_back(ai);
    Ctx pd = ctx_without(p->conclusion.delta, subject);
    if (first) {
      gamma = p->conclusion.gamma;
      delta = pd;
      first = false;
    } else {
      gamma = ctx_merge_inter(gamma, p->conclusion.gamma);
      delta = ctx_merge_union(delta, pd);
    }
  }
  if (sys == System::CBV)
    detail::breq(introduces_plug(net, subject), "mk_inter_r: CBV needs the plug introduced");
  delta = ctx_with(delta, subject, normalize(make_inter(parts)));
  RuleData data;
  data.subject = subject;
  return mk_node(sys, RuleName::InterR, {net, std::move(gamma), std::move(delta)},
                 std::vector<DerivPtr>(prems.begin(), prems.end()), data);
}

inline DerivPtr mk_union_l(const std::string& subject, const std::vector<DerivPtr>& prems) {
  detail::breq(!prems.empty(), "mk_union_l: use mk_bot_leaf for the zero case");
  System sys = prems[0]->system;
  const NetPtr& net = prems[0]->conclusion.net;
  std::vector<TypePtr> parts;
  Ctx gamma, delta;
  bool first = true;
  for (auto& p : prems) {
    detail::breq(net_equal(p->conclusion.net, net), "mk_union_l: premise nets differ");
    TypePtr ai = ctx_get(p->conclusion.gamma, subject);
    detail::breq(ai != nullptr, "mk_union_l: subject missing from a premise");
    parts.push_back(ai);
    Ctx pg = ctx_without(p->conclusion.gamma, subject);
    if (first) {
      gamma = pg;
      delta = p->conclusion.delta;
      first = false;
    } else {
      gamma = ctx_merge_inter(gamma, pg);
      delta = ctx_merge_union(delta, p->conclusion.delta);
    }
  }
  if (sys == System::CBN)
    detail::breq(introduces_socket(net, subject), "mk_union_l: CBN needs the socket introduced");
  gamma = ctx_with(gamma, subject, normalize(make_union(parts)));
  RuleData data;
  data.subject = subject;
  return mk_node(sys, RuleName::UnionL, {net, std::move(gamma), std::move(delta)},
                 std::vector<DerivPtr>(prems.begin(), prems.end()), data);
}

// (TOP): any judgement with `subject` at TOP in delta.
inline DerivPtr mk_top_leaf(System sys, const NetPtr& net, Ctx gamma, Ctx delta,
                            const std::string& subject) {
  delta = ctx_with(std::move(delta), subject, Type::top());
  if (sys == System::CBV)
    detail::breq(introduces_plug(net, subject), "mk_top_leaf: CBV needs the plug introduced");
  RuleData data;
  data.subject = subject;
  return mk_node(sys, RuleName::InterR, {net, normalize_ctx(gamma), std::move(delta)}, {}, data);
}

// (BOT): any judgement with `subject` at BOT in gamma.
inline DerivPtr mk_bot_leaf(System sys, const NetPtr& net, Ctx gamma, Ctx delta,
                            const std::string& subject) {
  gamma = ctx_with(std::move(gamma), subject, Type::bot());
  if (sys == System::CBN)
    detail::breq(introduces_socket(net, subject), "mk_bot_leaf: CBN needs the socket introduced");
  RuleData data;
  data.subject = subject;
  return mk_node(sys, RuleName::UnionL, {net, std::move(gamma), normalize_ctx(delta)}, {}, data);
}

inline DerivPtr mk_inter_e(const DerivPtr& p, const std::string& subject, int index) {
  TypePtr t = ctx_get(p->conclusion.delta, subject);
  detail::breq(t != nullptr, "mk_inter_e: subject missing");
  auto spine = inter_spine(t);
  detail::breq(index >= 1 && index <= static_cast<int>(spine.size()), "mk_inter_e: bad index");
  Ctx delta = ctx_with(p->conclusion.delta, subject, spine[index - 1]);
  RuleData data;
  data.subject = subject;
  data.index = index;
  return mk_node(p->system, RuleName::InterE, {p->conclusion.net, p->conclusion.gamma, std::move(delta)},
                 {p}, data);
}

inline DerivPtr mk_union_e(const DerivPtr& p, const std::string& subject, int index) {
  TypePtr t = ctx_get(p->conclusion.gamma, subject);
  detail::breq(t != nullptr, "mk_union_e: subject missing");
  auto spine = union_spine(t);
  detail::breq(index >= 1 && index <= static_cast<int>(spine.size()), "mk_union_e: bad index");
  Ctx gamma = ctx_with(p->conclusion.gamma, subject, spine[index - 1]);
  RuleData data;
  data.subject = subject;
  data.index = index;
  return mk_node(p->system, RuleName::UnionE, {p->conclusion.net, std::move(gamma), p->conclusion.delta},
                 {p}, data);
}

// ---------------------------------------------------------------------------
// Column operations.

inline void collect_subjects(const DerivPtr& d, std::set<std::string>& out) {
  for (auto& [k, _] : d->conclusion.gamma) out.insert(k);
  for (auto& [k, _] : d->conclusion.delta) out.insert(k);
  for (auto& p : d->premises) collect_subjects(p, out);
}

// Adds a statement about a subject foreign to the whole tree, at every
// judgement. Weakening an already-present ~-equal statement is the identity.
inline DerivPtr weaken(const DerivPtr& d, const std::string& subject, const TypePtr& type,
                       bool socket) {
  TypePtr nt = normalize(type);
  const Ctx& side = socket ? d->conclusion.gamma : d->conclusion.delta;
  if (TypePtr existing = ctx_get(side, subject)) {
    detail::breq(type_equal(existing, nt),
                 "weaken: subject '" + subject + "' already present with a different type");
    return d;
  }
  // Collisions: a binder of that name anywhere (the new statement would talk
  // about a bound connector) or an existing statement at any node (the
  // insertion would overwrite it).
  std::set<std::string> used = all_names(d->conclusion.net);
  for (auto& f : free_sockets(d->conclusion.net)) used.erase(f);
  for (auto& f : free_plugs(d->conclusion.net)) used.erase(f);
  collect_subjects(d, used);
  detail::breq(!used.count(subject), "weaken: subject '" + subject + "' occurs in the derivation");
  std::function<DerivPtr(const DerivPtr&)> go = [&](const DerivPtr& n) -> DerivPtr {
    std::vector<DerivPtr> prems;
    prems.reserve(n->premises.size());
    for (auto& p : n->premises) prems.push_back(go(p));
    Judgement j = n->conclusion;
    if (socket)
      j.gamma[subject] = nt;
    else
      j.delta[subject] = nt;
    return mk_node(n->system, n->rule, std::move(j), std::move(prems), n->data);
  };
  return go(d);
}

// Removes a spurious column. The subject must not occur in the root net at
// all and must not be load bearing anywhere (a rule subject).
inline DerivPtr thin(const DerivPtr& d, const std::string& subject) {
  auto frees = free_sockets(d->conclusion.net);
  auto fp = free_plugs(d->conclusion.net);
  frees.insert(fp.begin(), fp.end());
  detail::breq(!frees.count(subject), "thin: subject '" + subject + "' is free in the net");
  detail::breq(!all_names(d->conclusion.net).count(subject),
               "thin: subject '" + subject + "' occurs in the net");
  std::function<DerivPtr(const DerivPtr&)> go = [&](const DerivPtr& n) -> DerivPtr {
    detail::breq(n->data.subject != subject, "thin: subject '" + subject + "' is a rule subject");
    std::vector<DerivPtr> prems;
    prems.reserve(n->premises.size());
    for (auto& p : n->premises) prems.push_back(go(p));
    Judgement j = n->conclusion;
    j.gamma.erase(subject);
    j.delta.erase(subject);
    return mk_node(n->system, n->rule, std::move(j), std::move(prems), n->data);
  };
  return go(d);
}

// Restrict the root judgement to statements about free connectors by
// thinning every spurious subject.
inline DerivPtr thin_to_free(const DerivPtr& d) {
  auto frees = free_sockets(d->conclusion.net);
  auto fp = free_plugs(d->conclusion.net);
  frees.insert(fp.begin(), fp.end());
  DerivPtr cur = d;
  std::vector<std::string> junk;
  for (auto& [k, _] : d->conclusion.gamma)
    if (!frees.count(k)) junk.push_back(k);
  for (auto& [k, _] : d->conclusion.delta)
    if (!frees.count(k)) junk.push_back(k);
  for (auto& k : junk) cur = thin(cur, k);
  return cur;
}

// ---------------------------------------------------------------------------
// Retargeting: transport a derivation onto an alpha-equal net (bound names
// renamed consistently through every judgement and rule subject).

namespace detail {

inline void match_binders(const NetPtr& from, const NetPtr& to,
                          std::map<std::string, std::string>& smap,
                          std::map<std::string, std::string>& pmap) {
  breq(from->kind == to->kind, "retarget: nets differ structurally");
  switch (from->kind) {
    case NetKind::Capsule:
      break;
    case NetKind::Export:
      smap[from->bind_socket] = to->bind_socket;
      pmap[from->bind_plug] = to->bind_plug;
      match_binders(from->body, to->body, smap, pmap);
      break;
    case NetKind::Import:
      pmap[from->bind_plug_l] = to->bind_plug_l;
      smap[from->bind_sock_r] = to->bind_sock_r;
      match_binders(from->left, to->left, smap, pmap);
      match_binders(from->right, to->right, smap, pmap);
      break;
    case NetKind::Cut:
      pmap[from->cut_plug] = to->cut_plug;
      smap[from->cut_sock] = to->cut_sock;
      match_binders(from->left, to->left, smap, pmap);
      match_binders(from->right, to->right, smap, pmap);
      break;
  }
}

inline Ctx remap_ctx(const Ctx& c, const std::map<std::string, std::string>& m) {
  Ctx out;
  for (auto& [k, v] : c) {
    auto it = m.find(k);
    out[it == m.end() ? k : it->second] = v;
  }
  return out;
}

inline DerivPtr retarget_walk(const DerivPtr& d, const NetPtr& target,
                              const std::map<std::string, std::string>& smap,
                              const std::map<std::string, std::string>& pmap) {
  std::vector<DerivPtr> prems;
  prems.reserve(d->premises.size());
  switch (d->rule) {
    case RuleName::Ax:
      break;
    case RuleName::ArrR:
      prems.push_back(retarget_walk(d->premises[0], target->body, smap, pmap));
      break;
    case RuleName::ArrL:
    case RuleName::Cut:
    case RuleName::CutL:
    case RuleName::CutR:
      prems.push_back(retarget_walk(d->premises[0], target->left, smap, pmap));
      prems.push_back(retarget_walk(d->premises[1], target->right, smap, pmap));
      break;
    case RuleName::InterR:
    case RuleName::UnionL:
    case RuleName::InterE:
    case RuleName::UnionE:
      for (auto& p : d->premises) prems.push_back(retarget_walk(p, target, smap, pmap));
      break;
  }
  Judgement j;
  j.net = target;
  j.gamma = remap_ctx(d->conclusion.gamma, smap);
  j.delta = remap_ctx(d->conclusion.delta, pmap);
  RuleData data = d->data;
  if (!data.subject.empty()) {
    auto its = smap.find(data.subject);
    auto itp = pmap.find(data.subject);
    if (its != smap.end()) data.subject = its->second;
    if (itp != pmap.end()) data.subject = itp->second;
  }
  return mk_node(d->system, d->rule, std::move(j), std::move(prems), data);
}

}  // namespace detail

inline DerivPtr retarget(const DerivPtr& d, const NetPtr& target) {
  if (net_equal(d->conclusion.net, target)) return d;
  std::map<std::string, std::string> smap, pmap;
  detail::match_binders(d->conclusion.net, target, smap, pmap);
  return detail::retarget_walk(d, target, smap, pmap);
}

// Changes the system tag on every node, re-validating via the checker.
// Simple derivations check unchanged under IU.
inline DerivPtr cast_system(const DerivPtr& d, System sys) {
  std::function<DerivPtr(const DerivPtr&)> go = [&](const DerivPtr& n) -> DerivPtr {
    std::vector<DerivPtr> prems;
    for (auto& p : n->premises) prems.push_back(go(p));
    return mk_node(sys, n->rule, n->conclusion, std::move(prems), n->data);
  };
  return go(d);
}

// ---------------------------------------------------------------------------
// Eliminations (spec ops elim_inter / elim_union): projections of an
// intersection plug statement (resp. union socket statement), realised via
// the primitive E rules.

inline std::vector<DerivPtr> elim_inter(const DerivPtr& d, const std::string& plug) {
  TypePtr t = ctx_get(d->conclusion.delta, plug);
  detail::breq(t != nullptr, "elim_inter: plug missing");
  detail::breq(normalize(t)->kind == TypeKind::Inter, "elim_inter: type at '" + plug + "' is not an intersection");
  auto spine = inter_spine(t);
  std::vector<DerivPtr> out;
  for (int j = 1; j <= static_cast<int>(spine.size()); ++j) out.push_back(mk_inter_e(d, plug, j));
  return out;
}

inline std::vector<DerivPtr> elim_union(const DerivPtr& d, const std::string& socket) {
  TypePtr t = ctx_get(d->conclusion.gamma, socket);
  detail::breq(t != nullptr, "elim_union: socket missing");
  detail::breq(normalize(t)->kind == TypeKind::Union, "elim_union: type at '" + socket + "' is not a union");
  auto spine = union_spine(t);
  std::vector<DerivPtr> out;
  for (int j = 1; j <= static_cast<int>(spine.size()); ++j) out.push_back(mk_union_e(d, socket, j));
  return out;
}

// ---------------------------------------------------------------------------
// Generation / inversion facts for proper nodes.

struct GenerationFacts {
  // capsule: socket type, plug type (leq holds)
  // export: arrow domain/codomain + premise
  // import: arrow domain/codomain + both premises
  // cut: shape 1 (left ends interR) / 2 (right ends unionL) / 3 (pure) + cut type
  NetKind shape;
  TypePtr left_type, right_type;
  int cut_shape = 0;
  TypePtr cut_type;
  std::vector<DerivPtr> premises;
};

inline GenerationFacts invert(const DerivPtr& d) {
  detail::breq(d->rule != RuleName::InterR && d->rule != RuleName::UnionL,
               "invert: root is not proper (ends with interR/unionL)");
  // Descend elimination chains to the syntax-directed node.
  DerivPtr node = d;
  while (node->rule == RuleName::InterE || node->rule == RuleName::UnionE)
    node = node->premises[0];
  GenerationFacts f;
  const NetPtr& net = d->conclusion.net;
  f.shape = net->kind;
  switch (net->kind) {
    case NetKind::Capsule: {
      f.left_type = ctx_get(d->conclusion.gamma, net->src);
      f.right_type = ctx_get(d->conclusion.delta, net->dst);
      detail::breq(f.left_type && f.right_type, "invert: capsule statements missing");
      detail::breq(leq(f.left_type, f.right_type), "invert: capsule types not related by <=");
      break;
    }
    case NetKind::Export: {
      detail::breq(node->rule == RuleName::ArrR, "invert: export not concluded by arrR");
      f.premises = node->premises;
      f.left_type = ctx_get(node->premises[0]->conclusion.gamma, net->bind_socket);
      f.right_type = ctx_get(node->premises[0]->conclusion.delta, net->bind_plug);
      TypePtr declared = ctx_get(d->conclusion.delta, net->out);
      detail::breq(declared != nullptr, "invert: export out statement missing");
      detail::breq(leq(Type::arrow(f.left_type, f.right_type), declared),
                   "invert: arrow not below the declared type");
      break;
    }
    case NetKind::Import: {
      detail::breq(node->rule == RuleName::ArrL, "invert: import not concluded by arrL");
      f.premises = node->premises;
      f.left_type = ctx_get(node->premises[0]->conclusion.delta, net->bind_plug_l);
      f.right_type = ctx_get(node->premises[1]->conclusion.gamma, net->bind_sock_r);
      TypePtr declared = ctx_get(d->conclusion.gamma, net->mid);
      detail::breq(declared != nullptr, "invert: import mid statement missing");
      detail::breq(leq(declared, Type::arrow(f.left_type, f.right_type)),
                   "invert: declared type not below the arrow");
      break;
    }
    case NetKind::Cut: {
      detail::breq(node->rule == RuleName::Cut || node->rule == RuleName::CutL ||
                       node->rule == RuleName::CutR,
                   "invert: cut not concluded by a cut rule");
      f.premises = node->premises;
      f.cut_type = ctx_get(node->premises[0]->conclusion.delta, net->cut_plug);
      if (node->premises[0]->rule == RuleName::InterR)
        f.cut_shape = 1;
      else if (node->premises[1]->rule == RuleName::UnionL)
        f.cut_shape = 2;
      else
        f.cut_shape = 3;
      break;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Renaming cuts (the closure lemmas). Right version: from a derivation of
// P a^ (+|<+) x^ <x.b> build one of P[b/a] at the same contexts. Left
// version: from <y.a> a^ (+|+>) x^ Q build Q[y/x] at Gamma[y/x].

namespace detail {

// Renames a free plug column `from` to `to`, fusing with any existing `to`
// column by pointwise union; nets renamed alongside. Fails on nodes that
// introduce structure on `from` while `to` is present (the columns cannot be
// fused through an intersection introduction).
inline DerivPtr fuse_plug_walk(const DerivPtr& d, const std::string& from, const std::string& to) {
  bool to_present = ctx_has(d->conclusion.delta, to);
  std::vector<DerivPtr> prems;
  for (auto& p : d->premises) prems.push_back(fuse_plug_walk(p, from, to));
  Judgement j;
  j.net = free_plugs(d->conclusion.net).count(from)
              ? rename_free(d->conclusion.net, {}, {{from, to}})
              : d->conclusion.net;
  j.gamma = d->conclusion.gamma;
  j.delta = d->conclusion.delta;
  TypePtr tfrom = ctx_get(j.delta, from);
  if (tfrom) {
    j.delta.erase(from);
    TypePtr tto = ctx_get(j.delta, to);
    j.delta[to] = tto ? normalize(Type::uni(tto, tfrom)) : tfrom;
  }
  RuleData data = d->data;
  if ((d->rule == RuleName::InterR || d->rule == RuleName::InterE) && d->data.subject == from) {
    breq(!to_present, "rename_cut_derivation: intersection node on the renamed plug with the target present");
    data.subject = to;
  }
  return mk_node(d->system, d->rule, std::move(j), std::move(prems), data);
}

inline DerivPtr fuse_socket_walk(const DerivPtr& d, const std::string& from, const std::string& to) {
  bool to_present = ctx_has(d->conclusion.gamma, to);
  std::vector<DerivPtr> prems;
  for (auto& p : d->premises) prems.push_back(fuse_socket_walk(p, from, to));
  Judgement j;
  j.net = free_sockets(d->conclusion.net).count(from)
              ? rename_free(d->conclusion.net, {{from, to}}, {})
              : d->conclusion.net;
  j.gamma = d->conclusion.gamma;
  j.delta = d->conclusion.delta;
  TypePtr tfrom = ctx_get(j.gamma, from);
  if (tfrom) {
    j.gamma.erase(from);
    TypePtr tto = ctx_get(j.gamma, to);
    j.gamma[to] = tto ? normalize(Type::inter(tto, tfrom)) : tfrom;
  }
  RuleData data = d->data;
  if ((d->rule == RuleName::UnionL || d->rule == RuleName::UnionE) && d->data.subject == from) {
    breq(!to_present, "rename_cut_derivation: union node on the renamed socket with the target present");
    data.subject = to;
  }
  return mk_node(d->system, d->rule, std::move(j), std::move(prems), data);
}

}  // namespace detail

// Widens a derivation to the target contexts with a single padding node.
// Requires the target to absorb the current judgement pointwise: every
// current gamma statement at or above its target counterpart (target <=
// current) and every current delta statement at or below it; keys of the
// current judgement must all appear in the target. One interR (or unionL)
// node over {d, top-leaf-at-target} then lands exactly on the target, since
// the multiplicative merges do the widening.
inline DerivPtr pad_to(const DerivPtr& d, const Ctx& gamma_t_in, const Ctx& delta_t_in,
                       int depth = 0) {
  detail::breq(depth < 4, "pad_to: padding did not converge");
  Ctx gamma_t = normalize_ctx(gamma_t_in);
  Ctx delta_t = normalize_ctx(delta_t_in);
  DerivPtr cur = d;
  // Missing target columns come in by plain weakening where possible; a
  // statement key held deeper in the tree blocks that, but the padding
  // leaf's merge below brings such columns in anyway.
  for (auto& [k, t] : gamma_t)
    if (!ctx_has(cur->conclusion.gamma, k)) {
      try {
        cur = weaken(cur, k, t, true);
      } catch (const BuildError&) {
      }
    }
  for (auto& [k, t] : delta_t)
    if (!ctx_has(cur->conclusion.delta, k)) {
      try {
        cur = weaken(cur, k, t, false);
      } catch (const BuildError&) {
      }
    }
  if (ctx_equal(cur->conclusion.gamma, gamma_t) && ctx_equal(cur->conclusion.delta, delta_t))
    return cur;
  for (auto& [k, v] : cur->conclusion.gamma) {
    TypePtr t = ctx_get(gamma_t, k);
    detail::breq(t != nullptr, "pad_to: gamma key '" + k + "' missing from target");
    detail::breq(leq(t, v), "pad_to: target gamma at '" + k + "' not below current");
  }
  for (auto& [k, v] : cur->conclusion.delta) {
    TypePtr t = ctx_get(delta_t, k);
    detail::breq(t != nullptr, "pad_to: delta key '" + k + "' missing from target");
    detail::breq(leq(v, t), "pad_to: target delta at '" + k + "' not above current");
  }
  detail::breq(cur->system != System::Simple, "pad_to: not available in the simple system");
  const NetPtr& net = cur->conclusion.net;
  auto plug_ok = [&](const std::string& q) {
    return cur->system != System::CBV || introduces_plug(net, q);
  };
  auto sock_ok = [&](const std::string& s) {
    return cur->system != System::CBN || introduces_socket(net, s);
  };
  // The interR/unionL subject column takes the meet/join of the premise
  // values rather than the widening merge, so the pivot must already agree
  // with the target. Insert a foreign target statement when none does.
  auto find_pivot = [&](const DerivPtr& n, bool& socket) -> std::string {
    for (auto& [q, t] : delta_t) {
      TypePtr have = ctx_get(n->conclusion.delta, q);
      if (have && type_equal(have, t) && plug_ok(q)) {
        socket = false;
        return q;
      }
    }
    for (auto& [s, t] : gamma_t) {
      TypePtr have = ctx_get(n->conclusion.gamma, s);
      if (have && type_equal(have, t) && sock_ok(s)) {
        socket = true;
        return s;
      }
    }
    return {};
  };
  bool pivot_socket = false;
  std::string pivot = find_pivot(cur, pivot_socket);
  if (pivot.empty()) {
    for (auto& [q, t] : delta_t) {
      if (!ctx_has(cur->conclusion.delta, q) && plug_ok(q)) {
        cur = weaken(cur, q, t, false);
        break;
      }
    }
    pivot = find_pivot(cur, pivot_socket);
  }
  if (pivot.empty()) {
    for (auto& [s, t] : gamma_t) {
      if (!ctx_has(cur->conclusion.gamma, s) && sock_ok(s)) {
        cur = weaken(cur, s, t, true);
        break;
      }
    }
    pivot = find_pivot(cur, pivot_socket);
  }
  if (pivot.empty()) {
    // Every usable shared column needs widening: freeze one at its current
    // value, pad the rest, then finish with a second pass where it agrees.
    if (gamma_t.size() + delta_t.size() >= 2) {
      for (auto& [q, v] : cur->conclusion.delta) {
        if (!plug_ok(q)) continue;
        Ctx frozen = ctx_with(delta_t, q, v);
        DerivPtr mid = pad_to(cur, gamma_t, frozen, depth + 1);
        return pad_to(mid, gamma_t, delta_t, depth + 1);
      }
      for (auto& [s, v] : cur->conclusion.gamma) {
        if (!sock_ok(s)) continue;
        Ctx frozen = ctx_with(gamma_t, s, v);
        DerivPtr mid = pad_to(cur, frozen, delta_t, depth + 1);
        return pad_to(mid, gamma_t, delta_t, depth + 1);
      }
    }
    throw BuildError("pad_to: no usable column for padding");
  }
  if (pivot_socket) {
    DerivPtr bot = mk_bot_leaf(cur->system, net, gamma_t, delta_t, pivot);
    return mk_union_l(pivot, {cur, bot});
  }
  DerivPtr top = mk_top_leaf(cur->system, net, gamma_t, delta_t, pivot);
  return mk_inter_r(pivot, {cur, top});
}

inline DerivPtr rename_cut_derivation(const DerivPtr& d) {
  const NetPtr& net = d->conclusion.net;
  detail::breq(is_cut(net), "rename_cut_derivation: net is not a cut");
  detail::breq(d->rule == RuleName::Cut || d->rule == RuleName::CutL || d->rule == RuleName::CutR,
               "rename_cut_derivation: root is not a cut rule");
  const DerivPtr& l = d->premises[0];
  const DerivPtr& r = d->premises[1];
  if (is_capsule(net->right) && net->right->src == net->cut_sock) {
    // P a^ + x <x.b>  ~>  P[b/a] at the cut's own contexts.
    DerivPtr renamed = detail::fuse_plug_walk(l, net->cut_plug, net->right->dst);
    return pad_to(renamed, d->conclusion.gamma, d->conclusion.delta);
  }
  if (is_capsule(net->left) && net->left->dst == net->cut_plug) {
    // <y.a> a^ + x Q  ~>  Q[y/x].
    DerivPtr renamed = detail::fuse_socket_walk(r, net->cut_sock, net->left->src);
    return pad_to(renamed, d->conclusion.gamma, d->conclusion.delta);
  }
  throw BuildError("rename_cut_derivation: net does not have a renaming-cut shape");
}

}  // namespace xcalc
