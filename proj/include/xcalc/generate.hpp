#pragma once

#include <optional>
#include <random>
#include <vector>

#include "xcalc/infer.hpp"
#include "xcalc/transform.hpp"

namespace xcalc {

// Random typed-net generation for the property harnesses.

inline NetPtr random_net_shape(std::mt19937& rng, int depth, bool allow_activated) {
  auto name = [&rng](const char* prefix) {
    return std::string(prefix) + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng));
  };
  int pick = depth <= 0 ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
  switch (pick) {
    case 1:
      return Net::exp(name("x"), random_net_shape(rng, depth - 1, allow_activated), name("a"),
                      name("a"));
    case 2:
      return Net::imp(random_net_shape(rng, depth - 1, allow_activated), name("a"), name("x"),
                      name("x"), random_net_shape(rng, depth - 1, allow_activated));
    case 3: {
      Activation act = Activation::None;
      if (allow_activated) {
        int k = std::uniform_int_distribution<int>(0, 4)(rng);
        act = k == 3 ? Activation::Left : k == 4 ? Activation::Right : Activation::None;
      }
      return Net::cut(random_net_shape(rng, depth - 1, allow_activated), name("a"), act,
                      name("x"), random_net_shape(rng, depth - 1, allow_activated));
    }
    default:
      return Net::capsule(name("x"), name("a"));
  }
}

// A random simple-typed net with its syntax-directed derivation. Activated
// cuts are excluded when `for_restricted` is set: the CBN/CBV systems demand
// the activation-specific rules there, which the simple skeleton lacks.
inline std::optional<DerivPtr> random_simple_typed(std::mt19937& rng, int depth,
                                                   bool for_restricted = false) {
  for (int tries = 0; tries < 40; ++tries) {
    NameGen gen;
    NetPtr n = barendregt(random_net_shape(rng, depth, !for_restricted), gen);
    if (auto d = infer_simple(n)) return d;
  }
  return std::nullopt;
}

// Renames every type variable in a derivation uniformly (cloning a branch
// with fresh variables keeps it checkable).
inline DerivPtr rename_deriv_type_vars(const DerivPtr& d, const std::map<std::string, std::string>& m) {
  std::vector<DerivPtr> prems;
  for (auto& p : d->premises) prems.push_back(rename_deriv_type_vars(p, m));
  Judgement j;
  j.net = d->conclusion.net;
  for (auto& [k, v] : d->conclusion.gamma) j.gamma[k] = rename_type_vars(v, m);
  for (auto& [k, v] : d->conclusion.delta) j.delta[k] = rename_type_vars(v, m);
  RuleData data = d->data;
  if (data.cut_type) data.cut_type = rename_type_vars(data.cut_type, m);
  return mk_node(d->system, d->rule, std::move(j), std::move(prems), data);
}

inline std::map<std::string, std::string> fresh_var_map(const DerivPtr& d, const std::string& tag) {
  std::set<std::string> vars;
  std::function<void(const DerivPtr&)> walk = [&](const DerivPtr& n) {
    for (auto& [_, v] : n->conclusion.gamma) collect_type_vars(v, vars);
    for (auto& [_, v] : n->conclusion.delta) collect_type_vars(v, vars);
    for (auto& p : n->premises) walk(p);
  };
  walk(d);
  std::map<std::string, std::string> m;
  for (auto& v : vars) m[v] = v + tag;
  return m;
}

// Wraps a derivation root in an intersection introduction over a free plug,
// duplicating the branch with renamed variables.
inline DerivPtr decorate_inter(const DerivPtr& d, const std::string& plug) {
  DerivPtr clone = rename_deriv_type_vars(d, fresh_var_map(d, "i"));
  return mk_inter_r(plug, {d, clone});
}

inline DerivPtr decorate_union(const DerivPtr& d, const std::string& socket) {
  DerivPtr clone = rename_deriv_type_vars(d, fresh_var_map(d, "u"));
  return mk_union_l(socket, {d, clone});
}

// An IU-typed net: simple skeleton cast to IU, optionally decorated with a
// root intersection or union introduction.
inline std::optional<DerivPtr> random_iu_typed(std::mt19937& rng, int depth) {
  auto base = random_simple_typed(rng, depth);
  if (!base) return std::nullopt;
  DerivPtr d = cast_system(*base, System::IU);
  int mode = std::uniform_int_distribution<int>(0, 3)(rng);
  const Judgement& j = d->conclusion;
  if (mode == 1 && !j.delta.empty()) {
    auto it = j.delta.begin();
    std::advance(it, std::uniform_int_distribution<size_t>(0, j.delta.size() - 1)(rng));
    return decorate_inter(d, it->first);
  }
  if (mode == 2 && !j.gamma.empty()) {
    auto it = j.gamma.begin();
    std::advance(it, std::uniform_int_distribution<size_t>(0, j.gamma.size() - 1)(rng));
    // unionL in IU carries no side condition
    return decorate_union(d, it->first);
  }
  return d;
}

// A cut whose right premise ends with a union introduction at the cut socket
// (the shape the restricted systems care about). The left premise is a
// capsule axiom at the union type.
inline std::optional<DerivPtr> compose_union_case_cut(std::mt19937& rng, int depth, System sys) {
  auto baseq = random_simple_typed(rng, depth, sys != System::IU);
  if (!baseq) return std::nullopt;
  DerivPtr q = cast_system(*baseq, sys);
  // Need a free socket; for CBN it must be introduced.
  const NetPtr& qn = q->conclusion.net;
  std::string x;
  for (auto& [s, _] : q->conclusion.gamma) {
    if (sys == System::CBN && !introduces_socket(qn, s)) continue;
    x = s;
    break;
  }
  if (x.empty()) return std::nullopt;
  DerivPtr clone = rename_deriv_type_vars(q, fresh_var_map(q, "u"));
  DerivPtr runion;
  try {
    runion = mk_union_l(x, {q, clone});
  } catch (const BuildError&) {
    return std::nullopt;
  }
  TypePtr ut = ctx_get(runion->conclusion.gamma, x);
  // Left side: a capsule <z.a> with z and a at the union type, derived by a
  // union introduction over per-component axioms.
  NameGen gen;
  for (auto& nme : all_names(qn)) gen.mark_used(nme);
  std::string z = gen.fresh_socket();
  std::string a = gen.fresh_plug();
  NetPtr cap = Net::capsule(z, a);
  std::vector<DerivPtr> lparts;
  for (auto& comp : union_spine(ut))
    lparts.push_back(mk_ax(sys, cap, Ctx{{z, comp}}, Ctx{{a, ut}}));
  DerivPtr l = lparts.size() == 1 ? lparts[0] : mk_union_l(z, lparts);
  NetPtr net = Net::cut(cap, a, Activation::None, x, qn);
  try {
    return mk_cut(net, l, runion);
  } catch (const BuildError&) {
    return std::nullopt;
  }
}

// Dual: a cut whose left premise ends with an intersection introduction at
// the cut plug.
inline std::optional<DerivPtr> compose_inter_case_cut(std::mt19937& rng, int depth, System sys) {
  auto basep = random_simple_typed(rng, depth, sys != System::IU);
  if (!basep) return std::nullopt;
  DerivPtr p = cast_system(*basep, sys);
  const NetPtr& pn = p->conclusion.net;
  std::string a;
  for (auto& [pl, _] : p->conclusion.delta) {
    if (sys == System::CBV && !introduces_plug(pn, pl)) continue;
    a = pl;
    break;
  }
  if (a.empty()) return std::nullopt;
  DerivPtr clone = rename_deriv_type_vars(p, fresh_var_map(p, "i"));
  DerivPtr linter;
  try {
    linter = mk_inter_r(a, {p, clone});
  } catch (const BuildError&) {
    return std::nullopt;
  }
  TypePtr it = ctx_get(linter->conclusion.delta, a);
  NameGen gen;
  for (auto& nme : all_names(pn)) gen.mark_used(nme);
  std::string x = gen.fresh_socket();
  std::string b = gen.fresh_plug();
  NetPtr cap = Net::capsule(x, b);
  std::vector<DerivPtr> rparts;
  for (auto& comp : inter_spine(it))
    rparts.push_back(mk_ax(sys, cap, Ctx{{x, it}}, Ctx{{b, comp}}));
  DerivPtr r = rparts.size() == 1 ? rparts[0] : mk_inter_r(b, rparts);
  NetPtr net = Net::cut(pn, a, Activation::None, x, cap);
  try {
    return mk_cut(net, linter, r);
  } catch (const BuildError&) {
    return std::nullopt;
  }
}

// Typed-net corpus for one restricted system (or IU): simple casts plus the
// composed union/intersection-case cuts, plus one-step reducts of each so the
// propagation rules see activated cuts with their restricted typings.
inline std::vector<DerivPtr> typed_corpus(std::mt19937& rng, System sys, int count, int depth,
                                          Regime regime, int chain = 1) {
  std::vector<DerivPtr> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count && guard++ < count * 30) {
    int mode = std::uniform_int_distribution<int>(0, 3)(rng);
    std::optional<DerivPtr> d;
    if (mode == 0)
      d = compose_union_case_cut(rng, std::max(1, depth - 2), sys);
    else if (mode == 1)
      d = compose_inter_case_cut(rng, std::max(1, depth - 2), sys);
    else if (sys == System::IU)
      d = random_iu_typed(rng, depth);
    else {
      auto s = random_simple_typed(rng, depth, true);
      if (s) d = cast_system(*s, sys);
    }
    if (!d || !checks(*d)) continue;
    out.push_back(*d);
    // Chain a few steps so activated cuts and their restricted rules appear.
    DerivPtr cur = *d;
    for (int k = 0; k < chain; ++k) {
      auto rs = find_redexes(cur->conclusion.net, regime);
      if (rs.empty()) break;
      auto& r = rs[std::uniform_int_distribution<size_t>(0, rs.size() - 1)(rng)];
      try {
        cur = preserve(cur, r);
      } catch (const std::exception&) {
        break;
      }
      if (static_cast<int>(out.size()) < count) out.push_back(cur);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expansion pairs: a typed reduct Q with a net P one core step above it.

struct ExpansionPair {
  NetPtr p;
  Redex redex;
  DerivPtr dq;  // IU derivation of the reduct
};

// Builds P around (a subnet of) Q by inverting a rule whose anti-instance
// needs no structural match, with fresh connectors drawn apart from Q.
inline std::optional<ExpansionPair> anti_step(std::mt19937& rng, const DerivPtr& dq) {
  const NetPtr& q = dq->conclusion.net;
  NameGen gen;
  for (auto& n : all_names(q)) gen.mark_used(n);
  for (auto& [k, _] : dq->conclusion.gamma) gen.mark_used(k);
  for (auto& [k, _] : dq->conclusion.delta) gen.mark_used(k);
  // Collect candidate positions.
  struct Cand {
    Path pos;
    NetPtr p_sub;
    RuleId rule;
  };
  std::vector<Cand> cands;
  std::function<void(const NetPtr&, Path&)> walk = [&](const NetPtr& n, Path& here) {
    auto add = [&](NetPtr sub, RuleId rule) { cands.push_back({here, std::move(sub), rule}); };
    switch (n->kind) {
      case NetKind::Capsule: {
        std::string a = gen.fresh_plug();
        std::string x = gen.fresh_socket();
        add(Net::cut(Net::capsule(n->src, a), a, Activation::None, x, Net::capsule(x, n->dst)),
            RuleId::Ax);
        // cap-L / cap-R erasure anti-steps with a small random garbage net
        std::string a2 = gen.fresh_plug();
        std::string x2 = gen.fresh_socket();
        NameGen g2 = gen;
        NetPtr trash = barendregt(random_net_shape(rng, 1, false), g2);
        add(Net::cut(n, a2, Activation::Left, x2, trash), RuleId::DL_cap);
        std::string a3 = gen.fresh_plug();
        std::string x3 = gen.fresh_socket();
        add(Net::cut(trash, a3, Activation::Right, x3, n), RuleId::DR_cap);
        break;
      }
      case NetKind::Export: {
        std::string a = gen.fresh_plug();
        std::string x = gen.fresh_socket();
        add(Net::cut(Net::exp(n->bind_socket, n->body, n->bind_plug, a), a, Activation::None, x,
                     Net::capsule(x, n->out)),
            RuleId::ExpR);
        here.push_back(0);
        walk(n->body, here);
        here.pop_back();
        break;
      }
      case NetKind::Import: {
        if (free_sockets(n->left).count(n->mid) == 0 &&
            free_sockets(n->right).count(n->mid) == 0) {
          std::string a = gen.fresh_plug();
          std::string x = gen.fresh_socket();
          add(Net::cut(Net::capsule(n->mid, a), a, Activation::None, x,
                       Net::imp(n->left, n->bind_plug_l, x, n->bind_sock_r, n->right)),
              RuleId::ImpL);
        }
        here.push_back(0);
        walk(n->left, here);
        here.pop_back();
        here.push_back(1);
        walk(n->right, here);
        here.pop_back();
        break;
      }
      case NetKind::Cut: {
        if (n->act == Activation::None) {
          // Deactivation anti-steps: the reduct's inactive cut came from an
          // activated one (shape conditions filtered by the re-fire check).
          if (is_capsule(n->left) && n->left->dst == n->cut_plug)
            add(Net::cut(n->left, n->cut_plug, Activation::Left, n->cut_sock, n->right),
                RuleId::DL_d);
          if (is_capsule(n->right) && n->right->src == n->cut_sock)
            add(Net::cut(n->left, n->cut_plug, Activation::Right, n->cut_sock, n->right),
                RuleId::DR_d);
        } else {
          // Activation anti-steps: the activated cut came from an inactive one.
          NetPtr inactive = Net::cut(n->left, n->cut_plug, Activation::None, n->cut_sock, n->right);
          if (n->act == Activation::Left && !introduces_plug(n->left, n->cut_plug))
            add(inactive, RuleId::ActL);
          if (n->act == Activation::Right && !introduces_socket(n->right, n->cut_sock))
            add(inactive, RuleId::ActR);
        }
        here.push_back(0);
        walk(n->left, here);
        here.pop_back();
        here.push_back(1);
        walk(n->right, here);
        here.pop_back();
        break;
      }
    }
  };
  Path root;
  walk(q, root);
  if (cands.empty()) return std::nullopt;
  auto cand = cands[std::uniform_int_distribution<size_t>(0, cands.size() - 1)(rng)];
  NetPtr p_full = replace_at(q, cand.pos, cand.p_sub);
  NameGen g3;
  p_full = barendregt(p_full, g3);
  // Identify the fired redex on the rebuilt net.
  for (auto& r : find_redexes(p_full, Regime::Full)) {
    if (r.position != cand.pos || r.rule != cand.rule) continue;
    NameGen g4;
    NetPtr back = step(p_full, r, g4);
    if (alpha_eq(back, q)) return ExpansionPair{p_full, r, dq};
  }
  return std::nullopt;
}

}  // namespace xcalc
