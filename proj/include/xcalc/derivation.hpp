#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xcalc/context.hpp"
#include "xcalc/net.hpp"
#include "xcalc/types.hpp"

namespace xcalc {

enum class System { Simple, IU, CBN, CBV };

inline const char* system_name(System s) {
  switch (s) {
    case System::Simple: return "simple";
    case System::IU: return "iu";
    case System::CBN: return "cbn";
    case System::CBV: return "cbv";
  }
  return "?";
}

inline std::optional<System> system_from_name(const std::string& s) {
  if (s == "simple") return System::Simple;
  if (s == "iu") return System::IU;
  if (s == "cbn") return System::CBN;
  if (s == "cbv") return System::CBV;
  return std::nullopt;
}

enum class RuleName { Ax, ArrL, ArrR, Cut, CutL, CutR, InterR, UnionL, InterE, UnionE };

inline const char* rule_text(RuleName r) {
  switch (r) {
    case RuleName::Ax: return "Ax";
    case RuleName::ArrL: return "arrL";
    case RuleName::ArrR: return "arrR";
    case RuleName::Cut: return "cut";
    case RuleName::CutL: return "cutL";
    case RuleName::CutR: return "cutR";
    case RuleName::InterR: return "interR";
    case RuleName::UnionL: return "unionL";
    case RuleName::InterE: return "interE";
    case RuleName::UnionE: return "unionE";
  }
  return "?";
}

inline std::optional<RuleName> rule_from_text(const std::string& s) {
  if (s == "Ax") return RuleName::Ax;
  if (s == "arrL") return RuleName::ArrL;
  if (s == "arrR") return RuleName::ArrR;
  if (s == "cut") return RuleName::Cut;
  if (s == "cutL") return RuleName::CutL;
  if (s == "cutR") return RuleName::CutR;
  if (s == "interR") return RuleName::InterR;
  if (s == "unionL") return RuleName::UnionL;
  if (s == "interE") return RuleName::InterE;
  if (s == "unionE") return RuleName::UnionE;
  return std::nullopt;
}

struct Judgement {
  NetPtr net;
  Ctx gamma;  // sockets
  Ctx delta;  // plugs
};

inline Judgement mk_judgement(NetPtr net, Ctx gamma, Ctx delta) {
  return {std::move(net), normalize_ctx(gamma), normalize_ctx(delta)};
}

inline std::string print_judgement(const Judgement& j) {
  return print_net(j.net) + " : " + print_ctx(j.gamma) + " |- " + print_ctx(j.delta);
}

struct RuleData {
  TypePtr cut_type;     // cut/cutL/cutR
  std::string subject;  // interR/unionL/interE/unionE
  int index = 0;        // interE/unionE, 1-based spine position
};

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  System system;
  RuleName rule;
  Judgement conclusion;
  std::vector<DerivPtr> premises;
  RuleData data;
};

inline DerivPtr mk_node(System sys, RuleName rule, Judgement concl, std::vector<DerivPtr> prems,
                        RuleData data = {}) {
  auto d = std::make_shared<Derivation>();
  d->system = sys;
  d->rule = rule;
  d->conclusion = std::move(concl);
  d->premises = std::move(prems);
  d->data = std::move(data);
  return d;
}

// ---------------------------------------------------------------------------
// The axiom condition: a capsule <s.p> is typable at (G, D) when a proper
// type mediates, i.e. some proper A has G <= A <= D. By interpolation in the
// free lattice it suffices to scan the proper subterms of G and D plus one
// fresh variable (which mediates exactly when G ~ BOT or D ~ TOP pairs up).

inline void collect_proper_subterms(const TypePtr& t, std::vector<TypePtr>& out) {
  if (is_proper(t)) out.push_back(t);
  switch (t->kind) {
    case TypeKind::Arrow:
    case TypeKind::Inter:
    case TypeKind::Union:
      collect_proper_subterms(t->lhs, out);
      collect_proper_subterms(t->rhs, out);
      break;
    default:
      break;
  }
}

inline bool ax_mediated(const TypePtr& g, const TypePtr& d) {
  std::vector<TypePtr> cands;
  collect_proper_subterms(g, cands);
  collect_proper_subterms(d, cands);
  cands.push_back(Type::var("__fresh"));
  for (auto& a : cands)
    if (leq(g, a) && leq(a, d)) return true;
  return false;
}

// The mediating type itself, when one exists (used by transformers).
inline TypePtr ax_mediator(const TypePtr& g, const TypePtr& d) {
  std::vector<TypePtr> cands;
  collect_proper_subterms(g, cands);
  collect_proper_subterms(d, cands);
  cands.push_back(Type::var("__fresh"));
  for (auto& a : cands)
    if (leq(g, a) && leq(a, d)) return a;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Checker.

struct RuleError {
  std::vector<int> path;  // premise indices from the root
  std::string reason;
};

struct CheckFailure : std::runtime_error {
  RuleError error;
  explicit CheckFailure(RuleError e)
      : std::runtime_error("rule error at [" + [](const std::vector<int>& p) {
          std::string s;
          for (size_t i = 0; i < p.size(); ++i) {
            if (i) s += ".";
            s += std::to_string(p[i]);
          }
          return s;
        }(e.path) + "]: " + e.reason),
        error(std::move(e)) {}
};

namespace detail {

inline bool all_simple(const Ctx& c) {
  for (auto& [k, v] : c)
    if (!is_simple(v)) return false;
  return true;
}

inline void check_node(const DerivPtr& d, std::vector<int>& path);

inline void fail_at(const std::vector<int>& path, const std::string& reason) {
  throw CheckFailure({path, reason});
}

inline void require(bool cond, const std::vector<int>& path, const std::string& reason) {
  if (!cond) fail_at(path, reason);
}

// Statements about connectors bound inside the node's own net are junk the
// rules can never have produced.
inline void check_no_bound_statements(const Judgement& j, const std::vector<int>& path) {
  std::set<std::string> frees = free_sockets(j.net);
  auto fp = free_plugs(j.net);
  frees.insert(fp.begin(), fp.end());
  std::set<std::string> names = all_names(j.net);
  for (auto& [k, _] : j.gamma)
    require(!names.count(k) || frees.count(k), path, "statement about bound connector '" + k + "'");
  for (auto& [k, _] : j.delta)
    require(!names.count(k) || frees.count(k), path, "statement about bound connector '" + k + "'");
}

inline void check_node(const DerivPtr& d, std::vector<int>& path) {
  const Judgement& c = d->conclusion;
  System sys = d->system;
  auto req = [&](bool b, const std::string& r) { require(b, path, r); };

  for (size_t i = 0; i < d->premises.size(); ++i)
    require(d->premises[i]->system == sys, path, "premise system tag differs from node");

  check_no_bound_statements(c, path);
  if (sys == System::Simple) {
    req(all_simple(c.gamma) && all_simple(c.delta), "non-simple type in a simple-system judgement");
    req(d->rule == RuleName::Ax || d->rule == RuleName::ArrL || d->rule == RuleName::ArrR ||
            d->rule == RuleName::Cut,
        "rule not available in the simple system");
  }
  if (sys == System::IU || sys == System::Simple) {
    req(d->rule != RuleName::CutL && d->rule != RuleName::CutR,
        "activation-specific cut rules belong to the CBN/CBV systems");
  }

  auto premise = [&](size_t i) -> const Judgement& { return d->premises[i]->conclusion; };

  switch (d->rule) {
    case RuleName::Ax: {
      req(is_capsule(c.net), "Ax: net is not a capsule");
      req(d->premises.empty(), "Ax: unexpected premises");
      TypePtr g = ctx_get(c.gamma, c.net->src);
      TypePtr dl = ctx_get(c.delta, c.net->dst);
      req(g != nullptr, "Ax: socket '" + c.net->src + "' missing from gamma");
      req(dl != nullptr, "Ax: plug '" + c.net->dst + "' missing from delta");
      req(ax_mediated(g, dl), "Ax: no proper type mediates " + print_type(g) + " <= " + print_type(dl));
      break;
    }
    case RuleName::ArrR: {
      req(is_export(c.net), "arrR: net is not an export");
      req(d->premises.size() == 1, "arrR: expected one premise");
      const Judgement& p = premise(0);
      req(net_equal(p.net, c.net->body), "arrR: premise net is not the export body");
      TypePtr a = ctx_get(p.gamma, c.net->bind_socket);
      TypePtr b = ctx_get(p.delta, c.net->bind_plug);
      req(a != nullptr, "arrR: bound socket '" + c.net->bind_socket + "' missing from premise gamma");
      req(b != nullptr, "arrR: bound plug '" + c.net->bind_plug + "' missing from premise delta");
      Ctx want_gamma = ctx_without(p.gamma, c.net->bind_socket);
      Ctx want_delta = ctx_merge_union(ctx_without(p.delta, c.net->bind_plug),
                                       {{c.net->out, normalize(Type::arrow(a, b))}});
      req(ctx_equal(c.gamma, want_gamma), "arrR: gamma mismatch");
      req(ctx_equal(c.delta, want_delta), "arrR: delta mismatch");
      break;
    }
    case RuleName::ArrL: {
      req(is_import(c.net), "arrL: net is not an import");
      req(d->premises.size() == 2, "arrL: expected two premises");
      const Judgement& p1 = premise(0);
      const Judgement& p2 = premise(1);
      req(net_equal(p1.net, c.net->left), "arrL: first premise net is not the left subnet");
      req(net_equal(p2.net, c.net->right), "arrL: second premise net is not the right subnet");
      TypePtr a = ctx_get(p1.delta, c.net->bind_plug_l);
      TypePtr b = ctx_get(p2.gamma, c.net->bind_sock_r);
      req(a != nullptr, "arrL: bound plug '" + c.net->bind_plug_l + "' missing from first premise delta");
      req(b != nullptr, "arrL: bound socket '" + c.net->bind_sock_r + "' missing from second premise gamma");
      Ctx want_gamma = ctx_merge_inter(ctx_merge_inter(p1.gamma, ctx_without(p2.gamma, c.net->bind_sock_r)),
                                       {{c.net->mid, normalize(Type::arrow(a, b))}});
      Ctx want_delta = ctx_merge_union(ctx_without(p1.delta, c.net->bind_plug_l), p2.delta);
      req(ctx_equal(c.gamma, want_gamma), "arrL: gamma mismatch");
      req(ctx_equal(c.delta, want_delta), "arrL: delta mismatch");
      break;
    }
    case RuleName::Cut:
    case RuleName::CutL:
    case RuleName::CutR: {
      req(is_cut(c.net), "cut: net is not a cut");
      req(d->premises.size() == 2, "cut: expected two premises");
      const Judgement& p1 = premise(0);
      const Judgement& p2 = premise(1);
      req(net_equal(p1.net, c.net->left), "cut: first premise net is not the left subnet");
      req(net_equal(p2.net, c.net->right), "cut: second premise net is not the right subnet");
      TypePtr a1 = ctx_get(p1.delta, c.net->cut_plug);
      TypePtr a2 = ctx_get(p2.gamma, c.net->cut_sock);
      req(a1 != nullptr, "cut: plug '" + c.net->cut_plug + "' missing from first premise delta");
      req(a2 != nullptr, "cut: socket '" + c.net->cut_sock + "' missing from second premise gamma");
      req(type_equal(a1, a2), "cut: cut types differ: " + print_type(a1) + " vs " + print_type(a2));
      if (d->data.cut_type)
        req(type_equal(normalize(d->data.cut_type), a1), "cut: recorded cut type disagrees");
      Ctx want_gamma = ctx_merge_inter(p1.gamma, ctx_without(p2.gamma, c.net->cut_sock));
      Ctx want_delta = ctx_merge_union(ctx_without(p1.delta, c.net->cut_plug), p2.delta);
      req(ctx_equal(c.gamma, want_gamma), "cut: gamma mismatch");
      req(ctx_equal(c.delta, want_delta), "cut: delta mismatch");
      // Activation discipline per system.
      if (sys == System::CBN) {
        if (c.net->act == Activation::Left) {
          req(d->rule == RuleName::CutL, "CBN: left-activated cut must use rule cutL");
          req(!is_intersection_kind(a1), "cutL: cut type is an intersection type");
          req(introduces_socket(c.net->right, c.net->cut_sock),
              "cutL: '" + c.net->cut_sock + "' is not introduced in the right subnet");
        } else {
          req(d->rule == RuleName::Cut, "CBN: rule cutL only applies to left-activated cuts");
        }
      } else if (sys == System::CBV) {
        if (c.net->act == Activation::Right) {
          req(d->rule == RuleName::CutR, "CBV: right-activated cut must use rule cutR");
          req(!is_union_kind(a1), "cutR: cut type is a union type");
          req(introduces_plug(c.net->left, c.net->cut_plug),
              "cutR: '" + c.net->cut_plug + "' is not introduced in the left subnet");
        } else {
          req(d->rule == RuleName::Cut, "CBV: rule cutR only applies to right-activated cuts");
        }
      }
      break;
    }
    case RuleName::InterR:
    case RuleName::UnionL: {
      bool inter = d->rule == RuleName::InterR;
      const std::string& subj = d->data.subject;
      req(!subj.empty(), "interR/unionL: missing subject");
      if (sys == System::CBV && inter)
        req(introduces_plug(c.net, subj), "CBV interR: plug '" + subj + "' is not introduced");
      if (sys == System::CBN && !inter)
        req(introduces_socket(c.net, subj), "CBN unionL: socket '" + subj + "' is not introduced");
      const Ctx& cside = inter ? c.delta : c.gamma;
      TypePtr subj_type = ctx_get(cside, subj);
      req(subj_type != nullptr, "interR/unionL: subject missing from conclusion");
      if (d->premises.empty()) {
        // (TOP)/(BOT): any judgement with the subject at TOP (resp. BOT).
        req(type_equal(subj_type, inter ? Type::top() : Type::bot()),
            inter ? "interR: zero premises need subject TOP" : "unionL: zero premises need subject BOT");
        break;
      }
      std::vector<TypePtr> parts;
      Ctx acc_gamma, acc_delta;
      bool first = true;
      for (size_t i = 0; i < d->premises.size(); ++i) {
        const Judgement& p = premise(i);
        req(net_equal(p.net, c.net), "interR/unionL: premise net differs");
        const Ctx& pside = inter ? p.delta : p.gamma;
        TypePtr ai = ctx_get(pside, subj);
        req(ai != nullptr, "interR/unionL: subject missing from premise " + std::to_string(i));
        parts.push_back(ai);
        Ctx pg = inter ? p.gamma : ctx_without(p.gamma, subj);
        Ctx pd = inter ? ctx_without(p.delta, subj) : p.delta;
        if (first) {
          acc_gamma = pg;
          acc_delta = pd;
          first = false;
        } else {
          acc_gamma = ctx_merge_inter(acc_gamma, pg);
          acc_delta = ctx_merge_union(acc_delta, pd);
        }
      }
      TypePtr combined = normalize(inter ? make_inter(parts) : make_union(parts));
      Ctx want_gamma = inter ? acc_gamma : ctx_with(acc_gamma, subj, combined);
      Ctx want_delta = inter ? ctx_with(acc_delta, subj, combined) : acc_delta;
      req(ctx_equal(c.gamma, want_gamma), "interR/unionL: gamma mismatch");
      req(ctx_equal(c.delta, want_delta), "interR/unionL: delta mismatch");
      break;
    }
    case RuleName::InterE:
    case RuleName::UnionE: {
      bool inter = d->rule == RuleName::InterE;
      const std::string& subj = d->data.subject;
      req(!subj.empty(), "interE/unionE: missing subject");
      req(d->premises.size() == 1, "interE/unionE: expected one premise");
      const Judgement& p = premise(0);
      req(net_equal(p.net, c.net), "interE/unionE: premise net differs");
      const Ctx& pside = inter ? p.delta : p.gamma;
      TypePtr t = ctx_get(pside, subj);
      req(t != nullptr, "interE/unionE: subject missing from premise");
      std::vector<TypePtr> spine = inter ? inter_spine(t) : union_spine(t);
      req(d->data.index >= 1 && d->data.index <= static_cast<int>(spine.size()),
          "interE/unionE: index out of range");
      TypePtr proj = spine[d->data.index - 1];
      Ctx want_gamma = inter ? p.gamma : ctx_with(p.gamma, subj, proj);
      Ctx want_delta = inter ? ctx_with(p.delta, subj, proj) : p.delta;
      req(ctx_equal(c.gamma, want_gamma), "interE/unionE: gamma mismatch");
      req(ctx_equal(c.delta, want_delta), "interE/unionE: delta mismatch");
      break;
    }
  }

  for (size_t i = 0; i < d->premises.size(); ++i) {
    path.push_back(static_cast<int>(i));
    check_node(d->premises[i], path);
    path.pop_back();
  }
}

}  // namespace detail

// Validates the whole tree; returns the first violation, or nothing if the
// derivation is well formed.
inline std::optional<RuleError> check_derivation(const DerivPtr& d) {
  std::vector<int> path;
  try {
    if (!is_barendregt(d->conclusion.net))
      detail::fail_at(path, "root net is not in Barendregt form");
    detail::check_node(d, path);
  } catch (const CheckFailure& f) {
    return f.error;
  }
  return std::nullopt;
}

inline bool checks(const DerivPtr& d) { return !check_derivation(d).has_value(); }

inline void check_or_throw(const DerivPtr& d) {
  std::vector<int> path;
  if (!is_barendregt(d->conclusion.net)) detail::fail_at(path, "root net is not in Barendregt form");
  detail::check_node(d, path);
}

}  // namespace xcalc
