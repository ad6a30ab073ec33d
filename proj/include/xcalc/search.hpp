#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xcalc/builders.hpp"
#include "xcalc/derivation.hpp"

namespace xcalc {

// Bounded backward derivation search. Complete within its budget: rule
// applications are enumerated backward from the goal judgement; cut types and
// introduction components are drawn from the ∩/∪ closure of the subformulas
// of the goal's context types, bounded by the universe size. A documented
// heuristic in the spirit of subformula refutations, not a decision
// procedure.

struct SearchBudget {
  int depth = 6;
  int universe = 12;     // max candidate types
  long max_nodes = 200000;  // explored judgement bound
};

struct SearchResult {
  DerivPtr derivation;   // null when exhausted
  bool exhausted_budget = false;  // node bound hit (verdict unreliable)
  long explored = 0;
};

namespace detail {

struct Searcher {
  System sys;
  SearchBudget budget;
  long explored = 0;
  bool node_bound_hit = false;
  std::vector<TypePtr> universe;
  // memo: judgement key -> depth at which search failed (≥ remaining depth
  // means a retry is pointless)
  std::map<std::string, int> failed_at;

  std::string key(const NetPtr& net, const Ctx& g, const Ctx& d) {
    return canonical_print(net) + " ; " + print_ctx(g) + " ; " + print_ctx(d);
  }

  void build_universe(const Ctx& gamma, const Ctx& delta) {
    std::vector<TypePtr> base;
    std::set<std::string> seen;
    auto add = [&](const TypePtr& t) {
      TypePtr n = normalize(t);
      std::string k = print_type(n);
      if (seen.insert(k).second) base.push_back(n);
    };
    std::function<void(const TypePtr&)> subs = [&](const TypePtr& t) {
      add(t);
      if (t->kind == TypeKind::Arrow || t->kind == TypeKind::Inter ||
          t->kind == TypeKind::Union) {
        subs(t->lhs);
        subs(t->rhs);
      }
    };
    for (auto& [_, t] : gamma) subs(t);
    for (auto& [_, t] : delta) subs(t);
    add(Type::top());
    add(Type::bot());
    // Close under pairwise ∩/∪, smallest combinations first, until the size
    // bound: the subformula-style candidates a refutation argument consults
    // are the small ones.
    std::function<int(const TypePtr&)> nodes = [&nodes](const TypePtr& t) -> int {
      if (t->kind == TypeKind::Arrow || t->kind == TypeKind::Inter || t->kind == TypeKind::Union)
        return 1 + nodes(t->lhs) + nodes(t->rhs);
      return 1;
    };
    std::vector<TypePtr> combos;
    std::set<std::string> combo_seen = seen;
    for (size_t i = 0; i < base.size(); ++i)
      for (size_t j = 0; j < base.size(); ++j) {
        for (TypePtr t : {Type::inter(base[i], base[j]), Type::uni(base[i], base[j])}) {
          TypePtr nt = normalize(t);
          if (combo_seen.insert(print_type(nt)).second) combos.push_back(nt);
        }
      }
    std::sort(combos.begin(), combos.end(), [&](const TypePtr& a, const TypePtr& b) {
      int na = nodes(a), nb = nodes(b);
      if (na != nb) return na < nb;
      return print_type(a) < print_type(b);
    });
    universe = base;
    for (auto& t : combos) {
      if (static_cast<int>(universe.size()) >= budget.universe) break;
      universe.push_back(t);
    }
  }

  DerivPtr search(const NetPtr& net, const Ctx& gamma, const Ctx& delta, int depth) {
    if (++explored > budget.max_nodes) {
      node_bound_hit = true;
      return nullptr;
    }
    std::string k = key(net, gamma, delta);
    auto it = failed_at.find(k);
    if (it != failed_at.end() && it->second >= depth) return nullptr;
    DerivPtr out = attempt(net, gamma, delta, depth);
    if (!out) {
      auto& slot = failed_at[k];
      if (slot < depth) slot = depth;
    }
    return out;
  }

  DerivPtr attempt(const NetPtr& net, const Ctx& gamma, const Ctx& delta, int depth) {
    if (depth <= 0) return nullptr;
    // (BOT)/(TOP) leaves.
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
    switch (net->kind) {
      case NetKind::Capsule: {
        TypePtr g = ctx_get(gamma, net->src);
        TypePtr d = ctx_get(delta, net->dst);
        if (g && d && ax_mediated(g, d)) return mk_ax(sys, net, gamma, delta);
        break;
      }
      case NetKind::Export: {
        // arrR backward: choose the arrow among the ∪ spine of the out type.
        TypePtr out_t = ctx_get(delta, net->out);
        if (!out_t) break;
        auto spine = union_spine(out_t);
        std::vector<std::pair<TypePtr, TypePtr>> options;  // arrow, rest
        for (size_t i = 0; i < spine.size(); ++i) {
          if (spine[i]->kind != TypeKind::Arrow) continue;
          std::vector<TypePtr> rest;
          for (size_t j = 0; j < spine.size(); ++j)
            if (j != i) rest.push_back(spine[j]);
          options.push_back({spine[i], rest.empty() ? nullptr : make_union(rest)});
          options.push_back({spine[i], out_t});  // the arrow may repeat in the premise
        }
        for (auto& [arrow, rest] : options) {
          Ctx g2 = ctx_with(gamma, net->bind_socket, arrow->lhs);
          Ctx d2 = delta;
          d2.erase(net->out);
          if (rest) d2[net->out] = normalize(rest);
          d2[net->bind_plug] = normalize(arrow->rhs);
          if (DerivPtr p = search(net->body, g2, d2, depth - 1)) {
            DerivPtr cand = mk_arr_r(net, p);
            if (ctx_equal(cand->conclusion.gamma, gamma) &&
                ctx_equal(cand->conclusion.delta, delta))
              return cand;
          }
        }
        break;
      }
      case NetKind::Import: {
        TypePtr mid_t = ctx_get(gamma, net->mid);
        if (!mid_t) break;
        auto spine = inter_spine(mid_t);
        std::vector<std::pair<TypePtr, TypePtr>> options;
        for (size_t i = 0; i < spine.size(); ++i) {
          if (spine[i]->kind != TypeKind::Arrow) continue;
          std::vector<TypePtr> rest;
          for (size_t j = 0; j < spine.size(); ++j)
            if (j != i) rest.push_back(spine[j]);
          options.push_back({spine[i], rest.empty() ? nullptr : make_inter(rest)});
          options.push_back({spine[i], mid_t});
        }
        for (auto& [arrow, rest] : options) {
          Ctx shared = gamma;
          shared.erase(net->mid);
          if (rest) shared[net->mid] = normalize(rest);
          Ctx g1 = shared;
          Ctx d1 = ctx_with(delta, net->bind_plug_l, arrow->lhs);
          Ctx g2 = ctx_with(shared, net->bind_sock_r, arrow->rhs);
          DerivPtr p1 = search(net->left, g1, d1, depth - 1);
          if (!p1) continue;
          DerivPtr p2 = search(net->right, g2, delta, depth - 1);
          if (!p2) continue;
          DerivPtr cand = mk_arr_l(net, p1, p2);
          if (ctx_equal(cand->conclusion.gamma, gamma) &&
              ctx_equal(cand->conclusion.delta, delta))
            return cand;
        }
        break;
      }
      case NetKind::Cut: {
        for (auto& a : universe) {
          if (sys == System::CBN && net->act == Activation::Left &&
              (is_intersection_kind(a) || !introduces_socket(net->right, net->cut_sock)))
            continue;
          if (sys == System::CBV && net->act == Activation::Right &&
              (is_union_kind(a) || !introduces_plug(net->left, net->cut_plug)))
            continue;
          Ctx d1 = ctx_with(delta, net->cut_plug, a);
          DerivPtr p1 = search(net->left, gamma, d1, depth - 1);
          if (!p1) continue;
          Ctx g2 = ctx_with(gamma, net->cut_sock, a);
          DerivPtr p2 = search(net->right, g2, delta, depth - 1);
          if (!p2) continue;
          DerivPtr cand = mk_cut(net, p1, p2);
          if (ctx_equal(cand->conclusion.gamma, gamma) &&
              ctx_equal(cand->conclusion.delta, delta))
            return cand;
        }
        break;
      }
    }
    // interR: split an intersection statement on a plug (n = spine size).
    for (auto& [p, t] : delta) {
      auto spine = inter_spine(normalize(t));
      if (spine.size() < 2) continue;
      if (sys == System::CBV && !introduces_plug(net, p)) continue;
      std::vector<DerivPtr> parts;
      bool ok = true;
      for (auto& comp : spine) {
        DerivPtr b = search(net, gamma, ctx_with(delta, p, comp), depth - 1);
        if (!b) {
          ok = false;
          break;
        }
        parts.push_back(b);
      }
      if (!ok) continue;
      DerivPtr cand = mk_inter_r(p, parts);
      if (ctx_equal(cand->conclusion.gamma, gamma) && ctx_equal(cand->conclusion.delta, delta))
        return cand;
    }
    // unionL dual.
    for (auto& [s, t] : gamma) {
      auto spine = union_spine(normalize(t));
      if (spine.size() < 2) continue;
      if (sys == System::CBN && !introduces_socket(net, s)) continue;
      std::vector<DerivPtr> parts;
      bool ok = true;
      for (auto& comp : spine) {
        DerivPtr b = search(net, ctx_with(gamma, s, comp), delta, depth - 1);
        if (!b) {
          ok = false;
          break;
        }
        parts.push_back(b);
      }
      if (!ok) continue;
      DerivPtr cand = mk_union_l(s, parts);
      if (ctx_equal(cand->conclusion.gamma, gamma) && ctx_equal(cand->conclusion.delta, delta))
        return cand;
    }
    return nullptr;
  }
};

}  // namespace detail

inline SearchResult search_derivation(System sys, const NetPtr& net, const Ctx& gamma,
                                      const Ctx& delta, SearchBudget budget = {}) {
  detail::Searcher s;
  s.sys = sys;
  s.budget = budget;
  s.build_universe(gamma, delta);
  SearchResult res;
  res.derivation = s.search(net, normalize_ctx(gamma), normalize_ctx(delta), budget.depth);
  res.exhausted_budget = s.node_bound_hit;
  res.explored = s.explored;
  return res;
}

}  // namespace xcalc
