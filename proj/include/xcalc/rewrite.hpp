#pragma once

#include <deque>
#include <queue>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "xcalc/net.hpp"

namespace xcalc {

enum class Regime { Full, CBN, CBV };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Full: return "full";
    case Regime::CBN: return "cbn";
    case Regime::CBV: return "cbv";
  }
  return "?";
}

inline std::optional<Regime> regime_from_name(const std::string& s) {
  if (s == "full") return Regime::Full;
  if (s == "cbn") return Regime::CBN;
  if (s == "cbv") return Regime::CBV;
  return std::nullopt;
}

// Order fixes the deterministic-first tie break.
enum class RuleId {
  Ax,
  ExpR,
  ImpL,
  ExpImpLeftAssoc,   // (cut Q g+y P) b+z R   — the CBN bracketing
  ExpImpRightAssoc,  // cut Q g+y (cut P b+z R) — the CBV bracketing
  ActL,
  ActR,
  DL_d,
  DL_cap,
  DL_expOuts,
  DL_expIns,
  DL_imp,
  DL_cut,
  DR_d,
  DR_cap,
  DR_exp,
  DR_impOuts,
  DR_impIns,
  DR_cut,
  GC_L,
  GC_R,
  Ren_L,
  Ren_R,
};

inline bool rule_admissible(RuleId r) {
  return r == RuleId::GC_L || r == RuleId::GC_R || r == RuleId::Ren_L || r == RuleId::Ren_R;
}

inline const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::Ax: return "Ax";
    case RuleId::ExpR: return "ExpR";
    case RuleId::ImpL: return "ImpL";
    case RuleId::ExpImpLeftAssoc: return "ExpImpLeftAssoc";
    case RuleId::ExpImpRightAssoc: return "ExpImpRightAssoc";
    case RuleId::ActL: return "ActL";
    case RuleId::ActR: return "ActR";
    case RuleId::DL_d: return "DL_d";
    case RuleId::DL_cap: return "DL_cap";
    case RuleId::DL_expOuts: return "DL_expOuts";
    case RuleId::DL_expIns: return "DL_expIns";
    case RuleId::DL_imp: return "DL_imp";
    case RuleId::DL_cut: return "DL_cut";
    case RuleId::DR_d: return "DR_d";
    case RuleId::DR_cap: return "DR_cap";
    case RuleId::DR_exp: return "DR_exp";
    case RuleId::DR_impOuts: return "DR_impOuts";
    case RuleId::DR_impIns: return "DR_impIns";
    case RuleId::DR_cut: return "DR_cut";
    case RuleId::GC_L: return "GC_L";
    case RuleId::GC_R: return "GC_R";
    case RuleId::Ren_L: return "Ren_L";
    case RuleId::Ren_R: return "Ren_R";
  }
  return "?";
}

struct Redex {
  Path position;
  RuleId rule;
};

// ---------------------------------------------------------------------------
// Rule matching at one node.

namespace detail {

inline void match_at(const NetPtr& n, const Path& here, Regime regime, bool include_admissible,
                     std::vector<Redex>& out) {
  if (n->kind != NetKind::Cut) return;
  const NetPtr& P = n->left;
  const NetPtr& Q = n->right;
  const std::string& a = n->cut_plug;
  const std::string& x = n->cut_sock;

  if (n->act == Activation::None) {
    bool a_intro = introduces_plug(P, a);
    bool x_intro = introduces_socket(Q, x);
    if (a_intro && x_intro) {
      bool p_cap = is_capsule(P), p_exp = is_export(P);
      bool q_cap = is_capsule(Q), q_imp = is_import(Q);
      if (p_cap && q_cap) out.push_back({here, RuleId::Ax});
      if (p_exp && q_cap) out.push_back({here, RuleId::ExpR});
      if (p_cap && q_imp) out.push_back({here, RuleId::ImpL});
      if (p_exp && q_imp) {
        if (regime != Regime::CBV) out.push_back({here, RuleId::ExpImpLeftAssoc});
        if (regime != Regime::CBN) out.push_back({here, RuleId::ExpImpRightAssoc});
      }
    }
    bool actl = !a_intro;
    bool actr = !x_intro;
    if (regime == Regime::CBN) actl = !a_intro && x_intro;
    if (regime == Regime::CBV) actr = a_intro && !x_intro;
    if (actl) out.push_back({here, RuleId::ActL});
    if (actr) out.push_back({here, RuleId::ActR});
    if (include_admissible) {
      if (is_capsule(Q) && Q->src == x) out.push_back({here, RuleId::Ren_L});
      if (is_capsule(P) && P->dst == a) out.push_back({here, RuleId::Ren_R});
    }
  } else if (n->act == Activation::Left) {
    if (is_capsule(P)) {
      if (P->dst == a)
        out.push_back({here, RuleId::DL_d});
      else
        out.push_back({here, RuleId::DL_cap});
    } else if (is_export(P)) {
      if (P->out == a)
        out.push_back({here, RuleId::DL_expOuts});
      else
        out.push_back({here, RuleId::DL_expIns});
    } else if (is_import(P)) {
      out.push_back({here, RuleId::DL_imp});
    } else if (is_cut(P) && P->act == Activation::None) {
      out.push_back({here, RuleId::DL_cut});
    }
    if (include_admissible && free_plugs(P).count(a) == 0) out.push_back({here, RuleId::GC_L});
  } else {  // Activation::Right
    if (is_capsule(Q)) {
      if (Q->src == x)
        out.push_back({here, RuleId::DR_d});
      else
        out.push_back({here, RuleId::DR_cap});
    } else if (is_export(Q)) {
      out.push_back({here, RuleId::DR_exp});
    } else if (is_import(Q)) {
      if (Q->mid == x)
        out.push_back({here, RuleId::DR_impOuts});
      else
        out.push_back({here, RuleId::DR_impIns});
    } else if (is_cut(Q) && Q->act == Activation::None) {
      out.push_back({here, RuleId::DR_cut});
    }
    if (include_admissible && free_sockets(Q).count(x) == 0) out.push_back({here, RuleId::GC_R});
  }
}

inline void find_walk(const NetPtr& n, Path& here, Regime regime, bool adm,
                      std::vector<Redex>& out) {
  match_at(n, here, regime, adm, out);
  switch (n->kind) {
    case NetKind::Capsule:
      break;
    case NetKind::Export:
      here.push_back(0);
      find_walk(n->body, here, regime, adm, out);
      here.pop_back();
      break;
    case NetKind::Import:
    case NetKind::Cut:
      here.push_back(0);
      find_walk(n->left, here, regime, adm, out);
      here.pop_back();
      here.push_back(1);
      find_walk(n->right, here, regime, adm, out);
      here.pop_back();
      break;
  }
}

}  // namespace detail

inline std::vector<Redex> find_redexes(const NetPtr& n, Regime regime,
                                       bool include_admissible = false) {
  std::vector<Redex> out;
  Path here;
  detail::find_walk(n, here, regime, include_admissible, out);
  return out;
}

// ---------------------------------------------------------------------------
// Firing a rule. The redex is re-validated against the current net; fresh
// names come from `gen` (pre-seeded with every name in the net); the result
// is re-established in Barendregt form.

struct StaleRedex : std::runtime_error {
  StaleRedex(RuleId r, const Path& p)
      : std::runtime_error(std::string("stale redex: ") + rule_name(r) + " @ " + print_path(p)) {}
};

namespace detail {

inline NetPtr fire(const NetPtr& n, RuleId rule, NameGen& gen) {
  const NetPtr& P = n->kind == NetKind::Cut ? n->left : n;
  const NetPtr& Q = n->kind == NetKind::Cut ? n->right : n;
  const std::string& a = n->cut_plug;
  const std::string& x = n->cut_sock;
  auto cutL = [](NetPtr l, const std::string& bp, const std::string& bs, NetPtr r) {
    return Net::cut(std::move(l), bp, Activation::Left, bs, std::move(r));
  };
  auto cutR = [](NetPtr l, const std::string& bp, const std::string& bs, NetPtr r) {
    return Net::cut(std::move(l), bp, Activation::Right, bs, std::move(r));
  };
  auto cut0 = [](NetPtr l, const std::string& bp, const std::string& bs, NetPtr r) {
    return Net::cut(std::move(l), bp, Activation::None, bs, std::move(r));
  };
  switch (rule) {
    case RuleId::Ax:
      // <y.a> a + x <x.b>  ->  <y.b>
      return Net::capsule(P->src, Q->dst);
    case RuleId::ExpR:
      // (y^ B b^ . a) a + x <x.g>  ->  y^ B b^ . g
      return Net::exp(P->bind_socket, P->body, P->bind_plug, Q->dst);
    case RuleId::ImpL:
      // <y.a> a + x (B b^ [x] z^ C)  ->  B b^ [y] z^ C
      return Net::imp(Q->left, Q->bind_plug_l, P->src, Q->bind_sock_r, Q->right);
    case RuleId::ExpImpLeftAssoc:
      // (y^ Pb b^ . a) a + x (Qg g^ [x] z^ R)  ->  (Qg g^ + y Pb) b^ + z R
      return cut0(cut0(Q->left, Q->bind_plug_l, P->bind_socket, P->body), P->bind_plug,
                  Q->bind_sock_r, Q->right);
    case RuleId::ExpImpRightAssoc:
      //                                        ->  Qg g^ + y (Pb b^ + z R)
      return cut0(Q->left, Q->bind_plug_l, P->bind_socket,
                  cut0(P->body, P->bind_plug, Q->bind_sock_r, Q->right));
    case RuleId::ActL:
      return cutL(P, a, x, Q);
    case RuleId::ActR:
      return cutR(P, a, x, Q);
    case RuleId::DL_d:
      return cut0(P, a, x, Q);
    case RuleId::DL_cap:
      return P;
    case RuleId::DL_expOuts: {
      // (y^ B b^ . a) a <+ x Q -> (y^ (B a <+ x Q) b^ . g) g + x Q,  g fresh
      std::string g = gen.fresh_plug();
      return cut0(Net::exp(P->bind_socket, cutL(P->body, a, x, Q), P->bind_plug, g), g, x, Q);
    }
    case RuleId::DL_expIns:
      // (y^ B b^ . g) a <+ x Q -> y^ (B a <+ x Q) b^ . g,  g != a
      return Net::exp(P->bind_socket, cutL(P->body, a, x, Q), P->bind_plug, P->out);
    case RuleId::DL_imp:
      // (B b^ [z] y^ C) a <+ x Q -> (B a <+ x Q) b^ [z] y^ (C a <+ x Q)
      return Net::imp(cutL(P->left, a, x, Q), P->bind_plug_l, P->mid, P->bind_sock_r,
                      cutL(P->right, a, x, Q));
    case RuleId::DL_cut:
      return cut0(cutL(P->left, a, x, Q), P->cut_plug, P->cut_sock, cutL(P->right, a, x, Q));
    case RuleId::DR_d:
      return cut0(P, a, x, Q);
    case RuleId::DR_cap:
      return Q;
    case RuleId::DR_exp:
      // P a +> x (y^ B b^ . g) -> y^ (P a +> x B) b^ . g
      return Net::exp(Q->bind_socket, cutR(P, a, x, Q->body), Q->bind_plug, Q->out);
    case RuleId::DR_impOuts: {
      // P a +> x (B b^ [x] y^ C) -> P a + z ((P a +> x B) b^ [z] y^ (P a +> x C)),  z fresh
      std::string z = gen.fresh_socket();
      return cut0(P, a, z,
                  Net::imp(cutR(P, a, x, Q->left), Q->bind_plug_l, z, Q->bind_sock_r,
                           cutR(P, a, x, Q->right)));
    }
    case RuleId::DR_impIns:
      return Net::imp(cutR(P, a, x, Q->left), Q->bind_plug_l, Q->mid, Q->bind_sock_r,
                      cutR(P, a, x, Q->right));
    case RuleId::DR_cut:
      return cut0(cutR(P, a, x, Q->left), Q->cut_plug, Q->cut_sock, cutR(P, a, x, Q->right));
    case RuleId::GC_L:
      return P;
    case RuleId::GC_R:
      return Q;
    case RuleId::Ren_L:
      // P d + z <z.a> -> P[a/d]
      return rename_free(P, {}, {{a, Q->dst}});
    case RuleId::Ren_R:
      // <z.a> a + x Q -> Q[z/x]
      return rename_free(Q, {{x, P->src}}, {});
  }
  throw std::logic_error("fire: unhandled rule");
}

}  // namespace detail

inline NetPtr step(const NetPtr& n, const Redex& r, NameGen& gen) {
  auto candidates = find_redexes(n, Regime::Full, true);
  bool ok = false;
  for (auto& c : candidates)
    if (c.position == r.position && c.rule == r.rule) ok = true;
  if (!ok) throw StaleRedex(r.rule, r.position);
  for (const auto& name : all_names(n)) gen.mark_used(name);
  NetPtr sub = subnet_at(n, r.position);
  NetPtr replaced = replace_at(n, r.position, detail::fire(sub, r.rule, gen));
  return barendregt(replaced, gen);
}

inline NetPtr step(const NetPtr& n, const Redex& r) {
  NameGen gen;
  return step(n, r, gen);
}

// ---------------------------------------------------------------------------
// Multi-step reduction with named-rule traces.

enum class Choose { DeterministicFirst, Random };

struct TraceStep {
  Redex redex;
  NetPtr result;
};

struct Trace {
  NetPtr start;
  std::vector<TraceStep> steps;
  bool fuel_exhausted = false;

  NetPtr final_net() const { return steps.empty() ? start : steps.back().result; }
};

// Among the redexes with the lowest rule ordinal, the leftmost-outermost
// position wins. Rule-major ordering lets renaming cuts resolve before the
// duplicating propagation steps; position-major diverges on nets as small as
// the translated self-application.
inline bool redex_order(const Redex& a, const Redex& b) {
  if (a.rule != b.rule) return static_cast<int>(a.rule) < static_cast<int>(b.rule);
  return a.position < b.position;
}

inline Trace reduce(const NetPtr& start, Regime regime, int fuel = 10000,
                    Choose choose = Choose::DeterministicFirst, unsigned seed = 0,
                    bool include_admissible = false) {
  Trace tr;
  tr.start = start;
  NetPtr cur = start;
  NameGen gen;
  std::mt19937 rng(seed);
  for (int k = 0; k < fuel; ++k) {
    auto redexes = find_redexes(cur, regime, include_admissible);
    if (redexes.empty()) return tr;
    Redex pick = redexes[0];
    if (choose == Choose::DeterministicFirst) {
      for (auto& r : redexes)
        if (redex_order(r, pick)) pick = r;
    } else {
      pick = redexes[std::uniform_int_distribution<size_t>(0, redexes.size() - 1)(rng)];
    }
    cur = step(cur, pick, gen);
    tr.steps.push_back({pick, cur});
  }
  if (!find_redexes(cur, regime, include_admissible).empty()) tr.fuel_exhausted = true;
  return tr;
}

inline std::string print_trace(const Trace& tr) {
  std::string s = "START: " + print_net(tr.start) + "\n";
  int k = 1;
  for (auto& st : tr.steps) {
    s += "STEP " + std::to_string(k++) + ": " + rule_name(st.redex.rule) + " @ " +
         print_path(st.redex.position) + "  ==>  " + print_net(st.result) + "\n";
  }
  if (tr.fuel_exhausted) s += "FUEL EXHAUSTED\n";
  return s;
}

// ---------------------------------------------------------------------------
// Reduction graph: BFS closure of `step` modulo alpha.

struct ReductionGraph {
  std::vector<NetPtr> nodes;                      // representative per alpha class
  std::map<std::string, int> index;               // canonical print -> node id
  std::vector<std::vector<std::pair<int, RuleId>>> edges;
  std::vector<bool> expanded;                     // outgoing edges computed
  std::vector<bool> reducible;                    // had at least one redex
  bool truncated = false;

  // Normal forms among the expanded nodes; frontier nodes of a truncated
  // exploration do not count.
  std::vector<int> sinks() const {
    std::vector<int> out;
    for (size_t i = 0; i < edges.size(); ++i)
      if (expanded[i] && !reducible[i]) out.push_back(static_cast<int>(i));
    return out;
  }
  bool contains(const NetPtr& n) const { return index.count(canonical_print(n)) > 0; }
};

inline ReductionGraph reduction_graph(const NetPtr& start, Regime regime, int node_budget = 5000,
                                      bool include_admissible = false) {
  ReductionGraph g;
  auto intern = [&g](const NetPtr& n) {
    std::string key = canonical_print(n);
    auto it = g.index.find(key);
    if (it != g.index.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    g.index[key] = id;
    g.nodes.push_back(n);
    g.edges.emplace_back();
    g.expanded.push_back(false);
    g.reducible.push_back(false);
    return id;
  };
  // Smallest-net-first worklist: the complete closure is order independent,
  // and a truncated exploration still hunts down the normal forms, which sit
  // at small sizes.
  std::priority_queue<std::pair<int, int>, std::vector<std::pair<int, int>>, std::greater<>> todo;
  auto push = [&](int id) { todo.push({net_size(g.nodes[id]), id}); };
  push(intern(start));
  while (!todo.empty()) {
    int id = todo.top().second;
    todo.pop();
    NetPtr n = g.nodes[id];
    g.expanded[id] = true;
    auto redexes = find_redexes(n, regime, include_admissible);
    g.reducible[id] = !redexes.empty();
    for (auto& r : redexes) {
      NameGen gen;
      NetPtr next = step(n, r, gen);
      bool fresh = g.index.count(canonical_print(next)) == 0;
      if (fresh && static_cast<int>(g.nodes.size()) >= node_budget) {
        g.truncated = true;
        continue;
      }
      int nid = intern(next);
      g.edges[id].push_back({nid, r.rule});
      if (fresh) push(nid);
    }
  }
  return g;
}

// True when `target` is reachable (mod alpha) from `start` in the regime;
// explores smallest nets first, up to node_budget distinct nets.
inline bool reachable(const NetPtr& start, const NetPtr& target, Regime regime,
                      int node_budget = 20000, bool include_admissible = false) {
  std::string goal = canonical_print(target);
  if (canonical_print(start) == goal) return true;
  std::set<std::string> seen{canonical_print(start)};
  std::priority_queue<std::pair<int, NetPtr>, std::vector<std::pair<int, NetPtr>>,
                      decltype([](const auto& a, const auto& b) { return a.first > b.first; })>
      todo;
  todo.push({net_size(start), start});
  while (!todo.empty() && static_cast<int>(seen.size()) <= node_budget) {
    NetPtr n = todo.top().second;
    todo.pop();
    for (auto& r : find_redexes(n, regime, include_admissible)) {
      NameGen gen;
      NetPtr next = step(n, r, gen);
      std::string key = canonical_print(next);
      if (key == goal) return true;
      if (seen.insert(key).second) todo.push({net_size(next), next});
    }
  }
  return false;
}

}  // namespace xcalc
