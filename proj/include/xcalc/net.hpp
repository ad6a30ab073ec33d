#pragma once

#include <cassert>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "xcalc/names.hpp"

namespace xcalc {

enum class NetKind { Capsule, Export, Import, Cut };
enum class Activation { None, Left, Right };

struct Net;
using NetPtr = std::shared_ptr<const Net>;

// A net of the X calculus. Immutable; share freely.
//
//   Capsule <s.p>            src=s, dst=p
//   Export  s^ (B) p^ . out  bindSocket=s, bindPlug=p (both bound in B), out free
//   Import  (L) p^ [m] s^ (R)  bindPlugL=p bound in L, mid m free, bindSockR=s bound in R
//   Cut     (L) p^ OP s^ (R)   bindPlug=p bound in L, bindSocket=s bound in R
struct Net {
  NetKind kind;
  Activation act = Activation::None;  // cuts only

  // Capsule
  std::string src, dst;
  // Export
  std::string bind_socket, bind_plug, out;
  NetPtr body;
  // Import / Cut
  NetPtr left, right;
  std::string bind_plug_l, mid, bind_sock_r;  // import
  std::string cut_plug, cut_sock;             // cut

  static NetPtr capsule(std::string s, std::string p) {
    auto n = std::make_shared<Net>();
    n->kind = NetKind::Capsule;
    n->src = std::move(s);
    n->dst = std::move(p);
    return n;
  }
  static NetPtr exp(std::string bind_s, NetPtr body, std::string bind_p, std::string out) {
    auto n = std::make_shared<Net>();
    n->kind = NetKind::Export;
    n->bind_socket = std::move(bind_s);
    n->body = std::move(body);
    n->bind_plug = std::move(bind_p);
    n->out = std::move(out);
    return n;
  }
  static NetPtr imp(NetPtr l, std::string bp, std::string m, std::string bs, NetPtr r) {
    auto n = std::make_shared<Net>();
    n->kind = NetKind::Import;
    n->left = std::move(l);
    n->bind_plug_l = std::move(bp);
    n->mid = std::move(m);
    n->bind_sock_r = std::move(bs);
    n->right = std::move(r);
    return n;
  }
  static NetPtr cut(NetPtr l, std::string bp, Activation a, std::string bs, NetPtr r) {
    auto n = std::make_shared<Net>();
    n->kind = NetKind::Cut;
    n->act = a;
    n->left = std::move(l);
    n->cut_plug = std::move(bp);
    n->cut_sock = std::move(bs);
    n->right = std::move(r);
    return n;
  }
};

inline bool is_capsule(const NetPtr& n) { return n->kind == NetKind::Capsule; }
inline bool is_export(const NetPtr& n) { return n->kind == NetKind::Export; }
inline bool is_import(const NetPtr& n) { return n->kind == NetKind::Import; }
inline bool is_cut(const NetPtr& n) { return n->kind == NetKind::Cut; }

inline void collect_free_sockets(const NetPtr& n, std::set<std::string>& out) {
  switch (n->kind) {
    case NetKind::Capsule:
      out.insert(n->src);
      break;
    case NetKind::Export: {
      std::set<std::string> b;
      collect_free_sockets(n->body, b);
      b.erase(n->bind_socket);
      out.insert(b.begin(), b.end());
      break;
    }
    case NetKind::Import: {
      collect_free_sockets(n->left, out);
      out.insert(n->mid);
      std::set<std::string> r;
      collect_free_sockets(n->right, r);
      r.erase(n->bind_sock_r);
      out.insert(r.begin(), r.end());
      break;
    }
    case NetKind::Cut: {
      collect_free_sockets(n->left, out);
      std::set<std::string> r;
      collect_free_sockets(n->right, r);
      r.erase(n->cut_sock);
      out.insert(r.begin(), r.end());
      break;
    }
  }
}

inline void collect_free_plugs(const NetPtr& n, std::set<std::string>& out) {
  switch (n->kind) {
    case NetKind::Capsule:
      out.insert(n->dst);
      break;
    case NetKind::Export: {
      std::set<std::string> b;
      collect_free_plugs(n->body, b);
      b.erase(n->bind_plug);
      out.insert(b.begin(), b.end());
      out.insert(n->out);
      break;
    }
    case NetKind::Import: {
      std::set<std::string> l;
      collect_free_plugs(n->left, l);
      l.erase(n->bind_plug_l);
      out.insert(l.begin(), l.end());
      collect_free_plugs(n->right, out);
      break;
    }
    case NetKind::Cut: {
      std::set<std::string> l;
      collect_free_plugs(n->left, l);
      l.erase(n->cut_plug);
      out.insert(l.begin(), l.end());
      collect_free_plugs(n->right, out);
      break;
    }
  }
}

inline std::set<std::string> free_sockets(const NetPtr& n) {
  std::set<std::string> s;
  collect_free_sockets(n, s);
  return s;
}

inline std::set<std::string> free_plugs(const NetPtr& n) {
  std::set<std::string> s;
  collect_free_plugs(n, s);
  return s;
}

// All names occurring in n, bound or free, either namespace.
inline void collect_all_names(const NetPtr& n, std::set<std::string>& out) {
  switch (n->kind) {
    case NetKind::Capsule:
      out.insert(n->src);
      out.insert(n->dst);
      break;
    case NetKind::Export:
      out.insert(n->bind_socket);
      out.insert(n->bind_plug);
      out.insert(n->out);
      collect_all_names(n->body, out);
      break;
    case NetKind::Import:
      out.insert(n->bind_plug_l);
      out.insert(n->mid);
      out.insert(n->bind_sock_r);
      collect_all_names(n->left, out);
      collect_all_names(n->right, out);
      break;
    case NetKind::Cut:
      out.insert(n->cut_plug);
      out.insert(n->cut_sock);
      collect_all_names(n->left, out);
      collect_all_names(n->right, out);
      break;
  }
}

inline std::set<std::string> all_names(const NetPtr& n) {
  std::set<std::string> s;
  collect_all_names(n, s);
  return s;
}

// P introduces x: P = <x.a>, or an import with mid x and x not free in
// either subnet.
inline bool introduces_socket(const NetPtr& n, const std::string& x) {
  if (n->kind == NetKind::Capsule) return n->src == x;
  if (n->kind == NetKind::Import) {
    if (n->mid != x) return false;
    return free_sockets(n->left).count(x) == 0 && free_sockets(n->right).count(x) == 0;
  }
  return false;
}

// P introduces a: P = <x.a>, or an export creating a with a not free in the body.
inline bool introduces_plug(const NetPtr& n, const std::string& a) {
  if (n->kind == NetKind::Capsule) return n->dst == a;
  if (n->kind == NetKind::Export) {
    if (n->out != a) return false;
    return free_plugs(n->body).count(a) == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing. Non-capsule subnets are always parenthesised, capsules never;
// that makes print injective on the grammar and round-trippable.

inline std::string print_net(const NetPtr& n);

inline std::string print_operand(const NetPtr& n) {
  if (is_capsule(n)) return print_net(n);
  return "(" + print_net(n) + ")";
}

inline std::string print_net(const NetPtr& n) {
  switch (n->kind) {
    case NetKind::Capsule:
      return "<" + n->src + "." + n->dst + ">";
    case NetKind::Export:
      return n->bind_socket + "^ " + print_operand(n->body) + " " + n->bind_plug + "^ . " + n->out;
    case NetKind::Import:
      return print_operand(n->left) + " " + n->bind_plug_l + "^ [" + n->mid + "] " +
             n->bind_sock_r + "^ " + print_operand(n->right);
    case NetKind::Cut: {
      const char* op = n->act == Activation::None ? "+" : n->act == Activation::Left ? "<+" : "+>";
      return print_operand(n->left) + " " + n->cut_plug + "^ " + op + " " + n->cut_sock + "^ " +
             print_operand(n->right);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Substitution on names. `smap`/`pmap` rename free occurrences; binders are
// untouched (callers keep maps clear of bound names, or pre-refresh).

inline NetPtr rename_free(const NetPtr& n, std::map<std::string, std::string> smap,
                          std::map<std::string, std::string> pmap) {
  if (smap.empty() && pmap.empty()) return n;
  auto sub_s = [&smap](const std::string& x) {
    auto it = smap.find(x);
    return it == smap.end() ? x : it->second;
  };
  auto sub_p = [&pmap](const std::string& a) {
    auto it = pmap.find(a);
    return it == pmap.end() ? a : it->second;
  };
  switch (n->kind) {
    case NetKind::Capsule:
      return Net::capsule(sub_s(n->src), sub_p(n->dst));
    case NetKind::Export: {
      auto smap2 = smap;
      auto pmap2 = pmap;
      smap2.erase(n->bind_socket);
      pmap2.erase(n->bind_plug);
      return Net::exp(n->bind_socket, rename_free(n->body, smap2, pmap2), n->bind_plug,
                      sub_p(n->out));
    }
    case NetKind::Import: {
      auto pmap_l = pmap;
      pmap_l.erase(n->bind_plug_l);
      auto smap_r = smap;
      smap_r.erase(n->bind_sock_r);
      return Net::imp(rename_free(n->left, smap, pmap_l), n->bind_plug_l, sub_s(n->mid),
                      n->bind_sock_r, rename_free(n->right, smap_r, pmap));
    }
    case NetKind::Cut: {
      auto pmap_l = pmap;
      pmap_l.erase(n->cut_plug);
      auto smap_r = smap;
      smap_r.erase(n->cut_sock);
      return Net::cut(rename_free(n->left, smap, pmap_l), n->cut_plug, n->act, n->cut_sock,
                      rename_free(n->right, smap_r, pmap));
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Barendregt normalisation: every bound name distinct from every free name
// and from every other bound name. Binders whose name clashes with anything
// already seen are refreshed from `gen`. Deterministic pre-order traversal.

namespace detail {

inline NetPtr barendregt_walk(const NetPtr& n, std::map<std::string, std::string> smap,
                              std::map<std::string, std::string> pmap,
                              std::set<std::string>& seen, NameGen& gen) {
  auto bind_socket = [&](const std::string& name, std::map<std::string, std::string>& sm) {
    std::string fresh = name;
    if (!seen.insert(name).second) {
      fresh = gen.fresh_socket();
      seen.insert(fresh);
    }
    if (fresh != name)
      sm[name] = fresh;
    else
      sm.erase(name);
    return fresh;
  };
  auto bind_plug = [&](const std::string& name, std::map<std::string, std::string>& pm) {
    std::string fresh = name;
    if (!seen.insert(name).second) {
      fresh = gen.fresh_plug();
      seen.insert(fresh);
    }
    if (fresh != name)
      pm[name] = fresh;
    else
      pm.erase(name);
    return fresh;
  };
  auto sub_s = [&smap](const std::string& x) {
    auto it = smap.find(x);
    return it == smap.end() ? x : it->second;
  };
  auto sub_p = [&pmap](const std::string& a) {
    auto it = pmap.find(a);
    return it == pmap.end() ? a : it->second;
  };
  switch (n->kind) {
    case NetKind::Capsule:
      return Net::capsule(sub_s(n->src), sub_p(n->dst));
    case NetKind::Export: {
      auto sm = smap;
      auto pm = pmap;
      std::string s = bind_socket(n->bind_socket, sm);
      std::string p = bind_plug(n->bind_plug, pm);
      return Net::exp(s, barendregt_walk(n->body, sm, pm, seen, gen), p, sub_p(n->out));
    }
    case NetKind::Import: {
      auto pm_l = pmap;
      std::string bp = bind_plug(n->bind_plug_l, pm_l);
      auto left = barendregt_walk(n->left, smap, pm_l, seen, gen);
      auto sm_r = smap;
      std::string bs = bind_socket(n->bind_sock_r, sm_r);
      auto right = barendregt_walk(n->right, sm_r, pmap, seen, gen);
      return Net::imp(left, bp, sub_s(n->mid), bs, right);
    }
    case NetKind::Cut: {
      auto pm_l = pmap;
      std::string bp = bind_plug(n->cut_plug, pm_l);
      auto left = barendregt_walk(n->left, smap, pm_l, seen, gen);
      auto sm_r = smap;
      std::string bs = bind_socket(n->cut_sock, sm_r);
      auto right = barendregt_walk(n->right, sm_r, pmap, seen, gen);
      return Net::cut(left, bp, n->act, bs, right);
    }
  }
  return n;
}

}  // namespace detail

inline NetPtr barendregt(const NetPtr& n, NameGen& gen) {
  std::set<std::string> seen = free_sockets(n);
  auto fp = free_plugs(n);
  seen.insert(fp.begin(), fp.end());
  // Fresh names must avoid every original name, bound ones included: a kept
  // binder deeper in the net must not collide with a replacement drawn here.
  for (const auto& name : all_names(n)) gen.mark_used(name);
  return detail::barendregt_walk(n, {}, {}, seen, gen);
}

inline bool is_barendregt(const NetPtr& n) {
  // Bound names pairwise distinct and distinct from all free names.
  std::set<std::string> frees = free_sockets(n);
  auto fp = free_plugs(n);
  frees.insert(fp.begin(), fp.end());
  std::set<std::string> bound;
  bool ok = true;
  std::function<void(const NetPtr&)> walk = [&](const NetPtr& m) {
    if (!ok) return;
    auto bind = [&](const std::string& b) {
      if (frees.count(b) || !bound.insert(b).second) ok = false;
    };
    switch (m->kind) {
      case NetKind::Capsule:
        break;
      case NetKind::Export:
        bind(m->bind_socket);
        bind(m->bind_plug);
        walk(m->body);
        break;
      case NetKind::Import:
        bind(m->bind_plug_l);
        bind(m->bind_sock_r);
        walk(m->left);
        walk(m->right);
        break;
      case NetKind::Cut:
        bind(m->cut_plug);
        bind(m->cut_sock);
        walk(m->left);
        walk(m->right);
        break;
    }
  };
  walk(n);
  return ok;
}

// ---------------------------------------------------------------------------
// Alpha equivalence via canonical renaming of bound connectors: binders are
// renamed, in pre-order, to the first v#/g# name not free in the net.

namespace detail {

struct CanonState {
  const std::set<std::string>* frees;
  unsigned long next_socket = 0;
  unsigned long next_plug = 0;
  std::string fresh_socket() {
    for (;;) {
      std::string c = "v" + std::to_string(next_socket++);
      if (!frees->count(c)) return c;
    }
  }
  std::string fresh_plug() {
    for (;;) {
      std::string c = "g" + std::to_string(next_plug++);
      if (!frees->count(c)) return c;
    }
  }
};

inline NetPtr canonical_walk(const NetPtr& n, std::map<std::string, std::string> smap,
                             std::map<std::string, std::string> pmap, CanonState& st) {
  auto sub_s = [&smap](const std::string& x) {
    auto it = smap.find(x);
    return it == smap.end() ? x : it->second;
  };
  auto sub_p = [&pmap](const std::string& a) {
    auto it = pmap.find(a);
    return it == pmap.end() ? a : it->second;
  };
  switch (n->kind) {
    case NetKind::Capsule:
      return Net::capsule(sub_s(n->src), sub_p(n->dst));
    case NetKind::Export: {
      auto sm = smap;
      auto pm = pmap;
      std::string s = st.fresh_socket();
      std::string p = st.fresh_plug();
      sm[n->bind_socket] = s;
      pm[n->bind_plug] = p;
      return Net::exp(s, canonical_walk(n->body, sm, pm, st), p, sub_p(n->out));
    }
    case NetKind::Import: {
      auto pm = pmap;
      std::string bp = st.fresh_plug();
      pm[n->bind_plug_l] = bp;
      auto left = canonical_walk(n->left, smap, pm, st);
      auto sm = smap;
      std::string bs = st.fresh_socket();
      sm[n->bind_sock_r] = bs;
      auto right = canonical_walk(n->right, sm, pmap, st);
      return Net::imp(left, bp, sub_s(n->mid), bs, right);
    }
    case NetKind::Cut: {
      auto pm = pmap;
      std::string bp = st.fresh_plug();
      pm[n->cut_plug] = bp;
      auto left = canonical_walk(n->left, smap, pm, st);
      auto sm = smap;
      std::string bs = st.fresh_socket();
      sm[n->cut_sock] = bs;
      auto right = canonical_walk(n->right, sm, pmap, st);
      return Net::cut(left, bp, n->act, bs, right);
    }
  }
  return n;
}

}  // namespace detail

inline NetPtr canonical(const NetPtr& n) {
  std::set<std::string> frees = free_sockets(n);
  auto fp = free_plugs(n);
  frees.insert(fp.begin(), fp.end());
  detail::CanonState st{&frees};
  return detail::canonical_walk(n, {}, {}, st);
}

inline std::string canonical_print(const NetPtr& n) { return print_net(canonical(n)); }

inline bool alpha_eq(const NetPtr& a, const NetPtr& b) {
  return canonical_print(a) == canonical_print(b);
}

inline bool net_equal(const NetPtr& a, const NetPtr& b) {
  return print_net(a) == print_net(b);
}

// ---------------------------------------------------------------------------
// Capture-free renaming of free occurrences. Refuses a target that would be
// captured by a binder (the caller should be in Barendregt form, where this
// cannot happen unless `to` is one of the bound names).

inline NetPtr rename_plug(const NetPtr& n, const std::string& from, const std::string& to) {
  if (from == to) return n;
  if (free_plugs(n).count(from) == 0)
    throw std::invalid_argument("rename_plug: '" + from + "' is not free in the net");
  std::set<std::string> names = all_names(n);
  auto fp = free_plugs(n);
  if (names.count(to) && !fp.count(to))
    throw std::invalid_argument("rename_plug: target '" + to + "' would be captured");
  return rename_free(n, {}, {{from, to}});
}

inline NetPtr rename_socket(const NetPtr& n, const std::string& from, const std::string& to) {
  if (from == to) return n;
  if (free_sockets(n).count(from) == 0)
    throw std::invalid_argument("rename_socket: '" + from + "' is not free in the net");
  std::set<std::string> names = all_names(n);
  auto fs = free_sockets(n);
  if (names.count(to) && !fs.count(to))
    throw std::invalid_argument("rename_socket: target '" + to + "' would be captured");
  return rename_free(n, {{from, to}}, {});
}

// ---------------------------------------------------------------------------
// Paths: child indices from the root. Export body = 0; import/cut left = 0,
// right = 1.

using Path = std::vector<int>;

inline std::string print_path(const Path& p) {
  if (p.empty()) return "root";
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(p[i]);
  }
  return s;
}

inline NetPtr subnet_at(const NetPtr& n, const Path& p, size_t from = 0) {
  if (from == p.size()) return n;
  int i = p[from];
  switch (n->kind) {
    case NetKind::Capsule:
      break;
    case NetKind::Export:
      if (i == 0) return subnet_at(n->body, p, from + 1);
      break;
    case NetKind::Import:
    case NetKind::Cut:
      if (i == 0) return subnet_at(n->left, p, from + 1);
      if (i == 1) return subnet_at(n->right, p, from + 1);
      break;
  }
  throw std::out_of_range("subnet_at: path does not exist");
}

inline NetPtr replace_at(const NetPtr& n, const Path& p, const NetPtr& sub, size_t from = 0) {
  if (from == p.size()) return sub;
  int i = p[from];
  switch (n->kind) {
    case NetKind::Capsule:
      break;
    case NetKind::Export:
      if (i == 0)
        return Net::exp(n->bind_socket, replace_at(n->body, p, sub, from + 1), n->bind_plug,
                        n->out);
      break;
    case NetKind::Import:
      if (i == 0)
        return Net::imp(replace_at(n->left, p, sub, from + 1), n->bind_plug_l, n->mid,
                        n->bind_sock_r, n->right);
      if (i == 1)
        return Net::imp(n->left, n->bind_plug_l, n->mid, n->bind_sock_r,
                        replace_at(n->right, p, sub, from + 1));
      break;
    case NetKind::Cut:
      if (i == 0)
        return Net::cut(replace_at(n->left, p, sub, from + 1), n->cut_plug, n->act, n->cut_sock,
                        n->right);
      if (i == 1)
        return Net::cut(n->left, n->cut_plug, n->act, n->cut_sock,
                        replace_at(n->right, p, sub, from + 1));
      break;
  }
  throw std::out_of_range("replace_at: path does not exist");
}

inline int net_size(const NetPtr& n) {
  switch (n->kind) {
    case NetKind::Capsule:
      return 1;
    case NetKind::Export:
      return 1 + net_size(n->body);
    case NetKind::Import:
    case NetKind::Cut:
      return 1 + net_size(n->left) + net_size(n->right);
  }
  return 1;
}

}  // namespace xcalc
