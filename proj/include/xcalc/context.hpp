#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "xcalc/types.hpp"

namespace xcalc {

// Socket and plug contexts are finite maps from connector names to types.
// Types are kept normalized, so per-subject equality modulo ~ is plain
// structural equality.
using Ctx = std::map<std::string, TypePtr>;

inline Ctx normalize_ctx(const Ctx& c) {
  Ctx out;
  for (auto& [k, v] : c) out[k] = normalize(v);
  return out;
}

inline bool ctx_has(const Ctx& c, const std::string& k) { return c.count(k) > 0; }

inline TypePtr ctx_get(const Ctx& c, const std::string& k) {
  auto it = c.find(k);
  return it == c.end() ? nullptr : it->second;
}

inline Ctx ctx_without(Ctx c, const std::string& k) {
  c.erase(k);
  return c;
}

inline Ctx ctx_with(Ctx c, const std::string& k, const TypePtr& t) {
  c[k] = normalize(t);
  return c;
}

inline bool ctx_equal(const Ctx& a, const Ctx& b) {
  if (a.size() != b.size()) return false;
  for (auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || !type_equal(v, it->second)) return false;
  }
  return true;
}

// Pointwise ∩ of types for shared subjects (socket contexts).
inline Ctx ctx_merge_inter(const Ctx& a, const Ctx& b) {
  Ctx out = a;
  for (auto& [k, v] : b) {
    auto it = out.find(k);
    if (it == out.end())
      out[k] = v;
    else
      it->second = normalize(Type::inter(it->second, v));
  }
  return out;
}

// Pointwise ∪ (plug contexts).
inline Ctx ctx_merge_union(const Ctx& a, const Ctx& b) {
  Ctx out = a;
  for (auto& [k, v] : b) {
    auto it = out.find(k);
    if (it == out.end())
      out[k] = v;
    else
      it->second = normalize(Type::uni(it->second, v));
  }
  return out;
}

struct IncompatibleContexts : std::runtime_error {
  std::string subject;
  IncompatibleContexts(const std::string& subj, const TypePtr& t1, const TypePtr& t2)
      : std::runtime_error("incompatible contexts at '" + subj + "': " + print_type(t1) +
                           " vs " + print_type(t2)),
        subject(subj) {}
};

// Set union requiring shared subjects to agree modulo ~.
inline Ctx ctx_compatible_union(const Ctx& a, const Ctx& b) {
  Ctx out = normalize_ctx(a);
  for (auto& [k, v] : b) {
    TypePtr nv = normalize(v);
    auto it = out.find(k);
    if (it == out.end())
      out[k] = nv;
    else if (!type_equal(it->second, nv))
      throw IncompatibleContexts(k, it->second, nv);
  }
  return out;
}

inline std::string print_ctx(const Ctx& c) {
  std::string s;
  bool first = true;
  for (auto& [k, v] : c) {
    if (!first) s += ", ";
    first = false;
    s += k + ":" + print_type(v);
  }
  return s;
}

// "x:A, y:B |- a:C, b:D" -> (gamma, delta). Either side may be empty.
inline std::pair<Ctx, Ctx> parse_judgement_contexts(const std::string& text) {
  auto bar = text.find("|-");
  if (bar == std::string::npos) throw std::runtime_error("missing |- in context text");
  auto parse_side = [](const std::string& side) {
    Ctx c;
    size_t i = 0;
    while (i < side.size()) {
      while (i < side.size() && (std::isspace(static_cast<unsigned char>(side[i])) || side[i] == ','))
        ++i;
      if (i >= side.size()) break;
      size_t j = i;
      while (j < side.size() && side[j] != ':') ++j;
      if (j >= side.size()) throw std::runtime_error("missing ':' in context entry");
      std::string name = side.substr(i, j - i);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      // Type runs to the next top-level comma.
      size_t k = j + 1;
      int depth = 0;
      while (k < side.size() && (depth > 0 || side[k] != ',')) {
        if (side[k] == '(') ++depth;
        if (side[k] == ')') --depth;
        ++k;
      }
      c[name] = normalize(parse_type(side.substr(j + 1, k - j - 1)));
      i = k;
    }
    return c;
  };
  return {parse_side(text.substr(0, bar)), parse_side(text.substr(bar + 2))};
}

}  // namespace xcalc
