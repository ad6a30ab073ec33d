#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace xcalc {

enum class TypeKind { Var, Top, Bot, Arrow, Inter, Union };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  std::string name;   // Var
  TypePtr lhs, rhs;   // Arrow / Inter / Union

  static TypePtr var(std::string n) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Var;
    t->name = std::move(n);
    return t;
  }
  static TypePtr top() {
    static TypePtr t = [] {
      auto x = std::make_shared<Type>();
      x->kind = TypeKind::Top;
      return x;
    }();
    return t;
  }
  static TypePtr bot() {
    static TypePtr t = [] {
      auto x = std::make_shared<Type>();
      x->kind = TypeKind::Bot;
      return x;
    }();
    return t;
  }
  static TypePtr arrow(TypePtr a, TypePtr b) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Arrow;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
  }
  static TypePtr inter(TypePtr a, TypePtr b) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Inter;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
  }
  static TypePtr uni(TypePtr a, TypePtr b) {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Union;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
  }
};

inline bool is_proper(const TypePtr& t) {
  return t->kind == TypeKind::Var || t->kind == TypeKind::Arrow;
}

inline bool is_simple(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Var:
      return true;
    case TypeKind::Arrow:
      return is_simple(t->lhs) && is_simple(t->rhs);
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Printing / parsing.  Grammar:
//   type := atom | type "->" type         (-> right associative)
//   atom := ident | "TOP" | "BOT" | atom "&" atom | atom "|" atom | "(" type ")"
// & and | bind tighter than -> and associate left among themselves.

inline std::string print_type(const TypePtr& t, int parent = 0) {
  // parent: 0 top, 1 under arrow-lhs or &/| operand
  switch (t->kind) {
    case TypeKind::Var:
      return t->name;
    case TypeKind::Top:
      return "TOP";
    case TypeKind::Bot:
      return "BOT";
    case TypeKind::Arrow: {
      std::string s = print_type(t->lhs, 1) + " -> " + print_type(t->rhs, 0);
      return parent ? "(" + s + ")" : s;
    }
    case TypeKind::Inter: {
      std::string s = print_type(t->lhs, 1) + " & " + print_type(t->rhs, 1);
      // & / | chains need parens when nested under the other operator; keep
      // it simple: always parenthesise nested binary atoms.
      return parent ? "(" + s + ")" : s;
    }
    case TypeKind::Union: {
      std::string s = print_type(t->lhs, 1) + " | " + print_type(t->rhs, 1);
      return parent ? "(" + s + ")" : s;
    }
  }
  return {};
}

namespace detail {

class TypeParser {
public:
  explicit TypeParser(const std::string& s) : src_(s) {}

  TypePtr parse() {
    TypePtr t = parse_arrow();
    skip_ws();
    if (i_ != src_.size()) throw std::runtime_error("type syntax error at offset " + std::to_string(i_));
    return t;
  }

private:
  const std::string& src_;
  size_t i_ = 0;

  void skip_ws() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip_ws();
    if (i_ < src_.size() && src_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  bool eat_arrow() {
    skip_ws();
    if (i_ + 1 < src_.size() && src_[i_] == '-' && src_[i_ + 1] == '>') {
      i_ += 2;
      return true;
    }
    return false;
  }

  TypePtr parse_arrow() {
    TypePtr lhs = parse_atom();
    if (eat_arrow()) return Type::arrow(lhs, parse_arrow());
    return lhs;
  }

  TypePtr parse_atom() {
    TypePtr t = parse_base();
    for (;;) {
      if (eat('&'))
        t = Type::inter(t, parse_base());
      else if (eat('|'))
        t = Type::uni(t, parse_base());
      else
        return t;
    }
  }

  TypePtr parse_base() {
    skip_ws();
    if (eat('(')) {
      TypePtr t = parse_arrow();
      if (!eat(')')) throw std::runtime_error("expected ')' in type at offset " + std::to_string(i_));
      return t;
    }
    size_t j = i_;
    while (j < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
      ++j;
    if (j == i_) throw std::runtime_error("expected type at offset " + std::to_string(i_));
    std::string name = src_.substr(i_, j - i_);
    i_ = j;
    if (name == "TOP") return Type::top();
    if (name == "BOT") return Type::bot();
    return Type::var(name);
  }
};

}  // namespace detail

inline TypePtr parse_type(const std::string& s) { return detail::TypeParser(s).parse(); }

// ---------------------------------------------------------------------------
// The <= preorder: least preorder with meet (∩, top TOP) and join (∪, bottom
// BOT) rules and no arrow variance. This is the free bounded lattice preorder
// over atoms, decided by Whitman's condition. Arrows compare componentwise
// modulo the induced equivalence.

inline bool leq(const TypePtr& a, const TypePtr& b);

inline bool equiv(const TypePtr& a, const TypePtr& b) {
  if (a->kind == TypeKind::Arrow && b->kind == TypeKind::Arrow)
    return equiv(a->lhs, b->lhs) && equiv(a->rhs, b->rhs);
  return leq(a, b) && leq(b, a);
}

inline bool leq(const TypePtr& a, const TypePtr& b) {
  if (b->kind == TypeKind::Top) return true;
  if (a->kind == TypeKind::Bot) return true;
  if (b->kind == TypeKind::Inter) return leq(a, b->lhs) && leq(a, b->rhs);
  if (a->kind == TypeKind::Union) return leq(a->lhs, b) && leq(a->rhs, b);
  // a is now Var/Arrow/Inter/Top, b is Var/Arrow/Union/Bot.
  if (a->kind == TypeKind::Inter && b->kind == TypeKind::Union)
    return leq(a->lhs, b) || leq(a->rhs, b) || leq(a, b->lhs) || leq(a, b->rhs);
  if (a->kind == TypeKind::Inter) return leq(a->lhs, b) || leq(a->rhs, b);
  if (b->kind == TypeKind::Union) return leq(a, b->lhs) || leq(a, b->rhs);
  if (a->kind == TypeKind::Top || b->kind == TypeKind::Bot) return false;
  if (a->kind == TypeKind::Var && b->kind == TypeKind::Var) return a->name == b->name;
  if (a->kind == TypeKind::Arrow && b->kind == TypeKind::Arrow)
    return equiv(a->lhs, b->lhs) && equiv(a->rhs, b->rhs);
  return false;
}

// ---------------------------------------------------------------------------
// Spines: the syntactic ∩ (resp. ∪) components, flattened left-to-right.
// TOP flattens to the empty ∩ spine, BOT to the empty ∪ spine.

inline void flatten_inter(const TypePtr& t, std::vector<TypePtr>& out) {
  if (t->kind == TypeKind::Inter) {
    flatten_inter(t->lhs, out);
    flatten_inter(t->rhs, out);
  } else if (t->kind != TypeKind::Top) {
    out.push_back(t);
  }
}

inline void flatten_union(const TypePtr& t, std::vector<TypePtr>& out) {
  if (t->kind == TypeKind::Union) {
    flatten_union(t->lhs, out);
    flatten_union(t->rhs, out);
  } else if (t->kind != TypeKind::Bot) {
    out.push_back(t);
  }
}

inline std::vector<TypePtr> inter_spine(const TypePtr& t) {
  std::vector<TypePtr> v;
  flatten_inter(t, v);
  return v;
}

inline std::vector<TypePtr> union_spine(const TypePtr& t) {
  std::vector<TypePtr> v;
  flatten_union(t, v);
  return v;
}

inline TypePtr make_inter(std::vector<TypePtr> parts) {
  if (parts.empty()) return Type::top();
  TypePtr t = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) t = Type::inter(t, parts[i]);
  return t;
}

inline TypePtr make_union(std::vector<TypePtr> parts) {
  if (parts.empty()) return Type::bot();
  TypePtr t = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) t = Type::uni(t, parts[i]);
  return t;
}

// ---------------------------------------------------------------------------
// normalize: canonical representative of the ~ class. Flattened, sorted,
// subsumption-pruned spines; Whitman's refinement replaces a meet component
// below the whole join (dually for meets) so equivalent types print equally.

inline TypePtr normalize(const TypePtr& t);

namespace detail {

inline TypePtr normalize_parts(std::vector<TypePtr> parts, bool is_meet) {
  // parts are already normalized. Flatten nested spines of the same shape.
  std::vector<TypePtr> flat;
  for (auto& p : parts) {
    if (is_meet)
      flatten_inter(p, flat);
    else
      flatten_union(p, flat);
  }
  // Absorbing element: BOT in a meet, TOP in a join.
  for (auto& p : flat) {
    if (is_meet && p->kind == TypeKind::Bot) return Type::bot();
    if (!is_meet && p->kind == TypeKind::Top) return Type::top();
  }
  // Whitman refinement: in a join w = v1 | ... | vn, if some vi is a meet
  // with a component u <= w, then vi can be replaced by u (w stays the same
  // element); dually for meets. Repeat to fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    TypePtr whole = is_meet ? make_inter(flat) : make_union(flat);
    for (size_t i = 0; i < flat.size() && !changed; ++i) {
      const TypePtr& v = flat[i];
      if (is_meet && v->kind == TypeKind::Union) {
        for (const TypePtr& u : union_spine(v)) {
          if (leq(whole, u)) {
            flat[i] = u;
            changed = true;
            break;
          }
        }
      } else if (!is_meet && v->kind == TypeKind::Inter) {
        for (const TypePtr& u : inter_spine(v)) {
          if (leq(u, whole)) {
            flat[i] = u;
            changed = true;
            break;
          }
        }
      }
    }
    if (changed) {
      // Re-flatten (the replacement may itself be a spine of this shape).
      std::vector<TypePtr> again;
      for (auto& p : flat) {
        if (is_meet)
          flatten_inter(p, again);
        else
          flatten_union(p, again);
      }
      flat.swap(again);
    }
  }
  // Subsumption pruning: drop p if another kept element makes it redundant
  // (q <= p in a meet, p <= q in a join). Ties broken by printed order.
  std::sort(flat.begin(), flat.end(),
            [](const TypePtr& a, const TypePtr& b) { return print_type(a) < print_type(b); });
  std::vector<TypePtr> kept;
  for (size_t i = 0; i < flat.size(); ++i) {
    bool redundant = false;
    for (size_t j = 0; j < flat.size() && !redundant; ++j) {
      if (i == j) continue;
      bool covers = is_meet ? leq(flat[j], flat[i]) : leq(flat[i], flat[j]);
      if (!covers) continue;
      bool both = is_meet ? leq(flat[i], flat[j]) : leq(flat[j], flat[i]);
      if (both) {
        // Equivalent pair: keep only the first in sort order.
        if (j < i) redundant = true;
      } else {
        redundant = true;
      }
    }
    if (!redundant) kept.push_back(flat[i]);
  }
  if (kept.empty()) return is_meet ? Type::top() : Type::bot();
  if (kept.size() == 1) return kept[0];
  return is_meet ? make_inter(kept) : make_union(kept);
}

}  // namespace detail

inline TypePtr normalize(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Var:
    case TypeKind::Top:
    case TypeKind::Bot:
      return t;
    case TypeKind::Arrow:
      return Type::arrow(normalize(t->lhs), normalize(t->rhs));
    case TypeKind::Inter:
      return detail::normalize_parts({normalize(t->lhs), normalize(t->rhs)}, true);
    case TypeKind::Union:
      return detail::normalize_parts({normalize(t->lhs), normalize(t->rhs)}, false);
  }
  return t;
}

inline std::string normal_print(const TypePtr& t) { return print_type(normalize(t)); }

inline bool type_equal(const TypePtr& a, const TypePtr& b) {
  return print_type(a) == print_type(b);
}

// "Not an intersection type" in the CBN side condition: anything whose
// normal form is ∩-headed, TOP included (the empty intersection).
inline bool is_intersection_kind(const TypePtr& t) {
  TypePtr n = normalize(t);
  return n->kind == TypeKind::Inter || n->kind == TypeKind::Top;
}

inline bool is_union_kind(const TypePtr& t) {
  TypePtr n = normalize(t);
  return n->kind == TypeKind::Union || n->kind == TypeKind::Bot;
}

// Uniform renaming of type variables; used by generators to clone branches.
inline TypePtr rename_type_vars(const TypePtr& t, const std::map<std::string, std::string>& m) {
  switch (t->kind) {
    case TypeKind::Var: {
      auto it = m.find(t->name);
      return it == m.end() ? t : Type::var(it->second);
    }
    case TypeKind::Top:
    case TypeKind::Bot:
      return t;
    case TypeKind::Arrow:
      return Type::arrow(rename_type_vars(t->lhs, m), rename_type_vars(t->rhs, m));
    case TypeKind::Inter:
      return Type::inter(rename_type_vars(t->lhs, m), rename_type_vars(t->rhs, m));
    case TypeKind::Union:
      return Type::uni(rename_type_vars(t->lhs, m), rename_type_vars(t->rhs, m));
  }
  return t;
}

inline void collect_type_vars(const TypePtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case TypeKind::Var:
      out.insert(t->name);
      break;
    case TypeKind::Arrow:
    case TypeKind::Inter:
    case TypeKind::Union:
      collect_type_vars(t->lhs, out);
      collect_type_vars(t->rhs, out);
      break;
    default:
      break;
  }
}

}  // namespace xcalc
