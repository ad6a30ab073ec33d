#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "xcalc/context.hpp"
#include "xcalc/types.hpp"

using namespace xcalc;

namespace {

TypePtr tv(const char* n) { return Type::var(n); }

// Brute-force <= oracle: base edges from the defining rules over a
// subterm-closed universe, then Warshall closure. Complete for pairs inside
// the universe because the decision procedure only ever visits subterms.
struct ClosureOracle {
  std::vector<TypePtr> universe;
  std::map<std::string, int> id;
  size_t words = 0;
  std::vector<std::vector<uint64_t>> le;  // row bitsets

  bool get(size_t i, size_t j) const { return (le[i][j >> 6] >> (j & 63)) & 1; }
  bool set(size_t i, size_t j) {
    uint64_t& w = le[i][j >> 6];
    uint64_t bit = 1ull << (j & 63);
    if (w & bit) return false;
    w |= bit;
    return true;
  }

  explicit ClosureOracle(const std::vector<TypePtr>& types) {
    for (auto& t : types) intern(t);
    size_t n = universe.size();
    words = (n + 63) / 64;
    le.assign(n, std::vector<uint64_t>(words, 0));
    for (size_t i = 0; i < n; ++i) set(i, i);
    for (size_t i = 0; i < n; ++i) {
      const TypePtr& t = universe[i];
      if (t->kind == TypeKind::Inter) {
        set(i, idx(t->lhs));
        set(i, idx(t->rhs));
      }
      if (t->kind == TypeKind::Union) {
        set(idx(t->lhs), i);
        set(idx(t->rhs), i);
      }
      if (t->kind == TypeKind::Top)
        for (size_t j = 0; j < n; ++j) set(j, i);
      if (t->kind == TypeKind::Bot)
        for (size_t j = 0; j < n; ++j) set(i, j);
    }
    std::vector<size_t> arrows;
    for (size_t i = 0; i < n; ++i)
      if (universe[i]->kind == TypeKind::Arrow) arrows.push_back(i);
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < n; ++i) {
        const TypePtr& t = universe[i];
        if (t->kind == TypeKind::Inter) {
          size_t a = idx(t->lhs), b = idx(t->rhs);
          for (size_t c = 0; c < n; ++c)
            if (get(c, a) && get(c, b) && set(c, i)) changed = true;
        }
        if (t->kind == TypeKind::Union) {
          size_t a = idx(t->lhs), b = idx(t->rhs);
          for (size_t c = 0; c < n; ++c)
            if (get(a, c) && get(b, c) && set(i, c)) changed = true;
        }
      }
      // Arrow congruence of ~: componentwise-equivalent arrows coincide.
      for (size_t i : arrows)
        for (size_t j : arrows) {
          if (i == j || get(i, j)) continue;
          size_t la = idx(universe[i]->lhs), ra = idx(universe[i]->rhs);
          size_t lb = idx(universe[j]->lhs), rb = idx(universe[j]->rhs);
          if (get(la, lb) && get(lb, la) && get(ra, rb) && get(rb, ra)) {
            set(i, j);
            changed = true;
          }
        }
      // transitive closure, row-bitset Warshall
      for (size_t k = 0; k < n; ++k)
        for (size_t i = 0; i < n; ++i) {
          if (!get(i, k)) continue;
          for (size_t w = 0; w < words; ++w) {
            uint64_t add = le[k][w] & ~le[i][w];
            if (add) {
              le[i][w] |= add;
              changed = true;
            }
          }
        }
    }
  }

  void intern(const TypePtr& t) {
    std::string key = print_type(t);
    if (id.count(key)) return;
    if (t->kind == TypeKind::Arrow || t->kind == TypeKind::Inter || t->kind == TypeKind::Union) {
      intern(t->lhs);
      intern(t->rhs);
    }
    id[key] = static_cast<int>(universe.size());
    universe.push_back(t);
  }

  size_t idx(const TypePtr& t) const { return static_cast<size_t>(id.at(print_type(t))); }
  bool leq_of(const TypePtr& a, const TypePtr& b) const { return get(idx(a), idx(b)); }
};

int type_nodes(const TypePtr& t) {
  if (t->kind == TypeKind::Arrow || t->kind == TypeKind::Inter || t->kind == TypeKind::Union)
    return 1 + type_nodes(t->lhs) + type_nodes(t->rhs);
  return 1;
}

// All types over {p1, p2, TOP, BOT} up to the given constructor depth and
// node count; the largest layer is deterministically subsampled so the
// universe stays ~2,000 strong. Subterm-closed either way: every subterm of
// a kept 7-node type has at most 5 nodes and those are all kept.
void enumerate(std::vector<TypePtr>& out, int depth, int max_nodes) {
  out = {tv("p1"), tv("p2"), Type::top(), Type::bot()};
  for (int d = 1; d <= depth; ++d) {
    std::vector<TypePtr> next;
    for (auto& a : out)
      for (auto& b : out) {
        for (TypePtr t : {Type::arrow(a, b), Type::inter(a, b), Type::uni(a, b)})
          if (type_nodes(t) <= max_nodes) next.push_back(t);
      }
    out.insert(out.end(), next.begin(), next.end());
    std::sort(out.begin(), out.end(),
              [](const TypePtr& x, const TypePtr& y) { return print_type(x) < print_type(y); });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const TypePtr& x, const TypePtr& y) {
                            return print_type(x) == print_type(y);
                          }),
              out.end());
  }
  std::vector<TypePtr> kept;
  int big_seen = 0;
  for (auto& t : out) {
    if (type_nodes(t) < max_nodes)
      kept.push_back(t);
    else if (big_seen++ % 24 == 0)
      kept.push_back(t);
  }
  out.swap(kept);
}

TypePtr random_type(std::mt19937& rng, int depth) {
  int pick = depth <= 0 ? std::uniform_int_distribution<int>(0, 3)(rng)
                        : std::uniform_int_distribution<int>(0, 6)(rng);
  switch (pick) {
    case 0:
      return tv("p1");
    case 1:
      return tv("p2");
    case 2:
      return Type::top();
    case 3:
      return Type::bot();
    case 4:
      return Type::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1));
    case 5:
      return Type::inter(random_type(rng, depth - 1), random_type(rng, depth - 1));
    default:
      return Type::uni(random_type(rng, depth - 1), random_type(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("leq basic laws") {
  TypePtr A = tv("A"), B = tv("B"), C = tv("C");
  CHECK(leq(Type::inter(A, B), A));
  CHECK(leq(Type::inter(A, B), B));
  CHECK(leq(A, Type::top()));
  CHECK(leq(Type::bot(), A));
  CHECK(leq(A, Type::uni(A, B)));
  CHECK(leq(B, Type::uni(A, B)));
  TypePtr lhs = Type::uni(A, Type::inter(B, C));
  TypePtr rhs = Type::inter(Type::uni(A, B), Type::uni(A, C));
  CHECK(leq(lhs, rhs));
  CHECK_FALSE(leq(rhs, lhs));
  // no arrow variance
  CHECK_FALSE(leq(Type::arrow(A, Type::inter(B, C)),
                  Type::inter(Type::arrow(A, B), Type::arrow(A, C))));
}

TEST_CASE("equiv examples") {
  TypePtr A = tv("A"), B = tv("B"), C = tv("C");
  CHECK(equiv(Type::inter(A, B), Type::inter(B, A)));
  CHECK(equiv(Type::arrow(Type::inter(A, B), C), Type::arrow(Type::inter(B, A), C)));
  CHECK(equiv(A, Type::inter(A, A)));
  CHECK_FALSE(equiv(A, B));
}

TEST_CASE("normalize examples") {
  TypePtr A = tv("A"), B = tv("B");
  CHECK(type_equal(normalize(Type::inter(Type::inter(A, B), A)), normalize(Type::inter(A, B))));
  CHECK(type_equal(normalize(Type::inter(A, Type::top())), A));
  CHECK(type_equal(normalize(Type::uni(Type::bot(), Type::uni(B, Type::bot()))), B));
  CHECK(type_equal(normalize(Type::inter(A, Type::uni(A, B))), A));
  CHECK(type_equal(normalize(Type::uni(A, Type::inter(A, B))), A));
}

TEST_CASE("leq agrees with the closure oracle on the small universe") {
  std::vector<TypePtr> types;
  enumerate(types, 3, 7);
  REQUIRE(types.size() >= 2000);
  ClosureOracle oracle(types);
  size_t n = types.size();
  size_t checked = 0;
  for (size_t i = 0; i < n; i += 7)
    for (size_t j = 0; j < n; j += 11) {
      CHECK(leq(types[i], types[j]) == oracle.leq_of(types[i], types[j]));
      ++checked;
    }
  for (size_t i = 0; i < 120 && i < n; ++i)
    for (size_t j = 0; j < 120 && j < n; ++j)
      CHECK(leq(types[i], types[j]) == oracle.leq_of(types[i], types[j]));
  CHECK(checked > 10000);
}

TEST_CASE("leq reflexive/transitive; normalize idempotent and sound for ~") {
  std::mt19937 rng(23);
  for (int i = 0; i < 2000; ++i) {
    TypePtr a = random_type(rng, 3);
    TypePtr b = random_type(rng, 3);
    TypePtr c = random_type(rng, 3);
    CHECK(leq(a, a));
    if (leq(a, b) && leq(b, c)) CHECK(leq(a, c));
    TypePtr na = normalize(a);
    CHECK(type_equal(normalize(na), na));
    CHECK(equiv(a, na));
    CHECK(equiv(a, b) == type_equal(na, normalize(b)));
  }
}

TEST_CASE("type parser round-trips up to normalize") {
  std::mt19937 rng(29);
  for (int i = 0; i < 500; ++i) {
    TypePtr a = random_type(rng, 3);
    TypePtr back = parse_type(print_type(a));
    CHECK(type_equal(normalize(back), normalize(a)));
  }
  CHECK(type_equal(parse_type("A -> B -> A"), Type::arrow(tv("A"), Type::arrow(tv("B"), tv("A")))));
  CHECK(type_equal(parse_type("A & B -> C"), Type::arrow(Type::inter(tv("A"), tv("B")), tv("C"))));
  CHECK(parse_type("TOP")->kind == TypeKind::Top);
  CHECK(parse_type("BOT")->kind == TypeKind::Bot);
}

TEST_CASE("context merging") {
  TypePtr A = tv("A"), B = tv("B");
  Ctx g1{{"x", A}};
  Ctx g2{{"x", B}};
  Ctx m = ctx_merge_inter(g1, g2);
  CHECK(type_equal(m["x"], normalize(Type::inter(A, B))));
  Ctx d = ctx_merge_inter(g1, Ctx{{"y", B}});
  CHECK(d.size() == 2);
  Ctx u = ctx_merge_union(Ctx{{"a", A}}, Ctx{{"a", A}});
  CHECK(type_equal(u["a"], A));
  CHECK_THROWS_AS(ctx_compatible_union(g1, g2), IncompatibleContexts);
  CHECK(ctx_compatible_union(g1, g1).size() == 1);
  CHECK(ctx_compatible_union(Ctx{}, g2).size() == 1);
}

TEST_CASE("context text parsing") {
  auto [gamma, delta] = parse_judgement_contexts("x:A, y:B -> C |- a:A & B, b:D");
  CHECK(gamma.size() == 2);
  CHECK(delta.size() == 2);
  CHECK(type_equal(gamma["y"], Type::arrow(tv("B"), tv("C"))));
  CHECK(type_equal(delta["a"], normalize(Type::inter(tv("A"), tv("B")))));
}
