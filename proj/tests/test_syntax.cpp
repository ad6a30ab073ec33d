#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "xcalc/net.hpp"
#include "xcalc/parse.hpp"

using namespace xcalc;

namespace {

// Independent structural-recursion oracle for the free-connector sets,
// written against the definition rather than the shared collector.
void frees_oracle(const NetPtr& n, std::set<std::string>& fs, std::set<std::string>& fp) {
  switch (n->kind) {
    case NetKind::Capsule:
      fs.insert(n->src);
      fp.insert(n->dst);
      return;
    case NetKind::Export: {
      std::set<std::string> bs, bp;
      frees_oracle(n->body, bs, bp);
      bs.erase(n->bind_socket);
      bp.erase(n->bind_plug);
      fs.insert(bs.begin(), bs.end());
      fp.insert(bp.begin(), bp.end());
      fp.insert(n->out);
      return;
    }
    case NetKind::Import: {
      std::set<std::string> ls, lp, rs, rp;
      frees_oracle(n->left, ls, lp);
      frees_oracle(n->right, rs, rp);
      lp.erase(n->bind_plug_l);
      rs.erase(n->bind_sock_r);
      fs.insert(ls.begin(), ls.end());
      fs.insert(n->mid);
      fs.insert(rs.begin(), rs.end());
      fp.insert(lp.begin(), lp.end());
      fp.insert(rp.begin(), rp.end());
      return;
    }
    case NetKind::Cut: {
      std::set<std::string> ls, lp, rs, rp;
      frees_oracle(n->left, ls, lp);
      frees_oracle(n->right, rs, rp);
      lp.erase(n->cut_plug);
      rs.erase(n->cut_sock);
      fs.insert(ls.begin(), ls.end());
      fs.insert(rs.begin(), rs.end());
      fp.insert(lp.begin(), lp.end());
      fp.insert(rp.begin(), rp.end());
      return;
    }
  }
}

NetPtr random_net(std::mt19937& rng, int depth) {
  auto name = [&rng](const char* prefix) {
    return std::string(prefix) + std::to_string(std::uniform_int_distribution<int>(0, 5)(rng));
  };
  int pick = depth <= 0 ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
  switch (pick) {
    case 1:
      return Net::exp(name("x"), random_net(rng, depth - 1), name("a"), name("a"));
    case 2:
      return Net::imp(random_net(rng, depth - 1), name("a"), name("x"), name("x"),
                      random_net(rng, depth - 1));
    case 3: {
      int act = std::uniform_int_distribution<int>(0, 2)(rng);
      return Net::cut(random_net(rng, depth - 1), name("a"),
                      act == 0 ? Activation::None : act == 1 ? Activation::Left : Activation::Right,
                      name("x"), random_net(rng, depth - 1));
    }
    default:
      return Net::capsule(name("x"), name("a"));
  }
}

NetPtr random_barendregt_net(std::mt19937& rng, int depth) {
  NameGen gen;
  return barendregt(random_net(rng, depth), gen);
}

}  // namespace

TEST_CASE("free connector examples") {
  NetPtr cap = parse_net("<x.a>");
  CHECK(free_sockets(cap) == std::set<std::string>{"x"});
  CHECK(free_plugs(cap) == std::set<std::string>{"a"});

  NetPtr ex = parse_net("y^ <y.b> b^ . a");
  CHECK(free_sockets(ex).empty());
  CHECK(free_plugs(ex) == std::set<std::string>{"a"});

  NetPtr im = parse_net("(<z.b>) b^ [y] x^ (<x.a>)");
  CHECK(free_sockets(im) == std::set<std::string>{"z", "y"});

  NetPtr cut = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  CHECK(free_plugs(cut) == std::set<std::string>{"b"});
}

TEST_CASE("free connectors agree with an independent oracle on random nets") {
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    NetPtr n = random_barendregt_net(rng, 4);
    std::set<std::string> fs, fp;
    frees_oracle(n, fs, fp);
    CHECK(free_sockets(n) == fs);
    CHECK(free_plugs(n) == fp);
  }
}

TEST_CASE("introduction predicate") {
  CHECK(introduces_socket(parse_net("<x.a>"), "x"));
  CHECK(introduces_plug(parse_net("<x.a>"), "a"));
  CHECK(introduces_socket(parse_net("(<z.b>) b^ [x] y^ (<y.a>)"), "x"));
  CHECK_FALSE(introduces_socket(parse_net("(<x.b>) b^ [x] y^ (<y.a>)"), "x"));
  CHECK(introduces_plug(parse_net("x^ <x.b> b^ . a"), "a"));
  CHECK_FALSE(introduces_plug(parse_net("x^ <x.a> b^ . a"), "a"));
}

TEST_CASE("renaming") {
  CHECK(net_equal(rename_plug(parse_net("<y.d>"), "d", "a"), parse_net("<y.a>")));
  CHECK(net_equal(rename_plug(parse_net("x^ <x.c> c^ . d"), "d", "a"),
                  parse_net("x^ <x.c> c^ . a")));
  CHECK(net_equal(rename_socket(parse_net("(<x.a>) a^ [y] z^ (<z.b>)"), "y", "w"),
                  parse_net("(<x.a>) a^ [w] z^ (<z.b>)")));
  CHECK_THROWS(rename_plug(parse_net("<y.d>"), "zz", "a"));
  // from == to is the identity
  NetPtr n = parse_net("<y.d>");
  CHECK(net_equal(rename_plug(n, "d", "d"), n));
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(parse_net("x^ <x.b> b^ . a"), parse_net("y^ <y.c> c^ . a")));
  CHECK_FALSE(alpha_eq(parse_net("<x.a>"), parse_net("<y.a>")));
  // the two exp-imp bracketings are structurally distinct
  NetPtr l = parse_net("((<q.g>) g^ + y^ (<y.b>)) b^ + z^ (<z.a>)");
  NetPtr r = parse_net("(<q.g>) g^ + y^ ((<y.b>) b^ + z^ (<z.a>))");
  CHECK_FALSE(alpha_eq(l, r));
}

TEST_CASE("alpha equivalence is an equivalence relation on random nets") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    NetPtr a = random_barendregt_net(rng, 3);
    NetPtr b = random_barendregt_net(rng, 3);
    NetPtr c = random_barendregt_net(rng, 3);
    CHECK(alpha_eq(a, a));
    if (alpha_eq(a, b)) CHECK(alpha_eq(b, a));
    if (alpha_eq(a, b) && alpha_eq(b, c)) CHECK(alpha_eq(a, c));
    // canonical print decides alpha equivalence
    CHECK(alpha_eq(a, b) == (print_net(canonical(a)) == print_net(canonical(b))));
  }
}

TEST_CASE("Barendregt form holds after parse, rename and canonical") {
  std::mt19937 rng(13);
  for (int i = 0; i < 300; ++i) {
    NetPtr n = random_barendregt_net(rng, 4);
    CHECK(is_barendregt(n));
    CHECK(is_barendregt(canonical(n)));
    NetPtr p = parse_net(print_net(n));
    CHECK(is_barendregt(p));
    CHECK(alpha_eq(n, p));
  }
}

TEST_CASE("parser examples and errors") {
  NetPtr cap = parse_net("<x.a>");
  CHECK(cap->kind == NetKind::Capsule);
  CHECK(cap->src == "x");
  CHECK(cap->dst == "a");

  NetPtr ex = parse_net("x^ <x.b> b^ . a");
  CHECK(ex->kind == NetKind::Export);

  NetPtr cut = parse_net("(<y.a>) a^ + x^ (<x.b>)");
  CHECK(cut->kind == NetKind::Cut);
  CHECK(cut->act == Activation::None);
  CHECK(parse_net("(<y.a>) a^ <+ x^ (<x.b>)")->act == Activation::Left);
  CHECK(parse_net("(<y.a>) a^ +> x^ (<x.b>)")->act == Activation::Right);

  CHECK_THROWS_AS(parse_net("<x.a"), ParseError);
  CHECK_THROWS_AS(parse_net("<x.x>"), ParseError);  // namespace clash
  CHECK_THROWS_AS(parse_net(""), ParseError);

  // messy whitespace round-trips
  NetPtr messy = parse_net("  ( <y.a> )   a^+x^( <x.b> ) ");
  CHECK(alpha_eq(messy, cut));
}

TEST_CASE("parse refreshes clashing bound names into Barendregt form") {
  // x is bound twice in the source text
  NetPtr n = parse_net("(x^ <x.b> b^ . a) a^ + x^ (<x.c>)");
  CHECK(is_barendregt(n));
  CHECK(free_plugs(n) == std::set<std::string>{"c"});
}
