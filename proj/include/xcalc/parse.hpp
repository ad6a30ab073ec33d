#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xcalc/net.hpp"

namespace xcalc {

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)), position(pos) {}
};

namespace detail {

// Tokens: IDENT, '<', '>', '(', ')', '.', '^', '[', ']', '+', '<+', '+>'.
// '<' immediately followed by '+' lexes as the left-activation operator.
struct Token {
  enum Kind { Ident, LAngle, RAngle, LParen, RParen, Dot, Hat, LBrack, RBrack, CutPlain, CutLeft, CutRight, End } kind;
  std::string text;
  size_t pos;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(&src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    const std::string& src = *src_;
    while (i_ < src.size() && std::isspace(static_cast<unsigned char>(src[i_]))) ++i_;
    size_t at = i_;
    if (i_ >= src.size()) {
      tok_ = {Token::End, "", at};
      return;
    }
    char c = src[i_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i_;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      tok_ = {Token::Ident, src.substr(i_, j - i_), at};
      i_ = j;
      return;
    }
    ++i_;
    switch (c) {
      case '<':
        if (i_ < src.size() && src[i_] == '+') {
          ++i_;
          tok_ = {Token::CutLeft, "<+", at};
        } else {
          tok_ = {Token::LAngle, "<", at};
        }
        return;
      case '>':
        tok_ = {Token::RAngle, ">", at};
        return;
      case '(':
        tok_ = {Token::LParen, "(", at};
        return;
      case ')':
        tok_ = {Token::RParen, ")", at};
        return;
      case '.':
        tok_ = {Token::Dot, ".", at};
        return;
      case '^':
        tok_ = {Token::Hat, "^", at};
        return;
      case '[':
        tok_ = {Token::LBrack, "[", at};
        return;
      case ']':
        tok_ = {Token::RBrack, "]", at};
        return;
      case '+':
        if (i_ < src.size() && src[i_] == '>') {
          ++i_;
          tok_ = {Token::CutRight, "+>", at};
        } else {
          tok_ = {Token::CutPlain, "+", at};
        }
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }
  }

  const std::string* src_;
  size_t i_ = 0;
  Token tok_;
};

class NetParser {
public:
  explicit NetParser(const std::string& src) : lex_(src) {}

  NetPtr parse() {
    NetPtr n = parse_net();
    expect(Token::End, "end of input");
    return n;
  }

private:
  Lexer lex_;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, lex_.peek().pos); }

  Token expect(Token::Kind k, const char* what) {
    if (lex_.peek().kind != k) fail(std::string("expected ") + what);
    return lex_.take();
  }

  std::string ident() { return expect(Token::Ident, "identifier").text; }

  // net := primary (ident '^' ('[' ...] | CUTOP ...) )*
  NetPtr parse_net() {
    NetPtr n = parse_primary();
    for (;;) {
      if (lex_.peek().kind != Token::Ident) return n;
      // Lookahead: ident '^' followed by '[' or a cut operator continues the
      // net; ident '^' '.' belongs to an enclosing export; anything else is
      // an error at this level.
      Lexer save = lex_;
      std::string name = lex_.take().text;
      if (lex_.peek().kind != Token::Hat) {
        lex_ = save;
        return n;
      }
      lex_.take();  // '^'
      Token::Kind k = lex_.peek().kind;
      if (k == Token::LBrack) {
        lex_.take();
        std::string m = ident();
        expect(Token::RBrack, "']'");
        std::string bs = ident();
        expect(Token::Hat, "'^'");
        NetPtr right = parse_primary();
        n = Net::imp(n, name, m, bs, right);
      } else if (k == Token::CutPlain || k == Token::CutLeft || k == Token::CutRight) {
        Activation act = k == Token::CutPlain   ? Activation::None
                         : k == Token::CutLeft ? Activation::Left
                                               : Activation::Right;
        lex_.take();
        std::string bs = ident();
        expect(Token::Hat, "'^'");
        NetPtr right = parse_primary();
        n = Net::cut(n, name, act, bs, right);
      } else {
        lex_ = save;
        return n;
      }
    }
  }

  // primary := capsule | '(' net ')' | export
  NetPtr parse_primary() {
    switch (lex_.peek().kind) {
      case Token::LAngle: {
        lex_.take();
        std::string s = ident();
        expect(Token::Dot, "'.'");
        std::string p = ident();
        expect(Token::RAngle, "'>'");
        return Net::capsule(s, p);
      }
      case Token::LParen: {
        lex_.take();
        NetPtr n = parse_net();
        expect(Token::RParen, "')'");
        return n;
      }
      case Token::Ident: {
        std::string bs = lex_.take().text;
        expect(Token::Hat, "'^'");
        NetPtr body = parse_net();
        std::string bp = ident();
        expect(Token::Hat, "'^'");
        expect(Token::Dot, "'.'");
        std::string out = ident();
        return Net::exp(bs, body, bp, out);
      }
      default:
        fail("expected a net");
    }
  }
};

// Each identifier position fixes its namespace; the same name in both
// namespaces within one net is a clash.
inline void check_namespaces(const NetPtr& n, std::set<std::string>& socks,
                             std::set<std::string>& plugs) {
  auto sock = [&](const std::string& x) {
    if (plugs.count(x))
      throw ParseError("identifier '" + x + "' used as both socket and plug", 0);
    socks.insert(x);
  };
  auto plug = [&](const std::string& a) {
    if (socks.count(a))
      throw ParseError("identifier '" + a + "' used as both socket and plug", 0);
    plugs.insert(a);
  };
  switch (n->kind) {
    case NetKind::Capsule:
      sock(n->src);
      plug(n->dst);
      break;
    case NetKind::Export:
      sock(n->bind_socket);
      plug(n->bind_plug);
      plug(n->out);
      check_namespaces(n->body, socks, plugs);
      break;
    case NetKind::Import:
      plug(n->bind_plug_l);
      sock(n->mid);
      sock(n->bind_sock_r);
      check_namespaces(n->left, socks, plugs);
      check_namespaces(n->right, socks, plugs);
      break;
    case NetKind::Cut:
      plug(n->cut_plug);
      sock(n->cut_sock);
      check_namespaces(n->left, socks, plugs);
      check_namespaces(n->right, socks, plugs);
      break;
  }
}

}  // namespace detail

// Parses the concrete net grammar and refreshes bound names into Barendregt
// form (free names are kept verbatim).
inline NetPtr parse_net(const std::string& text) {
  detail::NetParser p(text);
  NetPtr n = p.parse();
  std::set<std::string> socks, plugs;
  detail::check_namespaces(n, socks, plugs);
  NameGen gen;
  return barendregt(n, gen);
}

}  // namespace xcalc
