#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "casorati/jet.hpp"

namespace casorati::expr {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::string msg, std::size_t off)
      : std::runtime_error(msg + " at byte " + std::to_string(off)), offset(off) {}
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Func { Sin, Cos, Exp, Ln, Sqrt };

inline std::string func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

/// Arithmetic expression over real literals, named coordinates, the four
/// binary operators, unary minus, right-associative '^' and the call set
/// {sin, cos, exp, ln, sqrt}.  Nodes live in an arena; `root` is the tree
/// entry point.
class Expr {
public:
  enum class Kind { Lit, Ident, Add, Sub, Mul, Div, Pow, Neg, Call };

  struct Node {
    Kind kind;
    double lit = 0.0;
    std::string ident;
    Func func = Func::Sin;
    int a = -1, b = -1;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  static Expr parse(std::string_view source);
  static Expr literal(double v) {
    Expr e;
    e.root_ = e.add({Kind::Lit, v, "", Func::Sin, -1, -1});
    return e;
  }

  std::string print() const { return print_node(root_, 0); }

  /// All identifier names appearing in the tree.
  std::vector<std::string> identifiers() const {
    std::vector<std::string> out;
    for (const Node& n : nodes_)
      if (n.kind == Kind::Ident) {
        bool seen = false;
        for (const auto& s : out) seen = seen || s == n.ident;
        if (!seen) out.push_back(n.ident);
      }
    return out;
  }

  numkit::Jet eval(const std::map<std::string, numkit::Jet>& env) const {
    return eval_jet_node(root_, env);
  }

  double eval_value(const std::map<std::string, double>& env) const {
    return eval_val_node(root_, env);
  }

private:
  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Precedence used by the printer: 0 additive, 1 multiplicative, 2 unary, 3 power, 4 atom.
  std::string print_node(int id, int parent_prec) const {
    const Node& n = node(id);
    std::string s;
    int prec = 4;
    switch (n.kind) {
      case Kind::Lit: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", n.lit);
        s = buf;
        if (n.lit < 0) prec = 2;
        break;
      }
      case Kind::Ident: s = n.ident; break;
      case Kind::Add: prec = 0; s = print_node(n.a, 0) + " + " + print_node(n.b, 1); break;
      case Kind::Sub: prec = 0; s = print_node(n.a, 0) + " - " + print_node(n.b, 1); break;
      case Kind::Mul: prec = 1; s = print_node(n.a, 1) + "*" + print_node(n.b, 2); break;
      case Kind::Div: prec = 1; s = print_node(n.a, 1) + "/" + print_node(n.b, 2); break;
      case Kind::Neg: prec = 2; s = "-" + print_node(n.a, 3); break;
      case Kind::Pow: prec = 3; s = print_node(n.a, 4) + "^" + print_node(n.b, 2); break;
      case Kind::Call: s = func_name(n.func) + "(" + print_node(n.a, 0) + ")"; break;
    }
    if (prec < parent_prec) return "(" + s + ")";
    return s;
  }

  numkit::Jet eval_jet_node(int id, const std::map<std::string, numkit::Jet>& env) const {
    using numkit::Jet;
    const Node& n = node(id);
    switch (n.kind) {
      case Kind::Lit: {
        const Jet& any = env.begin()->second;
        return Jet::constant(n.lit, any.vars(), any.order());
      }
      case Kind::Ident: {
        auto it = env.find(n.ident);
        if (it == env.end()) throw EvalError("unbound identifier '" + n.ident + "'");
        return it->second;
      }
      case Kind::Add: return eval_jet_node(n.a, env) + eval_jet_node(n.b, env);
      case Kind::Sub: return eval_jet_node(n.a, env) - eval_jet_node(n.b, env);
      case Kind::Mul: return eval_jet_node(n.a, env) * eval_jet_node(n.b, env);
      case Kind::Div: return eval_jet_node(n.a, env) / eval_jet_node(n.b, env);
      case Kind::Neg: return -eval_jet_node(n.a, env);
      case Kind::Pow: return numkit::pow(eval_jet_node(n.a, env), eval_jet_node(n.b, env));
      case Kind::Call: {
        Jet u = eval_jet_node(n.a, env);
        switch (n.func) {
          case Func::Sin: return numkit::sin(u);
          case Func::Cos: return numkit::cos(u);
          case Func::Exp: return numkit::exp(u);
          case Func::Ln: return numkit::log(u);
          case Func::Sqrt: return numkit::sqrt(u);
        }
      }
    }
    throw EvalError("corrupt expression tree");
  }

  double eval_val_node(int id, const std::map<std::string, double>& env) const {
    const Node& n = node(id);
    switch (n.kind) {
      case Kind::Lit: return n.lit;
      case Kind::Ident: {
        auto it = env.find(n.ident);
        if (it == env.end()) throw EvalError("unbound identifier '" + n.ident + "'");
        return it->second;
      }
      case Kind::Add: return eval_val_node(n.a, env) + eval_val_node(n.b, env);
      case Kind::Sub: return eval_val_node(n.a, env) - eval_val_node(n.b, env);
      case Kind::Mul: return eval_val_node(n.a, env) * eval_val_node(n.b, env);
      case Kind::Div: {
        const double d = eval_val_node(n.b, env);
        if (d == 0.0) throw EvalError("division by zero value");
        return eval_val_node(n.a, env) / d;
      }
      case Kind::Neg: return -eval_val_node(n.a, env);
      case Kind::Pow: {
        const double b = eval_val_node(n.a, env), p = eval_val_node(n.b, env);
        if (std::abs(p - std::nearbyint(p)) < 1e-12 && std::abs(p) < 1e9) {
          if (b == 0.0 && p < 0) throw EvalError("0 raised to negative power");
          return std::pow(b, std::nearbyint(p));
        }
        if (b <= 0.0) throw EvalError("non-integer power of non-positive base");
        return std::pow(b, p);
      }
      case Kind::Call: {
        const double u = eval_val_node(n.a, env);
        switch (n.func) {
          case Func::Sin: return std::sin(u);
          case Func::Cos: return std::cos(u);
          case Func::Exp: return std::exp(u);
          case Func::Ln:
            if (u <= 0.0) throw EvalError("ln of non-positive value");
            return std::log(u);
          case Func::Sqrt:
            if (u <= 0.0) throw EvalError("sqrt of non-positive value");
            return std::sqrt(u);
        }
      }
    }
    throw EvalError("corrupt expression tree");
  }

  friend class Parser;
  std::vector<Node> nodes_;
  int root_ = -1;
};

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e;
    e.root_ = additive(e);
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

private:
  // additive := multiplicative (('+'|'-') multiplicative)*
  int additive(Expr& e) {
    int lhs = multiplicative(e);
    for (;;) {
      skip_ws();
      if (accept('+'))
        lhs = e.add({Expr::Kind::Add, 0, "", Func::Sin, lhs, multiplicative(e)});
      else if (accept('-'))
        lhs = e.add({Expr::Kind::Sub, 0, "", Func::Sin, lhs, multiplicative(e)});
      else
        return lhs;
    }
  }

  int multiplicative(Expr& e) {
    int lhs = unary(e);
    for (;;) {
      skip_ws();
      if (accept('*'))
        lhs = e.add({Expr::Kind::Mul, 0, "", Func::Sin, lhs, unary(e)});
      else if (accept('/'))
        lhs = e.add({Expr::Kind::Div, 0, "", Func::Sin, lhs, unary(e)});
      else
        return lhs;
    }
  }

  // Unary minus binds tighter than '*' '/' but looser than '^'.
  int unary(Expr& e) {
    skip_ws();
    if (accept('-')) return e.add({Expr::Kind::Neg, 0, "", Func::Sin, unary(e), -1});
    return power(e);
  }

  // power := atom ('^' unary)?   right-associative, exponent may be signed
  int power(Expr& e) {
    int base = atom(e);
    skip_ws();
    if (accept('^'))
      return e.add({Expr::Kind::Pow, 0, "", Func::Sin, base, unary(e)});
    return base;
  }

  int atom(Expr& e) {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = additive(e);
      skip_ws();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(e);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident_or_call(e);
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  int number(Expr& e) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    // exponent suffix: 1e-3
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      // No implicit multiplication: "2x" is a syntax error.
      if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        throw ParseError("implicit multiplication is not allowed", pos_);
      return e.add({Expr::Kind::Lit, v, "", Func::Sin, -1, -1});
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + text + "'", start);
    }
  }

  int ident_or_call(Expr& e) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name(src_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      Func f;
      if (name == "sin") f = Func::Sin;
      else if (name == "cos") f = Func::Cos;
      else if (name == "exp") f = Func::Exp;
      else if (name == "ln") f = Func::Ln;
      else if (name == "sqrt") f = Func::Sqrt;
      else throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      int arg = additive(e);
      skip_ws();
      if (!accept(')')) throw ParseError("expected ')' after call argument", pos_);
      return e.add({Expr::Kind::Call, 0, "", f, arg, -1});
    }
    return e.add({Expr::Kind::Ident, 0, name, Func::Sin, -1, -1});
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline Expr Expr::parse(std::string_view source) { return Parser(source).run(); }

}  // namespace casorati::expr
