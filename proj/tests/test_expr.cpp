#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "casorati/expr.hpp"

using casorati::expr::Expr;
using casorati::expr::EvalError;
using casorati::expr::ParseError;
using casorati::numkit::Jet;

namespace {

using K = Expr::Kind;

std::map<std::string, Jet> env1(const std::string& name, double v) {
  return {{name, Jet::variable(v, 1, 0, 2)}};
}

double fd(const Expr& e, const std::map<std::string, double>& env, const std::string& wrt,
          double h = 1e-5) {
  auto hi = env, lo = env;
  hi[wrt] += h;
  lo[wrt] -= h;
  return (e.eval_value(hi) - e.eval_value(lo)) / (2 * h);
}

}  // namespace

TEST(Parse, PowerTree) {
  Expr e = Expr::parse("x6^2");
  const auto& root = e.node(e.root());
  EXPECT_EQ(root.kind, K::Pow);
  EXPECT_EQ(e.node(root.a).kind, K::Ident);
  EXPECT_EQ(e.node(root.a).ident, "x6");
  EXPECT_EQ(e.node(root.b).kind, K::Lit);
  EXPECT_DOUBLE_EQ(e.node(root.b).lit, 2.0);
}

TEST(Parse, UnaryMinusBindsTighterThanDivision) {
  Expr e = Expr::parse("-1/x6");
  const auto& root = e.node(e.root());
  EXPECT_EQ(root.kind, K::Div);
  EXPECT_EQ(e.node(root.a).kind, K::Neg);
  EXPECT_EQ(e.node(e.node(root.a).a).kind, K::Lit);
  EXPECT_EQ(e.node(root.b).kind, K::Ident);
}

TEST(Parse, PowerIsRightAssociative) {
  Expr e = Expr::parse("2*a^3^2");
  const auto& root = e.node(e.root());
  EXPECT_EQ(root.kind, K::Mul);
  const auto& pow = e.node(root.b);
  EXPECT_EQ(pow.kind, K::Pow);
  EXPECT_EQ(e.node(pow.a).ident, "a");
  const auto& inner = e.node(pow.b);
  EXPECT_EQ(inner.kind, K::Pow);
  // a^(3^2) = a^9
  auto env = env1("a", 1.3);
  EXPECT_NEAR(e.eval(env).value(), 2.0 * std::pow(1.3, 9.0), 1e-12);
}

TEST(Parse, Errors) {
  EXPECT_THROW(Expr::parse("2x"), ParseError);
  EXPECT_THROW(Expr::parse("foo(1)"), ParseError);
  EXPECT_THROW(Expr::parse("1 +"), ParseError);
  EXPECT_THROW(Expr::parse("(1"), ParseError);
  try {
    Expr::parse("1 + @");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset, 4u);
  }
}

TEST(Parse, UnknownIdentifierDeferredToEval) {
  Expr e = Expr::parse("nope + 1");
  EXPECT_THROW(e.eval(env1("x", 1.0)), EvalError);
}

TEST(Eval, SquareJet) {
  Expr e = Expr::parse("x6^2");
  Jet y = e.eval(env1("x6", 3.0));
  EXPECT_DOUBLE_EQ(y.value(), 9.0);
  EXPECT_DOUBLE_EQ(y.d(0), 6.0);
  EXPECT_DOUBLE_EQ(y.d2(0, 0), 2.0);
}

TEST(Eval, ExpJet) {
  Expr e = Expr::parse("exp(t)");
  Jet y = e.eval(env1("t", 0.0));
  EXPECT_DOUBLE_EQ(y.value(), 1.0);
  EXPECT_DOUBLE_EQ(y.d(0), 1.0);
  EXPECT_DOUBLE_EQ(y.d2(0, 0), 1.0);
}

TEST(Eval, HypotenuseGradient) {
  Expr e = Expr::parse("sqrt(x1^2 + x2^2)");
  std::map<std::string, Jet> env = {{"x1", Jet::variable(3.0, 2, 0, 2)},
                                    {"x2", Jet::variable(4.0, 2, 1, 2)}};
  Jet y = e.eval(env);
  EXPECT_NEAR(y.value(), 5.0, 1e-14);
  EXPECT_NEAR(y.d(0), 0.6, 1e-12);
  EXPECT_NEAR(y.d(1), 0.8, 1e-12);
  std::map<std::string, double> venv = {{"x1", 3.0}, {"x2", 4.0}};
  EXPECT_NEAR(y.d(0), fd(e, venv, "x1"), 1e-6);
  EXPECT_NEAR(y.d(1), fd(e, venv, "x2"), 1e-6);
}

TEST(Eval, DerivativesMatchFiniteDifferencesOnCorpus) {
  const char* corpus[] = {"x6^2",      "1/x6",          "exp(2*t) + sin(x6)",
                          "x6^2*t",    "sqrt(x6^2+1)",  "cos(t)*ln(x6)",
                          "-x6^3/2",   "(x6 - t)^2",    "1.69*sin(t)^2"};
  std::map<std::string, double> venv = {{"x6", 1.37}, {"t", 0.58}};
  std::map<std::string, Jet> jenv = {{"x6", Jet::variable(1.37, 2, 0, 2)},
                                     {"t", Jet::variable(0.58, 2, 1, 2)}};
  for (const char* src : corpus) {
    Expr e = Expr::parse(src);
    Jet y = e.eval(jenv);
    EXPECT_NEAR(y.d(0), fd(e, venv, "x6"), 1e-6) << src;
    EXPECT_NEAR(y.d(1), fd(e, venv, "t"), 1e-6) << src;
  }
}

TEST(Print, RoundTripIsStable) {
  const char* corpus[] = {"x6^2",
                          "-1/x6",
                          "2*a^3^2",
                          "sqrt(x1^2 + x2^2)",
                          "(x1 - x3)/sqrt(2)",
                          "1 + x^2",
                          "-x",
                          "exp(2*t)",
                          "1.69*sin(th)^2",
                          "x1^2 + x2^2",
                          "a - (b - c)",
                          "a/(b*c)",
                          "-(a + b)^2"};
  for (const char* src : corpus) {
    Expr once = Expr::parse(src);
    const std::string printed = once.print();
    Expr twice = Expr::parse(printed);
    EXPECT_EQ(printed, twice.print()) << src;
    // and the trees evaluate identically
    std::map<std::string, double> venv = {{"x6", 1.3}, {"a", 0.7},  {"b", 1.9}, {"c", 0.4},
                                          {"x1", 1.1}, {"x2", 0.3}, {"x3", 2.2}, {"x", 0.9},
                                          {"t", 0.2},  {"th", 1.0}};
    EXPECT_NEAR(once.eval_value(venv), twice.eval_value(venv), 1e-15) << printed;
  }
}

TEST(Eval, PowerSemantics) {
  std::map<std::string, double> venv = {{"x", -2.0}, {"y", 0.5}};
  EXPECT_DOUBLE_EQ(Expr::parse("x^2").eval_value(venv), 4.0);
  EXPECT_DOUBLE_EQ(Expr::parse("x^-2").eval_value(venv), 0.25);
  EXPECT_THROW(Expr::parse("x^y").eval_value(venv), EvalError);   // fractional power, negative base
  EXPECT_THROW(Expr::parse("0^-1").eval_value(venv), EvalError);
}
