#include <doctest.h>

#include <cmath>

#include "bracketgeo/error.hpp"
#include "bracketgeo/expr.hpp"
#include "support/finite_diff.hpp"

using namespace bracketgeo;

namespace {

const std::vector<std::string> kUV = {"u1", "u2"};

ParseError parse_error(std::string_view text, std::span<const std::string> vars) {
  try {
    parse(text, vars);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for ", text);
  return ParseError(ParseErrorKind::Lexical, 0, "");
}

}  // namespace

TEST_CASE("tree shape of a product of functions") {
  Expr e = parse("sin(u1)*cos(u2)", kUV);
  const auto& r = e.root();
  REQUIRE(r.kind == ExprNode::Kind::Binary);
  CHECK(r.op == BinaryOp::Mul);
  REQUIRE(r.lhs->kind == ExprNode::Kind::Unary);
  CHECK(r.lhs->fn == UnaryFn::Sin);
  CHECK(r.lhs->lhs->kind == ExprNode::Kind::Variable);
  CHECK(r.lhs->lhs->variable == 0);
  CHECK(r.rhs->fn == UnaryFn::Cos);
  CHECK(r.rhs->lhs->variable == 1);
}

TEST_CASE("precedence and associativity") {
  const std::vector<std::string> none;
  CHECK(parse("2^3^2", none).eval({}) == 512);
  CHECK(parse("-2^2", none).eval({}) == -4);
  CHECK(parse("2^-1", none).eval({}) == 0.5);
  CHECK(parse("1 - 2 - 3", none).eval({}) == -4);
  CHECK(parse("12 / 3 / 2", none).eval({}) == 2);
  CHECK(parse("1 + 2*3^2", none).eval({}) == 19);
  CHECK(parse("(1 + 2)*3", none).eval({}) == 9);
  CHECK(parse("2*pi", none).eval({}) == doctest::Approx(2 * M_PI));
  CHECK(parse("e", none).eval({}) == doctest::Approx(std::exp(1.0)));
  CHECK(parse("1.5e2 + .5", none).eval({}) == 150.5);
}

TEST_CASE("error kinds and offsets") {
  auto e1 = parse_error("u3", kUV);
  CHECK(e1.kind() == ParseErrorKind::UnknownIdentifier);
  CHECK(e1.offset() == 0);
  auto e2 = parse_error("u1 + $", kUV);
  CHECK(e2.kind() == ParseErrorKind::Lexical);
  CHECK(e2.offset() == 5);
  auto e3 = parse_error("(u1 + u2", kUV);
  CHECK(e3.kind() == ParseErrorKind::UnbalancedParentheses);
  auto e4 = parse_error("u1 + u2)", kUV);
  CHECK(e4.kind() == ParseErrorKind::UnbalancedParentheses);
  CHECK(e4.offset() == 7);
  auto e5 = parse_error("sin(u1, u2)", kUV);
  CHECK(e5.kind() == ParseErrorKind::ArityMismatch);
  auto e6 = parse_error("2u1", kUV);
  CHECK(e6.offset() == 1);
  auto e7 = parse_error("u1^u2", kUV);
  CHECK(e7.kind() == ParseErrorKind::NonConstantExponent);
  CHECK(e7.offset() == 3);
  auto e8 = parse_error("tan(u1)", kUV);
  CHECK(e8.kind() == ParseErrorKind::UnknownIdentifier);
  CHECK(e8.offset() == 0);
  auto e9 = parse_error("", kUV);
  CHECK(e9.offset() == 0);
  CHECK_THROWS_AS(parse("u1", std::vector<std::string>{"pi"}), ConfigError);
}

TEST_CASE("jet evaluation of a product") {
  Expr e = parse("u1*u2", kUV);
  std::vector<Jet> x = {Jet::variable(0, 2.0, 2, 2), Jet::variable(1, 5.0, 2, 2)};
  Jet j = e.eval_jet(x);
  CHECK(j.value() == 10);
  CHECK(j.partial(std::vector<int>{1, 0}) == 5);
  CHECK(j.partial(std::vector<int>{0, 1}) == 2);
  CHECK(j.partial(std::vector<int>{1, 1}) == 1);
}

TEST_CASE("order-0 jet evaluation equals real evaluation") {
  const std::vector<std::string> exprs = {"sin(u1)*cos(u2)", "exp(u1*u2) - log(1 + u2)", "sqrt(u1^2 + u2^2)/(1 + cosh(u1))",
                                          "(u1 - u2)^3 + sinh(u2)", "-u1^-2 * e"};
  for (const auto& s : exprs) {
    Expr e = parse(s, kUV);
    std::vector<double> u = {0.37, 1.21};
    std::vector<Jet> x = {Jet::constant(u[0], 2, 0), Jet::constant(u[1], 2, 0)};
    CHECK(e.eval_jet(x).value() == e.eval(u));
    std::vector<Jet> x3 = {Jet::variable(0, u[0], 2, 3), Jet::variable(1, u[1], 2, 3)};
    CHECK(e.eval_jet(x3).value() == e.eval(u));
  }
}

TEST_CASE("mixed partial of exp(u1*u2) against finite differences") {
  Expr e = parse("exp(u1*u2)", kUV);
  std::vector<double> u = {0.3, 0.4};
  std::vector<Jet> x = {Jet::variable(0, u[0], 2, 3), Jet::variable(1, u[1], 2, 3)};
  const double jet = e.eval_jet(x).partial(std::vector<int>{1, 1});
  const double fd = fdtest::partial([&](std::span<const double> p) { return e.eval(p); }, u, std::vector<int>{1, 1}, 1e-3, 2);
  CHECK(jet == doctest::Approx(fd).epsilon(1e-6));
  CHECK(jet == doctest::Approx((1 + 0.12) * std::exp(0.12)).epsilon(1e-14));
}

TEST_CASE("real evaluation domain errors") {
  const std::vector<std::string> v = {"u"};
  std::vector<double> zero = {0.0}, neg = {-1.0};
  CHECK_THROWS_AS(parse("log(u)", v).eval(zero), DomainError);
  CHECK_THROWS_AS(parse("sqrt(u)", v).eval(neg), DomainError);
  CHECK_THROWS_AS(parse("1/u", v).eval(zero), DomainError);
  CHECK_THROWS_AS(parse("u^0.5", v).eval(neg), DomainError);
  CHECK(parse("u^3", v).eval(neg) == -1);
}

TEST_CASE("print and re-parse is stable") {
  const std::vector<std::string> corpus = {
      "sin(u1)*cos(u2)", "2^3^2", "(2^3)^2", "-u1^2", "(-u1)^2", "u1 - (u2 - 1)", "u1 - u2 - 1", "u1/(u2*3)",
      "u1*-u2", "--u1", "u1 - -u2", "exp(-(u1 + u2)/2)", "sqrt(1 + u1^2)^-1.5", "0.1 + 1e-30*u2", "pi*e", "((u1))",
      "log(cosh(u1)) / sinh(u2 - 0.25)", "u1^2^0.5", "3 - (-2)", "1/3"};
  for (const auto& text : corpus) {
    Expr a = parse(text, kUV);
    const std::string printed = a.print(kUV);
    Expr b = parse(printed, kUV);
    INFO(text, " -> ", printed);
    CHECK(a == b);
    CHECK(b.print(kUV) == printed);
    std::vector<double> u = {0.6, 0.35};
    CHECK(a.eval(u) == b.eval(u));
  }
}
