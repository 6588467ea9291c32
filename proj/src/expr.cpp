#include "bracketgeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>

#include "bracketgeo/error.hpp"

namespace bracketgeo {

namespace {

struct Token {
  enum class Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
  Type type;
  std::size_t offset;
  std::string text;
  double number = 0.0;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      std::string text(s.substr(i, j - i));
      out.push_back({Token::Type::Number, i, text, std::strtod(text.c_str(), nullptr)});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Type::Ident, i, std::string(s.substr(i, j - i))});
      i = j;
      continue;
    }
    Token::Type t;
    switch (c) {
      case '+': t = Token::Type::Plus; break;
      case '-': t = Token::Type::Minus; break;
      case '*': t = Token::Type::Star; break;
      case '/': t = Token::Type::Slash; break;
      case '^': t = Token::Type::Caret; break;
      case '(': t = Token::Type::LParen; break;
      case ')': t = Token::Type::RParen; break;
      case ',': t = Token::Type::Comma; break;
      default:
        throw ParseError(ParseErrorKind::Lexical, i, std::string("unexpected character '") + c + "'");
    }
    out.push_back({t, i, std::string(1, c)});
    ++i;
  }
  out.push_back({Token::Type::End, s.size(), ""});
  return out;
}

std::optional<UnaryFn> function_named(std::string_view name) {
  if (name == "sin") return UnaryFn::Sin;
  if (name == "cos") return UnaryFn::Cos;
  if (name == "exp") return UnaryFn::Exp;
  if (name == "log") return UnaryFn::Log;
  if (name == "sinh") return UnaryFn::Sinh;
  if (name == "cosh") return UnaryFn::Cosh;
  if (name == "sqrt") return UnaryFn::Sqrt;
  return std::nullopt;
}

const char* function_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Sinh: return "sinh";
    case UnaryFn::Cosh: return "cosh";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Neg: return "-";
  }
  return "?";
}

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_variable(int idx) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Variable;
  n->variable = idx;
  return n;
}

NodePtr make_unary(UnaryFn fn, NodePtr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Unary;
  n->fn = fn;
  n->lhs = std::move(arg);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Binary;
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_power(NodePtr base, double exponent) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Power;
  n->lhs = std::move(base);
  n->value = exponent;
  return n;
}

bool has_variables(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Constant: return false;
    case ExprNode::Kind::Variable: return true;
    case ExprNode::Kind::Unary:
    case ExprNode::Kind::Power: return has_variables(*n.lhs);
    case ExprNode::Kind::Binary: return has_variables(*n.lhs) || has_variables(*n.rhs);
  }
  return true;
}

template <class T>
struct Ops;

template <>
struct Ops<double> {
  static double unary(UnaryFn fn, double x) {
    switch (fn) {
      case UnaryFn::Neg: return -x;
      case UnaryFn::Sin: return std::sin(x);
      case UnaryFn::Cos: return std::cos(x);
      case UnaryFn::Exp: return std::exp(x);
      case UnaryFn::Log:
        if (!(x > 0.0)) throw DomainError("log of non-positive value");
        return std::log(x);
      case UnaryFn::Sinh: return std::sinh(x);
      case UnaryFn::Cosh: return std::cosh(x);
      case UnaryFn::Sqrt:
        if (x < 0.0) throw DomainError("sqrt of negative value");
        return std::sqrt(x);
    }
    return 0.0;
  }
  static double divide(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
  }
  static double power(double x, double e) {
    if (x < 0.0 && std::floor(e) != e) throw DomainError("non-integer power of negative value");
    if (x == 0.0 && e < 0.0) throw DomainError("negative power of zero");
    return std::pow(x, e);
  }
};

template <>
struct Ops<Jet> {
  static Jet unary(UnaryFn fn, const Jet& x) {
    switch (fn) {
      case UnaryFn::Neg: return -x;
      case UnaryFn::Sin: return sin(x);
      case UnaryFn::Cos: return cos(x);
      case UnaryFn::Exp: return exp(x);
      case UnaryFn::Log: return log(x);
      case UnaryFn::Sinh: return sinh(x);
      case UnaryFn::Cosh: return cosh(x);
      case UnaryFn::Sqrt: return sqrt(x);
    }
    return x;
  }
  static Jet divide(const Jet& a, const Jet& b) { return a / b; }
  static Jet power(const Jet& x, double e) { return pow(x, e); }
};

template <class T, class MakeConst>
T evaluate(const ExprNode& n, std::span<const T> args, const MakeConst& make_const) {
  switch (n.kind) {
    case ExprNode::Kind::Constant: return make_const(n.value);
    case ExprNode::Kind::Variable: return args[static_cast<std::size_t>(n.variable)];
    case ExprNode::Kind::Unary: return Ops<T>::unary(n.fn, evaluate(*n.lhs, args, make_const));
    case ExprNode::Kind::Power: return Ops<T>::power(evaluate(*n.lhs, args, make_const), n.value);
    case ExprNode::Kind::Binary: {
      T a = evaluate(*n.lhs, args, make_const);
      T b = evaluate(*n.rhs, args, make_const);
      switch (n.op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return Ops<T>::divide(a, b);
      }
    }
  }
  return make_const(0.0);
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars) : tokens_(lex(text)), vars_(vars) {}

  NodePtr parse_all() {
    NodePtr e = sum();
    const Token& t = peek();
    if (t.type == Token::Type::RParen) throw ParseError(ParseErrorKind::UnbalancedParentheses, t.offset, "unmatched ')'");
    if (t.type != Token::Type::End) throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "unexpected token '" + t.text + "'");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  NodePtr sum() {
    NodePtr lhs = product();
    while (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
      BinaryOp op = next().type == Token::Type::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = make_binary(op, lhs, product());
    }
    return lhs;
  }

  NodePtr product() {
    NodePtr lhs = unary();
    while (peek().type == Token::Type::Star || peek().type == Token::Type::Slash) {
      BinaryOp op = next().type == Token::Type::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = make_binary(op, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().type == Token::Type::Minus) {
      next();
      return make_unary(UnaryFn::Neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().type == Token::Type::Caret) {
      next();
      const std::size_t at = peek().offset;
      NodePtr exponent = unary();
      if (has_variables(*exponent)) throw ParseError(ParseErrorKind::NonConstantExponent, at, "exponent must be constant");
      const double e = evaluate<double>(*exponent, {}, [](double v) { return v; });
      return make_power(base, e);
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = next();
    switch (t.type) {
      case Token::Type::Number: return make_constant(t.number);
      case Token::Type::LParen: {
        NodePtr inner = sum();
        if (peek().type != Token::Type::RParen) {
          if (peek().type == Token::Type::End) throw ParseError(ParseErrorKind::UnbalancedParentheses, t.offset, "unclosed '('");
          throw ParseError(ParseErrorKind::UnexpectedToken, peek().offset, "expected ')'");
        }
        next();
        return inner;
      }
      case Token::Type::Ident: return identifier(t);
      case Token::Type::RParen: throw ParseError(ParseErrorKind::UnbalancedParentheses, t.offset, "unmatched ')'");
      case Token::Type::End: throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "unexpected end of input");
      default: throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "unexpected token '" + t.text + "'");
    }
  }

  NodePtr identifier(const Token& t) {
    if (auto fn = function_named(t.text)) {
      if (peek().type != Token::Type::LParen) throw ParseError(ParseErrorKind::ArityMismatch, t.offset, "function '" + t.text + "' takes one argument");
      const Token& open = next();
      if (peek().type == Token::Type::RParen) throw ParseError(ParseErrorKind::ArityMismatch, t.offset, "function '" + t.text + "' takes one argument");
      NodePtr arg = sum();
      if (peek().type == Token::Type::Comma) throw ParseError(ParseErrorKind::ArityMismatch, t.offset, "function '" + t.text + "' takes one argument");
      if (peek().type != Token::Type::RParen) {
        if (peek().type == Token::Type::End) throw ParseError(ParseErrorKind::UnbalancedParentheses, open.offset, "unclosed '('");
        throw ParseError(ParseErrorKind::UnexpectedToken, peek().offset, "expected ')'");
      }
      next();
      return make_unary(*fn, arg);
    }
    NodePtr node;
    if (t.text == "pi") {
      node = make_constant(std::numbers::pi);
    } else if (t.text == "e") {
      node = make_constant(std::numbers::e);
    } else {
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == t.text) node = make_variable(static_cast<int>(i));
      }
      if (!node) throw ParseError(ParseErrorKind::UnknownIdentifier, t.offset, "unknown identifier '" + t.text + "'");
    }
    if (peek().type == Token::Type::LParen) throw ParseError(ParseErrorKind::ArityMismatch, t.offset, "'" + t.text + "' is not a function");
    return node;
  }

  std::vector<Token> tokens_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

// Precedence levels used by the printer.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Binary: return (n.op == BinaryOp::Add || n.op == BinaryOp::Sub) ? 1 : 2;
    case ExprNode::Kind::Unary: return n.fn == UnaryFn::Neg ? 3 : 5;
    case ExprNode::Kind::Power: return 4;
    case ExprNode::Kind::Constant: return n.value < 0.0 ? 3 : 5;
    case ExprNode::Kind::Variable: return 5;
  }
  return 5;
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_node(const ExprNode& n, std::span<const std::string> names) {
  auto wrap = [&](const ExprNode& child, bool parens) {
    std::string s = print_node(child, names);
    return parens ? "(" + s + ")" : s;
  };
  switch (n.kind) {
    case ExprNode::Kind::Constant: return number_text(n.value);
    case ExprNode::Kind::Variable: {
      const auto idx = static_cast<std::size_t>(n.variable);
      return idx < names.size() ? names[idx] : "_" + std::to_string(n.variable);
    }
    case ExprNode::Kind::Unary:
      if (n.fn == UnaryFn::Neg) return "-" + wrap(*n.lhs, precedence(*n.lhs) < 3);
      return std::string(function_name(n.fn)) + "(" + print_node(*n.lhs, names) + ")";
    case ExprNode::Kind::Power: return wrap(*n.lhs, precedence(*n.lhs) < 5) + "^" + number_text(n.value);
    case ExprNode::Kind::Binary: {
      const int p = precedence(n);
      const char* sym = n.op == BinaryOp::Add ? "+" : n.op == BinaryOp::Sub ? "-" : n.op == BinaryOp::Mul ? "*" : "/";
      return wrap(*n.lhs, precedence(*n.lhs) < p) + sym + wrap(*n.rhs, precedence(*n.rhs) <= p);
    }
  }
  return "";
}

}  // namespace

Expr Expr::constant(double v, int arity) { return Expr(make_constant(v), arity); }

Expr Expr::variable(int index, int arity) {
  if (index < 0 || index >= arity) throw ShapeError("variable index out of range");
  return Expr(make_variable(index), arity);
}

bool Expr::is_constant() const { return !has_variables(*root_); }

bool Expr::is_zero_literal() const { return root_->kind == ExprNode::Kind::Constant && root_->value == 0.0; }

double Expr::eval(std::span<const double> args) const {
  if (static_cast<int>(args.size()) != arity_) throw ShapeError("expression expects " + std::to_string(arity_) + " arguments, got " + std::to_string(args.size()));
  return evaluate<double>(*root_, args, [](double v) { return v; });
}

Jet Expr::eval_jet(std::span<const Jet> args) const {
  if (args.empty()) throw ShapeError("eval_jet without arguments needs an explicit jet shape");
  return eval_jet(args, args[0].dim(), args[0].order());
}

Jet Expr::eval_jet(std::span<const Jet> args, int dim, int order) const {
  if (static_cast<int>(args.size()) != arity_) throw ShapeError("expression expects " + std::to_string(arity_) + " arguments, got " + std::to_string(args.size()));
  for (const Jet& a : args) {
    if (a.dim() != dim) throw ShapeError("argument jets do not share a dimension");
    if (a.order() < order) order = a.order();
  }
  return evaluate<Jet>(*root_, args, [&](double v) { return Jet::constant(v, dim, order); });
}

std::string Expr::print(std::span<const std::string> names) const { return print_node(*root_, names); }

bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::Constant: return a.value == b.value;
    case ExprNode::Kind::Variable: return a.variable == b.variable;
    case ExprNode::Kind::Unary: return a.fn == b.fn && same_tree(*a.lhs, *b.lhs);
    case ExprNode::Kind::Power: return a.value == b.value && same_tree(*a.lhs, *b.lhs);
    case ExprNode::Kind::Binary: return a.op == b.op && same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
  return false;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return a.arity_ == b.arity_ && same_tree(*a.root_, *b.root_);
}

Expr parse(std::string_view text, std::span<const std::string> variables) {
  for (const auto& v : variables) {
    if (v == "pi" || v == "e" || function_named(v)) throw ConfigError("'" + v + "' is reserved and cannot name a variable");
  }
  Parser p(text, variables);
  return Expr(p.parse_all(), static_cast<int>(variables.size()));
}

std::vector<std::string> numbered_names(std::string_view prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(std::string(prefix) + std::to_string(i));
  return out;
}

}  // namespace bracketgeo
