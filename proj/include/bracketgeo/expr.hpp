#pragma once

// Scalar expressions over named variables.
//
// Grammar (precedence low to high):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right-associative, exponent must be constant
//   primary := number | name | name '(' sum ')' | '(' sum ')'
//
// Functions: sin cos exp log sinh cosh sqrt. Reserved constants: pi e.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bracketgeo/jet.hpp"

namespace bracketgeo {

enum class UnaryFn { Neg, Sin, Cos, Exp, Log, Sinh, Cosh, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

struct ExprNode {
  enum class Kind { Constant, Variable, Unary, Binary, Power };

  Kind kind = Kind::Constant;
  double value = 0.0;     // Constant; exponent for Power
  int variable = -1;      // Variable
  UnaryFn fn = UnaryFn::Neg;
  BinaryOp op = BinaryOp::Add;
  std::shared_ptr<const ExprNode> lhs;  // Unary / Power operand, Binary left
  std::shared_ptr<const ExprNode> rhs;  // Binary right
};

class Expr {
 public:
  Expr() = default;
  Expr(std::shared_ptr<const ExprNode> root, int arity) : root_(std::move(root)), arity_(arity) {}

  static Expr constant(double v, int arity = 0);
  static Expr variable(int index, int arity);

  const ExprNode& root() const { return *root_; }
  bool empty() const { return !root_; }
  int arity() const { return arity_; }

  /// True when the tree contains no variables.
  bool is_constant() const;
  /// True when the tree is the literal constant 0.
  bool is_zero_literal() const;

  double eval(std::span<const double> args) const;
  Jet eval_jet(std::span<const Jet> args) const;
  /// As eval_jet but usable for arity-0 expressions: constants take the given shape.
  Jet eval_jet(std::span<const Jet> args, int dim, int order) const;

  /// Canonical text with minimal parentheses and %.17g numbers.
  std::string print(std::span<const std::string> names) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> root_;
  int arity_ = 0;
};

/// Parses `text`; identifiers resolve against `variables` (position = index).
Expr parse(std::string_view text, std::span<const std::string> variables);

/// Names "<prefix>1" ... "<prefix>count".
std::vector<std::string> numbered_names(std::string_view prefix, int count);

/// Structural equality of two trees.
bool same_tree(const ExprNode& a, const ExprNode& b);

}  // namespace bracketgeo
