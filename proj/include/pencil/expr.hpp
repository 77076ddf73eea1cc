#pragma once

// Scalar expression trees over variables x1..xm.  Entries of the pencil's
// matrix-functions are stored in this form; trees are immutable after
// construction and safe to evaluate concurrently.

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace pencil {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Neg, Sin, Cos, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

class Expr {
 public:
  enum class Kind { Constant, Variable, Unary, Binary };

  static ExprPtr constant(double value);
  static ExprPtr variable(int index);  // 1-based
  static ExprPtr unary(UnaryOp op, ExprPtr child);
  static ExprPtr binary(BinaryOp op, ExprPtr left, ExprPtr right);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  int var_index() const { return var_index_; }
  UnaryOp unary_op() const { return uop_; }
  BinaryOp binary_op() const { return bop_; }
  const ExprPtr& left() const { return left_; }
  const ExprPtr& right() const { return right_; }

  /// IEEE double evaluation; throws Error(EvalFault) on division by zero,
  /// sqrt of a negative, or a non-finite intermediate.
  double eval(std::span<const double> point) const;

  /// Fully parenthesized form that reparses to the same tree.
  std::string to_string() const;

 private:
  Expr() = default;
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  int var_index_ = 0;
  UnaryOp uop_ = UnaryOp::Neg;
  BinaryOp bop_ = BinaryOp::Add;
  ExprPtr left_, right_;
};

/// Recursive-descent parser for the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' integer)?
///   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
/// with identifiers x1..x<var_count>, sin, cos, sqrt.  Exponents are
/// non-negative integer literals.  Errors carry the byte offset.
ExprPtr parse_expr(std::string_view text, int var_count);

// Construction helpers that fold constants with 0/1 so that generated
// matrix entries stay readable.  No rewriting beyond that.
ExprPtr expr_add(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_sub(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_mul(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_div(const ExprPtr& a, const ExprPtr& b);
ExprPtr expr_neg(const ExprPtr& a);

}  // namespace pencil
