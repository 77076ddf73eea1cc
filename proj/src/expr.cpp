#include "pencil/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pencil/errors.hpp"

namespace pencil {

ExprPtr Expr::constant(double value) {
  auto e = std::shared_ptr<Expr>(new Expr);
  e->kind_ = Kind::Constant;
  e->value_ = value;
  return e;
}

ExprPtr Expr::variable(int index) {
  auto e = std::shared_ptr<Expr>(new Expr);
  e->kind_ = Kind::Variable;
  e->var_index_ = index;
  return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr child) {
  auto e = std::shared_ptr<Expr>(new Expr);
  e->kind_ = Kind::Unary;
  e->uop_ = op;
  e->left_ = std::move(child);
  return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr left, ExprPtr right) {
  auto e = std::shared_ptr<Expr>(new Expr);
  e->kind_ = Kind::Binary;
  e->bop_ = op;
  e->left_ = std::move(left);
  e->right_ = std::move(right);
  return e;
}

namespace {

[[noreturn]] void eval_fault(const Expr& e, const char* what) {
  throw Error(ErrorKind::EvalFault,
              std::string(what) + " in subexpression " + e.to_string());
}

double ipow(double base, long long n) {
  // exponentiation by squaring, deterministic; 0^0 = 1
  double r = 1.0, b = base;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

}  // namespace

double Expr::eval(std::span<const double> point) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Variable:
      if (var_index_ < 1 || var_index_ > static_cast<int>(point.size()))
        throw Error(ErrorKind::VariableOutOfRange,
                    "variable x" + std::to_string(var_index_) +
                        " outside point of dimension " +
                        std::to_string(point.size()));
      return point[var_index_ - 1];
    case Kind::Unary: {
      double v = left_->eval(point);
      double r = 0;
      switch (uop_) {
        case UnaryOp::Neg: r = -v; break;
        case UnaryOp::Sin: r = std::sin(v); break;
        case UnaryOp::Cos: r = std::cos(v); break;
        case UnaryOp::Sqrt:
          if (v < 0) eval_fault(*this, "sqrt of negative value");
          r = std::sqrt(v);
          break;
      }
      if (!std::isfinite(r)) eval_fault(*this, "non-finite result");
      return r;
    }
    case Kind::Binary: {
      double a = left_->eval(point);
      double r = 0;
      if (bop_ == BinaryOp::Pow) {
        // exponent is an integer constant by construction
        r = ipow(a, static_cast<long long>(right_->value()));
      } else {
        double b = right_->eval(point);
        switch (bop_) {
          case BinaryOp::Add: r = a + b; break;
          case BinaryOp::Sub: r = a - b; break;
          case BinaryOp::Mul: r = a * b; break;
          case BinaryOp::Div:
            if (b == 0.0) eval_fault(*this, "division by zero");
            r = a / b;
            break;
          case BinaryOp::Pow: break;  // handled above
        }
      }
      if (!std::isfinite(r)) eval_fault(*this, "non-finite result");
      return r;
    }
  }
  eval_fault(*this, "corrupt expression node");
}

std::string Expr::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      if (value_ < 0) {
        os << "(0-" << -value_ << ")";  // keeps the grammar negative-free
      } else {
        os << value_;
      }
      break;
    case Kind::Variable:
      os << "x" << var_index_;
      break;
    case Kind::Unary:
      switch (uop_) {
        case UnaryOp::Neg: os << "(-" << left_->to_string() << ")"; break;
        case UnaryOp::Sin: os << "sin(" << left_->to_string() << ")"; break;
        case UnaryOp::Cos: os << "cos(" << left_->to_string() << ")"; break;
        case UnaryOp::Sqrt: os << "sqrt(" << left_->to_string() << ")"; break;
      }
      break;
    case Kind::Binary: {
      const char* op = "?";
      switch (bop_) {
        case BinaryOp::Add: op = "+"; break;
        case BinaryOp::Sub: op = "-"; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; break;
        case BinaryOp::Pow: op = "^"; break;
      }
      if (bop_ == BinaryOp::Pow) {
        os << "(" << left_->to_string() << "^"
           << static_cast<long long>(right_->value()) << ")";
      } else {
        os << "(" << left_->to_string() << op << right_->to_string() << ")";
      }
      break;
    }
  }
  return os.str();
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int var_count)
      : text_(text), var_count_(var_count) {}

  ExprPtr run() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression");
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorKind::SyntaxError,
                "syntax error at byte " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        ExprPtr rhs = parse_term();
        e = Expr::binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, e, rhs);
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        ExprPtr rhs = parse_factor();
        e = Expr::binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, e, rhs);
      } else {
        return e;
      }
    }
  }

  // '^' binds tighter than unary minus: -x1^2 is -(x1^2).
  ExprPtr parse_factor() {
    if (peek() == '-') {
      ++pos_;
      return Expr::unary(UnaryOp::Neg, parse_factor());
    }
    ExprPtr e = parse_atom();
    if (peek() == '^') {
      ++pos_;
      e = Expr::binary(BinaryOp::Pow, e, Expr::constant(parse_exponent()));
    }
    return e;
  }

  double parse_exponent() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected non-negative integer exponent");
    long long v = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_ || v > 1'000'000)
      fail("bad integer exponent");
    return static_cast<double>(v);
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' belonged to something else
      }
    }
    double v = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(v);
  }

  ExprPtr parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name.size() >= 2 && name[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      int idx = 0;
      auto [ptr, ec] =
          std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc() && ptr == name.data() + name.size()) {
        if (idx < 1 || idx > var_count_) {
          pos_ = start;
          throw Error(ErrorKind::VariableOutOfRange,
                      "variable " + name + " out of range 1.." +
                          std::to_string(var_count_) + " at byte " +
                          std::to_string(start));
        }
        return Expr::variable(idx);
      }
    }
    UnaryOp op;
    if (name == "sin") {
      op = UnaryOp::Sin;
    } else if (name == "cos") {
      op = UnaryOp::Cos;
    } else if (name == "sqrt") {
      op = UnaryOp::Sqrt;
    } else {
      pos_ = start;
      throw Error(ErrorKind::UnknownFunction,
                  "unknown identifier '" + name + "' at byte " +
                      std::to_string(start));
    }
    if (!eat('(')) fail("expected '(' after function name");
    ExprPtr arg = parse_sum();
    if (!eat(')')) fail("expected ')'");
    return Expr::unary(op, arg);
  }

  std::string_view text_;
  int var_count_;
  size_t pos_ = 0;
};

bool is_const(const ExprPtr& e, double v) {
  return e->kind() == Expr::Kind::Constant && e->value() == v;
}

}  // namespace

ExprPtr parse_expr(std::string_view text, int var_count) {
  return Parser(text, var_count).run();
}

ExprPtr expr_add(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (a->kind() == Expr::Kind::Constant && b->kind() == Expr::Kind::Constant)
    return Expr::constant(a->value() + b->value());
  return Expr::binary(BinaryOp::Add, a, b);
}

ExprPtr expr_sub(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(b, 0)) return a;
  if (a->kind() == Expr::Kind::Constant && b->kind() == Expr::Kind::Constant)
    return Expr::constant(a->value() - b->value());
  return Expr::binary(BinaryOp::Sub, a, b);
}

ExprPtr expr_mul(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a, 0) || is_const(b, 0)) return Expr::constant(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (a->kind() == Expr::Kind::Constant && b->kind() == Expr::Kind::Constant)
    return Expr::constant(a->value() * b->value());
  return Expr::binary(BinaryOp::Mul, a, b);
}

ExprPtr expr_div(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a, 0)) return Expr::constant(0);
  if (is_const(b, 1)) return a;
  return Expr::binary(BinaryOp::Div, a, b);
}

ExprPtr expr_neg(const ExprPtr& a) {
  if (a->kind() == Expr::Kind::Constant) return Expr::constant(-a->value());
  return Expr::unary(UnaryOp::Neg, a);
}

}  // namespace pencil
