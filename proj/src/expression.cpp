#include "plarod/expression.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace plarod {

namespace {
enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt };
}  // namespace

struct Expression::Node {
  Op op = Op::Const;
  double value = 0.0;
  int var = 0;  // 0..2 for x1..x3
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos_) + ": " + what + " in '" +
                                s_ + "'");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  static NodePtr constant(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
  }

  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (eat('+'))
        e = make(Op::Add, e, term());
      else if (eat('-'))
        e = make(Op::Sub, e, term());
      else
        return e;
    }
  }
  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (eat('*'))
        e = make(Op::Mul, e, unary());
      else if (eat('/'))
        e = make(Op::Div, e, unary());
      else
        return e;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::Pow, base, unary());  // right associative
    return base;
  }
  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected operand");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }
  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    try {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(pos_, end - pos_), &used);
      pos_ += used;
      return constant(v);
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
  NodePtr identifier() {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) ||
                               s_[end] == '_'))
      ++end;
    const std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "x1" || name == "x") return variable(0);
    if (name == "x2" || name == "y") return variable(1);
    if (name == "x3" || name == "z") return variable(2);
    if (name == "pi") return constant(M_PI);
    Op op;
    if (name == "sin")
      op = Op::Sin;
    else if (name == "cos")
      op = Op::Cos;
    else if (name == "exp")
      op = Op::Exp;
    else if (name == "sqrt")
      op = Op::Sqrt;
    else
      fail("unknown identifier '" + name + "'");
    if (!eat('(')) fail("expected '(' after function name");
    NodePtr arg = expr();
    if (!eat(')')) fail("expected ')'");
    return make(op, arg);
  }
  NodePtr variable(int idx) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Var;
    n->var = idx;
    return n;
  }
};

double eval_node(const Expression::Node& n, double x1, double x2, double x3) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return n.var == 0 ? x1 : (n.var == 1 ? x2 : x3);
    case Op::Add: return eval_node(*n.a, x1, x2, x3) + eval_node(*n.b, x1, x2, x3);
    case Op::Sub: return eval_node(*n.a, x1, x2, x3) - eval_node(*n.b, x1, x2, x3);
    case Op::Mul: return eval_node(*n.a, x1, x2, x3) * eval_node(*n.b, x1, x2, x3);
    case Op::Div: return eval_node(*n.a, x1, x2, x3) / eval_node(*n.b, x1, x2, x3);
    case Op::Pow:
      return std::pow(eval_node(*n.a, x1, x2, x3), eval_node(*n.b, x1, x2, x3));
    case Op::Neg: return -eval_node(*n.a, x1, x2, x3);
    case Op::Sin: return std::sin(eval_node(*n.a, x1, x2, x3));
    case Op::Cos: return std::cos(eval_node(*n.a, x1, x2, x3));
    case Op::Exp: return std::exp(eval_node(*n.a, x1, x2, x3));
    case Op::Sqrt: return std::sqrt(eval_node(*n.a, x1, x2, x3));
  }
  return 0.0;
}

}  // namespace

Expression::Expression() : text_("0") {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = 0.0;
  root_ = n;
}

Expression::Expression(const std::string& text) : text_(text) {
  root_ = Parser(text).parse();
}

double Expression::eval(double x1, double x2, double x3) const {
  return eval_node(*root_, x1, x2, x3);
}

bool Expression::is_zero_literal() const {
  return root_->op == Op::Const && root_->value == 0.0;
}

}  // namespace plarod
