#pragma once

#include <memory>
#include <string>

namespace plarod {

/// Arithmetic expression over the coordinates x1, x2, x3 with
/// +, -, *, /, ^, sin, cos, exp, sqrt, pi and numeric literals.
class Expression {
 public:
  Expression();                       // the zero expression
  explicit Expression(const std::string& text);

  double eval(double x1, double x2, double x3) const;
  const std::string& text() const { return text_; }
  bool is_zero_literal() const;

  struct Node;  // implementation detail, defined in the source file

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace plarod
