#pragma once

#include <memory>
#include <string>
#include <vector>

namespace fracsource::expr {

/// Arithmetic expression in named variables, parsed once and evaluated many
/// times.
///
/// Grammar: + - * / ^ (right-associative), unary minus, parentheses, numbers,
/// constants pi and e, and the functions sin cos tan exp log sqrt abs.
class Expression {
 public:
  /// Throws std::invalid_argument on a syntax error or unknown name.
  Expression(const std::string& text, std::vector<std::string> variables = {"x"});
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double operator()(double v) const { return eval(&v); }
  /// One value per declared variable, in declaration order.
  double eval(const double* values) const;

  const std::string& text() const { return text_; }

  struct Node;  // parse tree

 private:
  std::string text_;
  std::vector<std::string> vars_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fracsource::expr
