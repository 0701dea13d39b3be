#pragma once

#include <memory>
#include <string>

namespace hdg {

/// Arithmetic expressions over x, y, t for config-supplied fields.
/// Grammar: + - * / ^ (right assoc), unary minus, parentheses, numbers,
/// the constant pi, and one/two-argument functions
/// (sin cos tan exp log sqrt abs tanh min max pow).
class Expr {
public:
  Expr() = default;
  /// throws std::runtime_error with a caret diagnostic on bad input
  static Expr parse(const std::string& text);
  double operator()(double x, double y, double t = 0.0) const;
  bool empty() const { return !root_; }
  const std::string& text() const { return text_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

} // namespace hdg
