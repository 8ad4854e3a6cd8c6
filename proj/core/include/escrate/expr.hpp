#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace escrate {

/// A real expression in one variable `x`, parsed once and evaluated many
/// times. Grammar: + - * / ^, unary minus, parentheses, numeric literals,
/// the constants pi and e, and sin cos tan exp log sqrt abs.
class Expression {
 public:
  /// Throws InvalidInput on a syntax error.
  static Expression parse(std::string_view text);

  double operator()(double x) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace escrate
