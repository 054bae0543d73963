#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ncv {

/// Closed-form expression from a fixed whitelist: numbers, named variables,
/// + - * /, integer powers `^n` (n >= 0), unary minus, parentheses, abs(e),
/// min(e, ...) and max(e, ...). Division is only accepted by constant
/// subexpressions, so every expression is a polynomial/abs/min/max composition.
class Expression {
 public:
  /// Parses `text`; variables must come from `variables`. Throws InvalidInput
  /// with the character offset of the offending token.
  static Expression parse(const std::string& text, const std::vector<std::string>& variables);

  /// Evaluates with variables bound positionally, in the order given to parse().
  double operator()(const std::vector<double>& args) const;
  double operator()(double x) const { return (*this)(std::vector<double>{x}); }

  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace ncv
