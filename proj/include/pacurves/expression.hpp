#pragma once

#include "pacurves/numerics.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace pacurves {

/// Value and first derivative with respect to the single free variable.
struct Dual {
  double value = 0.0;
  double derivative = 0.0;
};

/// Tiny expression language for closed-form profiles: numbers, the free
/// variable, constants `pi` and `e`, named definitions, + - * / ^, and the
/// functions sin cos tan sinh cosh tanh sech csch coth sec asin/arcsin
/// acos/arccos atan/arctan asinh atanh sqrt log exp abs.
///
/// Evaluation is forward-mode differentiated, so every parsed expression
/// also yields its exact derivative.
class Expression {
 public:
  using Definitions = std::map<std::string, std::string>;

  /// Parses `text` in the free variable `variable`. Definitions may refer to
  /// the variable and to each other; cycles are rejected.
  static Expression parse(std::string_view text, std::string variable = "s",
                          const Definitions& definitions = {});

  double operator()(double x) const { return eval(x).value; }
  Dual eval(double x) const;

  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
};

/// Samples an expression on a grid, attaching its exact derivative.
ScalarSeries sample(const Expression& expr, const Grid& grid);

}  // namespace pacurves
