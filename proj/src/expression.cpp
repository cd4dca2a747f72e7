#include "pacurves/expression.hpp"

#include "pacurves/error.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

namespace pacurves {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Fn {
  Sin, Cos, Tan, Sinh, Cosh, Tanh, Sech, Csch, Coth, Sec,
  Asin, Acos, Atan, Asinh, Atanh, Sqrt, Log, Exp, Abs,
};

struct Expression::Node {
  Op op = Op::Constant;
  double constant = 0.0;
  Fn fn = Fn::Sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

const std::map<std::string, Fn>& function_table() {
  static const std::map<std::string, Fn> table = {
      {"sin", Fn::Sin},     {"cos", Fn::Cos},       {"tan", Fn::Tan},     {"sinh", Fn::Sinh},
      {"cosh", Fn::Cosh},   {"tanh", Fn::Tanh},     {"sech", Fn::Sech},   {"csch", Fn::Csch},
      {"coth", Fn::Coth},   {"sec", Fn::Sec},       {"asin", Fn::Asin},   {"arcsin", Fn::Asin},
      {"acos", Fn::Acos},   {"arccos", Fn::Acos},   {"atan", Fn::Atan},   {"arctan", Fn::Atan},
      {"asinh", Fn::Asinh}, {"arcsinh", Fn::Asinh}, {"atanh", Fn::Atanh}, {"arctanh", Fn::Atanh},
      {"sqrt", Fn::Sqrt},   {"log", Fn::Log},       {"ln", Fn::Log},      {"exp", Fn::Exp},
      {"abs", Fn::Abs},
  };
  return table;
}

NodePtr make_constant(double c) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Constant;
  n->constant = c;
  return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::string& variable, const Expression::Definitions& defs,
         std::map<std::string, NodePtr>& resolved, std::set<std::string>& in_progress)
      : text_(text), variable_(variable), defs_(defs), resolved_(resolved), in_progress_(in_progress) {}

  NodePtr parse_all() {
    NodePtr root = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::Usage, "expression '" + std::string(text_) + "': " + what + " at offset " +
                                      std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_node(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Op::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!accept(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("bad number '" + token + "'");
    }
    if (used != token.size()) fail("bad number '" + token + "'");
    return make_constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      const auto it = function_table().find(name);
      if (it == function_table().end()) fail("unknown function '" + name + "'");
      ++pos_;
      NodePtr arg = parse_sum();
      if (!accept(')')) fail("missing ')'");
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Call;
      n->fn = it->second;
      n->lhs = std::move(arg);
      return n;
    }
    if (name == variable_) return make_node(Op::Variable, nullptr);
    if (name == "pi") return make_constant(std::numbers::pi);
    if (name == "e") return make_constant(std::numbers::e);
    return resolve_definition(name);
  }

  NodePtr resolve_definition(const std::string& name) {
    if (auto it = resolved_.find(name); it != resolved_.end()) return it->second;
    const auto def = defs_.find(name);
    if (def == defs_.end()) fail("unknown identifier '" + name + "'");
    if (!in_progress_.insert(name).second) fail("definition cycle through '" + name + "'");
    Parser sub(def->second, variable_, defs_, resolved_, in_progress_);
    NodePtr node = sub.parse_all();
    in_progress_.erase(name);
    resolved_[name] = node;
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const std::string& variable_;
  const Expression::Definitions& defs_;
  std::map<std::string, NodePtr>& resolved_;
  std::set<std::string>& in_progress_;
};

Dual apply(Fn fn, Dual a) {
  const double x = a.value;
  const double dx = a.derivative;
  switch (fn) {
    case Fn::Sin: return {std::sin(x), std::cos(x) * dx};
    case Fn::Cos: return {std::cos(x), -std::sin(x) * dx};
    case Fn::Tan: {
      const double c = std::cos(x);
      return {std::tan(x), dx / (c * c)};
    }
    case Fn::Sinh: return {std::sinh(x), std::cosh(x) * dx};
    case Fn::Cosh: return {std::cosh(x), std::sinh(x) * dx};
    case Fn::Tanh: {
      const double c = std::cosh(x);
      return {std::tanh(x), dx / (c * c)};
    }
    case Fn::Sech: {
      const double v = 1.0 / std::cosh(x);
      return {v, -v * std::tanh(x) * dx};
    }
    case Fn::Csch: {
      const double v = 1.0 / std::sinh(x);
      return {v, -v * (std::cosh(x) / std::sinh(x)) * dx};
    }
    case Fn::Coth: {
      const double sh = std::sinh(x);
      return {std::cosh(x) / sh, -dx / (sh * sh)};
    }
    case Fn::Sec: {
      const double v = 1.0 / std::cos(x);
      return {v, v * std::tan(x) * dx};
    }
    case Fn::Asin: return {std::asin(x), dx / std::sqrt(1.0 - x * x)};
    case Fn::Acos: return {std::acos(x), -dx / std::sqrt(1.0 - x * x)};
    case Fn::Atan: return {std::atan(x), dx / (1.0 + x * x)};
    case Fn::Asinh: return {std::asinh(x), dx / std::sqrt(1.0 + x * x)};
    case Fn::Atanh: return {std::atanh(x), dx / (1.0 - x * x)};
    case Fn::Sqrt: {
      const double v = std::sqrt(x);
      return {v, 0.5 * dx / v};
    }
    case Fn::Log: return {std::log(x), dx / x};
    case Fn::Exp: {
      const double v = std::exp(x);
      return {v, v * dx};
    }
    case Fn::Abs: return {std::abs(x), (x < 0.0 ? -dx : dx)};
  }
  return {};
}

Dual evaluate(const Expression::Node& n, double x) {
  switch (n.op) {
    case Op::Constant: return {n.constant, 0.0};
    case Op::Variable: return {x, 1.0};
    case Op::Neg: {
      const Dual a = evaluate(*n.lhs, x);
      return {-a.value, -a.derivative};
    }
    case Op::Add: {
      const Dual a = evaluate(*n.lhs, x);
      const Dual b = evaluate(*n.rhs, x);
      return {a.value + b.value, a.derivative + b.derivative};
    }
    case Op::Sub: {
      const Dual a = evaluate(*n.lhs, x);
      const Dual b = evaluate(*n.rhs, x);
      return {a.value - b.value, a.derivative - b.derivative};
    }
    case Op::Mul: {
      const Dual a = evaluate(*n.lhs, x);
      const Dual b = evaluate(*n.rhs, x);
      return {a.value * b.value, a.derivative * b.value + a.value * b.derivative};
    }
    case Op::Div: {
      const Dual a = evaluate(*n.lhs, x);
      const Dual b = evaluate(*n.rhs, x);
      return {a.value / b.value, (a.derivative * b.value - a.value * b.derivative) / (b.value * b.value)};
    }
    case Op::Pow: {
      const Dual a = evaluate(*n.lhs, x);
      const Dual b = evaluate(*n.rhs, x);
      if (b.derivative == 0.0) {
        const double v = std::pow(a.value, b.value);
        const double d = b.value == 0.0 ? 0.0 : b.value * std::pow(a.value, b.value - 1.0) * a.derivative;
        return {v, d};
      }
      const double v = std::pow(a.value, b.value);
      return {v, v * (b.derivative * std::log(a.value) + b.value * a.derivative / a.value)};
    }
    case Op::Call: return apply(n.fn, evaluate(*n.lhs, x));
  }
  return {};
}

}  // namespace

Expression Expression::parse(std::string_view text, std::string variable, const Definitions& definitions) {
  std::map<std::string, NodePtr> resolved;
  std::set<std::string> in_progress;
  Parser parser(text, variable, definitions, resolved, in_progress);
  return Expression(parser.parse_all(), std::string(text));
}

Dual Expression::eval(double x) const { return evaluate(*root_, x); }

ScalarSeries sample(const Expression& expr, const Grid& grid) {
  std::vector<double> v(grid.size());
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Dual r = expr.eval(grid[i]);
    if (!std::isfinite(r.value) || !std::isfinite(r.derivative)) {
      throw Error(ErrorCode::Domain, "expression '" + expr.text() + "' is not finite", grid[i]);
    }
    v[i] = r.value;
    d[i] = r.derivative;
  }
  return ScalarSeries(grid, std::move(v), std::move(d));
}

}  // namespace pacurves
