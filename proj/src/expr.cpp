#include "mop/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <variant>

namespace mop {

struct Expression::Node {
  enum class Kind { Number, Time, Coord, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind = Kind::Number;
  double number = 0;
  int coord = 0;
  std::string func;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double t, const SmallVec& x) const {
    switch (kind) {
      case Kind::Number: return number;
      case Kind::Time: return t;
      case Kind::Coord:
        if (coord >= x.size()) throw InvalidInput("expression: x" + std::to_string(coord + 1) + " out of range");
        return x(coord);
      case Kind::Add: return args[0]->eval(t, x) + args[1]->eval(t, x);
      case Kind::Sub: return args[0]->eval(t, x) - args[1]->eval(t, x);
      case Kind::Mul: return args[0]->eval(t, x) * args[1]->eval(t, x);
      case Kind::Div: return args[0]->eval(t, x) / args[1]->eval(t, x);
      case Kind::Pow: return std::pow(args[0]->eval(t, x), args[1]->eval(t, x));
      case Kind::Neg: return -args[0]->eval(t, x);
      case Kind::Call: return call(t, x);
    }
    return 0;
  }

  double call(double t, const SmallVec& x) const {
    const double a = args[0]->eval(t, x);
    if (func == "sin") return std::sin(a);
    if (func == "cos") return std::cos(a);
    if (func == "tan") return std::tan(a);
    if (func == "exp") return std::exp(a);
    if (func == "log") return std::log(a);
    if (func == "sqrt") return std::sqrt(a);
    if (func == "abs") return std::abs(a);
    const double b = args[1]->eval(t, x);
    if (func == "min") return std::min(a, b);
    if (func == "max") return std::max(a, b);
    if (func == "pow") return std::pow(a, b);
    throw InvalidInput("expression: unknown function " + func);
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression '" + s_ + "' at " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = binary(Kind::Add, lhs, term());
      else if (accept('-')) lhs = binary(Kind::Sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = binary(Kind::Mul, lhs, unary());
      else if (accept('/')) lhs = binary(Kind::Div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Neg;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    auto base = primary();
    if (accept('^')) return binary(Kind::Pow, base, unary());  // right associative
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Expression::Node>();
      if (accept('(')) {
        static const std::vector<std::string> unary_fns{"sin", "cos", "tan", "exp", "log", "sqrt", "abs"};
        static const std::vector<std::string> binary_fns{"min", "max", "pow"};
        const bool is_unary = std::find(unary_fns.begin(), unary_fns.end(), name) != unary_fns.end();
        const bool is_binary = std::find(binary_fns.begin(), binary_fns.end(), name) != binary_fns.end();
        if (!is_unary && !is_binary) fail("unknown function " + name);
        n->kind = Kind::Call;
        n->func = name;
        n->args.push_back(expr());
        if (is_binary) {
          if (!accept(',')) fail("expected ',' in " + name);
          n->args.push_back(expr());
        }
        if (!accept(')')) fail("expected ')' after arguments");
        return n;
      }
      if (name == "t") {
        n->kind = Kind::Time;
      } else if (name == "pi") {
        n->number = std::numbers::pi;
      } else if (name == "e") {
        n->number = std::numbers::e;
      } else if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '3') {
        n->kind = Kind::Coord;
        n->coord = name[1] - '1';
      } else {
        fail("unknown variable " + name);
      }
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression::Expression(const std::string& source) : source_(source), root_(Parser(source).parse()) {}

namespace {

bool mentions_time(const Expression::Node& n);

}  // namespace

bool Expression::uses_time() const { return root_ && mentions_time(*root_); }

namespace {

bool mentions_time(const Expression::Node& n) {
  if (n.kind == Expression::Node::Kind::Time) return true;
  for (const auto& a : n.args)
    if (mentions_time(*a)) return true;
  return false;
}

}  // namespace

double Expression::operator()(double t, const SmallVec& x) const {
  if (!root_) throw InvalidInput("expression: empty");
  return root_->eval(t, x);
}

}  // namespace mop
