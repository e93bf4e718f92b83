#pragma once

#include "mop/types.hpp"

#include <memory>
#include <string>

namespace mop {

/// Compiled arithmetic expression in the variables t, x1..x3 (also pi, e).
/// Grammar: + - * / ^, unary minus, parentheses, and the functions
/// sin cos tan exp log sqrt abs min max pow.
class Expression {
 public:
  Expression() = default;
  explicit Expression(const std::string& source);

  double operator()(double t, const SmallVec& x) const;
  const std::string& source() const { return source_; }
  bool valid() const { return root_ != nullptr; }
  bool uses_time() const;

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mop
