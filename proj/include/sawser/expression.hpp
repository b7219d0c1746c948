#pragma once

#include "sawser/errors.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace sawser {

/// Parse failure with the byte offset of the offending token.
class ExpressionError : public ArgumentError {
 public:
  ExpressionError(const std::string& message, std::size_t offset)
      : ArgumentError(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Real function of one variable `t` in a small expression language:
///
///   numbers, the variable t (s and u are aliases), named constants (pi, e, plus any bound at parse time),
///   + - * / ^, unary minus, parentheses,
///   exp ln log sqrt sin cos abs, pow(x, y), max(x, y), min(x, y).
///
/// Expressions are immutable and cheap to copy. `derivative()` is symbolic
/// (max/min/abs differentiate the active branch).
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text, const std::map<std::string, double>& constants = {});
  static Expression constant(double value);
  static Expression variable();

  double operator()(double t) const;
  Expression derivative() const;
  std::string to_string() const;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace sawser
