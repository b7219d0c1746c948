#include "sawser/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace sawser {

enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kExp, kLn, kSqrt, kSin, kCos, kAbs, kSign, kMax, kMin, kPick };

struct Expression::Node {
  Op op = Op::kConst;
  double value = 0.0;
  // kPick(a, b, x, y) is x when a >= b, else y.
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->args = std::move(args);
  return n;
}

NodePtr num(double v) { return make(Op::kConst, {}, v); }
bool is_const(const NodePtr& n, double v) { return n->op == Op::kConst && n->value == v; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  return make(Op::kAdd, {std::move(a), std::move(b)});
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0)) return a;
  return make(Op::kSub, {std::move(a), std::move(b)});
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0) || is_const(b, 0)) return num(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  return make(Op::kMul, {std::move(a), std::move(b)});
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0)) return num(0);
  if (is_const(b, 1)) return a;
  return make(Op::kDiv, {std::move(a), std::move(b)});
}
NodePtr neg(NodePtr a) {
  if (a->op == Op::kConst) return num(-a->value);
  return make(Op::kNeg, {std::move(a)});
}
NodePtr unary(Op op, NodePtr a) { return make(op, {std::move(a)}); }

double eval(const Expression::Node& n, double t) {
  auto arg = [&](std::size_t i) { return eval(*n.args[i], t); };
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return t;
    case Op::kAdd: return arg(0) + arg(1);
    case Op::kSub: return arg(0) - arg(1);
    case Op::kMul: return arg(0) * arg(1);
    case Op::kDiv: return arg(0) / arg(1);
    case Op::kPow: return std::pow(arg(0), arg(1));
    case Op::kNeg: return -arg(0);
    case Op::kExp: return std::exp(arg(0));
    case Op::kLn: return std::log(arg(0));
    case Op::kSqrt: return std::sqrt(arg(0));
    case Op::kSin: return std::sin(arg(0));
    case Op::kCos: return std::cos(arg(0));
    case Op::kAbs: return std::abs(arg(0));
    case Op::kSign: {
      const double x = arg(0);
      return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    }
    case Op::kMax: return std::max(arg(0), arg(1));
    case Op::kMin: return std::min(arg(0), arg(1));
    case Op::kPick: return arg(0) >= arg(1) ? arg(2) : arg(3);
  }
  return std::nan("");
}

NodePtr diff(const NodePtr& n) {
  const auto& a = n->args;
  switch (n->op) {
    case Op::kConst: return num(0);
    case Op::kVar: return num(1);
    case Op::kAdd: return add(diff(a[0]), diff(a[1]));
    case Op::kSub: return sub(diff(a[0]), diff(a[1]));
    case Op::kMul: return add(mul(diff(a[0]), a[1]), mul(a[0], diff(a[1])));
    case Op::kDiv:
      return div(sub(mul(diff(a[0]), a[1]), mul(a[0], diff(a[1]))), mul(a[1], a[1]));
    case Op::kPow:
      if (a[1]->op == Op::kConst) {
        return mul(mul(a[1], make(Op::kPow, {a[0], num(a[1]->value - 1)})), diff(a[0]));
      }
      return mul(n, add(mul(diff(a[1]), unary(Op::kLn, a[0])), div(mul(a[1], diff(a[0])), a[0])));
    case Op::kNeg: return neg(diff(a[0]));
    case Op::kExp: return mul(n, diff(a[0]));
    case Op::kLn: return div(diff(a[0]), a[0]);
    case Op::kSqrt: return div(diff(a[0]), mul(num(2), n));
    case Op::kSin: return mul(unary(Op::kCos, a[0]), diff(a[0]));
    case Op::kCos: return neg(mul(unary(Op::kSin, a[0]), diff(a[0])));
    case Op::kAbs: return mul(unary(Op::kSign, a[0]), diff(a[0]));
    case Op::kSign: return num(0);
    case Op::kMax: return make(Op::kPick, {a[0], a[1], diff(a[0]), diff(a[1])});
    case Op::kMin: return make(Op::kPick, {a[1], a[0], diff(a[0]), diff(a[1])});
    case Op::kPick: return make(Op::kPick, {a[0], a[1], diff(a[2]), diff(a[3])});
  }
  return num(0);
}

std::string show(const Expression::Node& n) {
  auto s = [&](std::size_t i) { return show(*n.args[i]); };
  auto call = [&](const char* name) {
    std::string out = std::string(name) + "(";
    for (std::size_t i = 0; i < n.args.size(); ++i) out += (i ? ", " : "") + s(i);
    return out + ")";
  };
  switch (n.op) {
    case Op::kConst: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case Op::kVar: return "t";
    case Op::kAdd: return "(" + s(0) + " + " + s(1) + ")";
    case Op::kSub: return "(" + s(0) + " - " + s(1) + ")";
    case Op::kMul: return "(" + s(0) + " * " + s(1) + ")";
    case Op::kDiv: return "(" + s(0) + " / " + s(1) + ")";
    case Op::kPow: return "(" + s(0) + " ^ " + s(1) + ")";
    case Op::kNeg: return "(-" + s(0) + ")";
    case Op::kExp: return call("exp");
    case Op::kLn: return call("ln");
    case Op::kSqrt: return call("sqrt");
    case Op::kSin: return call("sin");
    case Op::kCos: return call("cos");
    case Op::kAbs: return call("abs");
    case Op::kSign: return call("sign");
    case Op::kMax: return call("max");
    case Op::kMin: return call("min");
    case Op::kPick: return call("pick");
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view text, const std::map<std::string, double>& constants)
      : text_(text), constants_(constants) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) throw ExpressionError("unexpected trailing input", pos_);
    return root;
  }

 private:
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
  void expect(char c) {
    if (!accept(c)) throw ExpressionError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::kAdd, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::kSub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary_expr();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::kMul, {lhs, unary_expr()});
      } else if (accept('/')) {
        lhs = make(Op::kDiv, {lhs, unary_expr()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary_expr() {
    if (accept('-')) return make(Op::kNeg, {unary_expr()});
    if (accept('+')) return unary_expr();
    NodePtr base = primary();
    if (accept('^')) return make(Op::kPow, {base, unary_expr()});
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ExpressionError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ExpressionError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) throw ExpressionError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return num(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      expect(')');
      return call(name, std::move(args), start);
    }
    if (name == "t" || name == "s" || name == "u") return make(Op::kVar);
    if (auto it = constants_.find(name); it != constants_.end()) return num(it->second);
    if (name == "pi") return num(std::numbers::pi);
    if (name == "e") return num(std::numbers::e);
    throw ExpressionError("unknown identifier '" + name + "'", start);
  }

  NodePtr call(const std::string& name, std::vector<NodePtr> args, std::size_t at) {
    static const std::map<std::string, Op> kUnary = {{"exp", Op::kExp}, {"ln", Op::kLn},   {"log", Op::kLn},
                                                     {"sqrt", Op::kSqrt}, {"sin", Op::kSin}, {"cos", Op::kCos},
                                                     {"abs", Op::kAbs}};
    static const std::map<std::string, Op> kBinary = {{"pow", Op::kPow}, {"max", Op::kMax}, {"min", Op::kMin}};
    if (auto it = kUnary.find(name); it != kUnary.end()) {
      if (args.size() != 1) throw ExpressionError(name + " takes one argument", at);
      return make(it->second, std::move(args));
    }
    if (auto it = kBinary.find(name); it != kBinary.end()) {
      if (args.size() != 2) throw ExpressionError(name + " takes two arguments", at);
      return make(it->second, std::move(args));
    }
    throw ExpressionError("unknown function '" + name + "'", at);
  }

  std::string_view text_;
  const std::map<std::string, double>& constants_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, const std::map<std::string, double>& constants) {
  return Expression(Parser(text, constants).parse());
}

Expression Expression::constant(double value) { return Expression(num(value)); }

Expression Expression::variable() { return Expression(make(Op::kVar)); }

double Expression::operator()(double t) const { return eval(*root_, t); }

Expression Expression::derivative() const { return Expression(diff(root_)); }

std::string Expression::to_string() const { return show(*root_); }

}  // namespace sawser
