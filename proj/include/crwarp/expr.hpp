#pragma once

#include "crwarp/taylor2.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Real-valued expression language for chart components and warping
// functions. Grammar (see docs/grammar.md):
//
//   expr     = term { ("+" | "-") term }
//   term     = unary { ("*" | "/") unary }
//   unary    = "-" unary | power
//   power    = primary { "^" exponent }
//   exponent = ["-"] integer | "(" ["-"] integer ")"
//   primary  = number | variable | "pi" | func "(" expr ")" | "(" expr ")"
//   func     = sin | cos | exp | log | sqrt | sinh | cosh
namespace crwarp::dsl {

enum class NodeKind {
  kLiteral,
  kVariable,
  kNeg,
  kSin,
  kCos,
  kExp,
  kLog,
  kSqrt,
  kSinh,
  kCosh,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
};

struct Node {
  NodeKind kind = NodeKind::kLiteral;
  double literal = 0.0;       // kLiteral
  std::size_t variable = 0;   // kVariable: index into the declared list
  int exponent = 0;           // kPow
  std::shared_ptr<const Node> lhs;  // operand of unary nodes, left of binary
  std::shared_ptr<const Node> rhs;
};

/// Immutable parsed expression over a declared, ordered variable list.
class Expr {
 public:
  Expr(std::shared_ptr<const Node> root, std::vector<std::string> variables)
      : root_(std::move(root)), variables_(std::move(variables)) {}

  const Node& root() const { return *root_; }
  const std::vector<std::string>& variables() const { return variables_; }

 private:
  std::shared_ptr<const Node> root_;
  std::vector<std::string> variables_;
};

/// Throws ParseError (position + expected tokens) or UnknownVariable.
Expr parse(std::string_view source, std::vector<std::string> variables);

/// Evaluate with env[i] bound to variables()[i]. Throws DomainError for log
/// of non-positive values, sqrt of negatives, division by |x| < 1e-300 and
/// non-finite intermediate results.
double eval(const Expr& expr, std::span<const double> env);
Taylor2 eval(const Expr& expr, std::span<const Taylor2> env);
double eval(const Expr& expr, const std::map<std::string, double>& env);

/// Text that parses back to an equivalent tree.
std::string print(const Expr& expr);

/// Structural equality after folding negated literals into literals.
bool equivalent(const Expr& a, const Expr& b);

}  // namespace crwarp::dsl
