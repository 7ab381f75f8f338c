#include "crwarp/expr.hpp"

#include "crwarp/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace crwarp {

ParseError::ParseError(std::size_t position, std::vector<std::string> expected,
                       const std::string& detail)
    : Error([&] {
        std::ostringstream os;
        os << "parse error at position " << position << ": " << detail;
        if (!expected.empty()) {
          os << " (expected one of:";
          for (const auto& e : expected) os << ' ' << e;
          os << ')';
        }
        return os.str();
      }()),
      position_(position),
      expected_(std::move(expected)) {}

namespace dsl {

namespace {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret,
                 kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

constexpr std::size_t kMaxDepth = 200;

struct FunctionName {
  std::string_view name;
  NodeKind kind;
};

constexpr std::array<FunctionName, 7> kFunctions{{
    {"sin", NodeKind::kSin},
    {"cos", NodeKind::kCos},
    {"exp", NodeKind::kExp},
    {"log", NodeKind::kLog},
    {"sqrt", NodeKind::kSqrt},
    {"sinh", NodeKind::kSinh},
    {"cosh", NodeKind::kCosh},
}};

std::optional<NodeKind> function_kind(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f.kind;
  return std::nullopt;
}

std::string_view function_name(NodeKind kind) {
  for (const auto& f : kFunctions)
    if (f.kind == kind) return f.name;
  return "?";
}

const std::vector<std::string> kOperandStart{"number", "identifier", "(",
                                             "-"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r'))
      ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::kEnd, start, {}};
    const char c = src_[pos_];
    auto single = [&](Tok kind) {
      ++pos_;
      return Token{kind, start, src_.substr(start, 1)};
    };
    switch (c) {
      case '+': return single(Tok::kPlus);
      case '-': return single(Tok::kMinus);
      case '*': return single(Tok::kStar);
      case '/': return single(Tok::kSlash);
      case '^': return single(Tok::kCaret);
      case '(': return single(Tok::kLParen);
      case ')': return single(Tok::kRParen);
      default: break;
    }
    if (is_digit(c) || c == '.') return number(start);
    if (is_alpha(c)) {
      while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_])))
        ++pos_;
      return {Tok::kIdent, start, src_.substr(start, pos_ - start)};
    }
    throw ParseError(start, {"number", "identifier", "operator", "(", ")"},
                     std::string("unexpected character '") + c + "'");
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }

  Token number(std::size_t start) {
    std::size_t p = pos_;
    bool digits = false;
    while (p < src_.size() && is_digit(src_[p])) ++p, digits = true;
    if (p < src_.size() && src_[p] == '.') {
      ++p;
      while (p < src_.size() && is_digit(src_[p])) ++p, digits = true;
    }
    if (!digits) throw ParseError(start, {"number"}, "malformed number");
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && is_digit(src_[q])) {
        while (q < src_.size() && is_digit(src_[q])) ++q;
        p = q;
      }
    }
    double value = 0.0;
    const auto text = src_.substr(start, p - start);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || !std::isfinite(value))
      throw ParseError(start, {"number"}, "number out of range");
    pos_ = p;
    return {Tok::kNumber, start, text, value};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::shared_ptr<const Node> make_leaf(NodeKind kind, double literal,
                                      std::size_t variable) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->literal = literal;
  n->variable = variable;
  return n;
}

std::shared_ptr<const Node> make_node(NodeKind kind,
                                      std::shared_ptr<const Node> lhs,
                                      std::shared_ptr<const Node> rhs = nullptr,
                                      int exponent = 0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->exponent = exponent;
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars)
      : lexer_(src), vars_(vars) {
    advance();
  }

  std::shared_ptr<const Node> parse_all() {
    auto root = expr(0);
    if (tok_.kind != Tok::kEnd) {
      throw ParseError(tok_.pos,
                       {"+", "-", "*", "/", "^", "end of input"},
                       "unexpected token '" + std::string(tok_.text) + "'");
    }
    return root;
  }

 private:
  void advance() { tok_ = lexer_.next(); }

  void guard(std::size_t depth) const {
    if (depth > kMaxDepth)
      throw ParseError(tok_.pos, {}, "expression nested too deeply");
  }

  std::shared_ptr<const Node> expr(std::size_t depth) {
    guard(depth);
    auto lhs = term(depth + 1);
    while (tok_.kind == Tok::kPlus || tok_.kind == Tok::kMinus) {
      const auto kind = tok_.kind == Tok::kPlus ? NodeKind::kAdd : NodeKind::kSub;
      advance();
      lhs = make_node(kind, std::move(lhs), term(depth + 1));
    }
    return lhs;
  }

  std::shared_ptr<const Node> term(std::size_t depth) {
    guard(depth);
    auto lhs = unary(depth + 1);
    while (tok_.kind == Tok::kStar || tok_.kind == Tok::kSlash) {
      const auto kind = tok_.kind == Tok::kStar ? NodeKind::kMul : NodeKind::kDiv;
      advance();
      lhs = make_node(kind, std::move(lhs), unary(depth + 1));
    }
    return lhs;
  }

  std::shared_ptr<const Node> unary(std::size_t depth) {
    guard(depth);
    if (tok_.kind == Tok::kMinus) {
      advance();
      return make_node(NodeKind::kNeg, unary(depth + 1));
    }
    return power(depth + 1);
  }

  std::shared_ptr<const Node> power(std::size_t depth) {
    auto base = primary(depth + 1);
    while (tok_.kind == Tok::kCaret) {
      advance();
      base = make_node(NodeKind::kPow, std::move(base), nullptr, exponent());
    }
    return base;
  }

  int exponent() {
    bool paren = false;
    if (tok_.kind == Tok::kLParen) {
      paren = true;
      advance();
    }
    bool negative = false;
    if (tok_.kind == Tok::kMinus) {
      negative = true;
      advance();
    }
    if (tok_.kind != Tok::kNumber ||
        tok_.text.find_first_not_of("0123456789") != std::string_view::npos)
      throw ParseError(tok_.pos, {"integer"}, "exponent must be an integer");
    int value = 0;
    const auto res = std::from_chars(tok_.text.data(),
                                     tok_.text.data() + tok_.text.size(), value);
    if (res.ec != std::errc() || value > 64)
      throw ParseError(tok_.pos, {"integer"}, "exponent too large");
    advance();
    if (paren) expect(Tok::kRParen, ")");
    return negative ? -value : value;
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind)
      throw ParseError(tok_.pos, {what},
                       tok_.kind == Tok::kEnd ? "unexpected end of input"
                                              : "unexpected token '" +
                                                    std::string(tok_.text) + "'");
    advance();
  }

  std::shared_ptr<const Node> primary(std::size_t depth) {
    guard(depth);
    switch (tok_.kind) {
      case Tok::kNumber: {
        const double v = tok_.number;
        advance();
        return make_leaf(NodeKind::kLiteral, v, 0);
      }
      case Tok::kLParen: {
        advance();
        auto inner = expr(depth + 1);
        expect(Tok::kRParen, ")");
        return inner;
      }
      case Tok::kIdent:
        return identifier(depth);
      default:
        throw ParseError(tok_.pos, kOperandStart,
                         tok_.kind == Tok::kEnd
                             ? "unexpected end of input"
                             : "unexpected token '" + std::string(tok_.text) + "'");
    }
  }

  std::shared_ptr<const Node> identifier(std::size_t depth) {
    const Token ident = tok_;
    advance();
    const bool call = tok_.kind == Tok::kLParen;
    if (!call) {
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == ident.text) return make_leaf(NodeKind::kVariable, 0.0, i);
      if (ident.text == "pi")
        return make_leaf(NodeKind::kLiteral, std::numbers::pi, 0);
      if (function_kind(ident.text))
        throw ParseError(tok_.pos, {"("}, "function name without argument list");
      throw UnknownVariable(std::string(ident.text), ident.pos);
    }
    const auto kind = function_kind(ident.text);
    if (!kind) throw UnknownVariable(std::string(ident.text), ident.pos);
    advance();
    auto arg = expr(depth + 1);
    expect(Tok::kRParen, ")");
    return make_node(*kind, std::move(arg));
  }

  Lexer lexer_;
  const std::vector<std::string>& vars_;
  Token tok_{Tok::kEnd, 0, {}};
};

// Domain checks shared by both scalar kinds.
double value_of(double x) { return x; }
double value_of(const Taylor2& x) { return x.value(); }
bool has_slope(double) { return false; }
bool has_slope(const Taylor2& x) { return x.dim() > 0; }

template <class S>
S checked(S result, const char* what) {
  if (!std::isfinite(value_of(result)))
    throw DomainError(std::string("non-finite result in ") + what);
  return result;
}

template <class S>
S eval_node(const Node& n, std::span<const S> env) {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  switch (n.kind) {
    case NodeKind::kLiteral:
      return S(n.literal);
    case NodeKind::kVariable:
      return env[n.variable];
    case NodeKind::kNeg:
      return -eval_node(*n.lhs, env);
    case NodeKind::kSin:
      return checked(sin(eval_node(*n.lhs, env)), "sin");
    case NodeKind::kCos:
      return checked(cos(eval_node(*n.lhs, env)), "cos");
    case NodeKind::kExp:
      return checked(exp(eval_node(*n.lhs, env)), "exp");
    case NodeKind::kSinh:
      return checked(sinh(eval_node(*n.lhs, env)), "sinh");
    case NodeKind::kCosh:
      return checked(cosh(eval_node(*n.lhs, env)), "cosh");
    case NodeKind::kLog: {
      S x = eval_node(*n.lhs, env);
      if (!(value_of(x) > 0.0)) throw DomainError("log of a non-positive value");
      return checked(log(x), "log");
    }
    case NodeKind::kSqrt: {
      S x = eval_node(*n.lhs, env);
      if (value_of(x) < 0.0) throw DomainError("sqrt of a negative value");
      if (value_of(x) == 0.0 && has_slope(x))
        throw DomainError("sqrt is not differentiable at 0");
      return checked(sqrt(x), "sqrt");
    }
    case NodeKind::kAdd:
      return checked(eval_node(*n.lhs, env) + eval_node(*n.rhs, env), "+");
    case NodeKind::kSub:
      return checked(eval_node(*n.lhs, env) - eval_node(*n.rhs, env), "-");
    case NodeKind::kMul:
      return checked(eval_node(*n.lhs, env) * eval_node(*n.rhs, env), "*");
    case NodeKind::kDiv: {
      S num = eval_node(*n.lhs, env);
      S den = eval_node(*n.rhs, env);
      if (std::abs(value_of(den)) < 1e-300) throw DomainError("division by zero");
      return checked(num / den, "/");
    }
    case NodeKind::kPow: {
      S base = eval_node(*n.lhs, env);
      if (n.exponent < 0 && std::abs(value_of(base)) < 1e-300)
        throw DomainError("negative power of zero");
      return checked(ipow(base, n.exponent), "^");
    }
  }
  throw DomainError("corrupt expression node");
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::kAdd:
    case NodeKind::kSub:
      return 1;
    case NodeKind::kMul:
    case NodeKind::kDiv:
      return 2;
    case NodeKind::kNeg:
      return 3;
    case NodeKind::kPow:
      return 4;
    case NodeKind::kLiteral:
      return n.literal < 0.0 || std::signbit(n.literal) ? 3 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void print_node(const Node& n, const std::vector<std::string>& vars,
                int min_prec, std::string& out) {
  const int prec = precedence(n);
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (n.kind) {
    case NodeKind::kLiteral:
      if (std::signbit(n.literal)) {
        out += '-';
        out += format_number(-n.literal);
      } else {
        out += format_number(n.literal);
      }
      break;
    case NodeKind::kVariable:
      out += vars[n.variable];
      break;
    case NodeKind::kNeg:
      out += '-';
      print_node(*n.lhs, vars, 3, out);
      break;
    case NodeKind::kAdd:
    case NodeKind::kSub:
      print_node(*n.lhs, vars, 1, out);
      out += n.kind == NodeKind::kAdd ? " + " : " - ";
      print_node(*n.rhs, vars, 2, out);
      break;
    case NodeKind::kMul:
    case NodeKind::kDiv:
      print_node(*n.lhs, vars, 2, out);
      out += n.kind == NodeKind::kMul ? "*" : "/";
      print_node(*n.rhs, vars, 3, out);
      break;
    case NodeKind::kPow:
      print_node(*n.lhs, vars, 4, out);
      out += '^';
      out += std::to_string(n.exponent);
      break;
    default:
      out += function_name(n.kind);
      out += '(';
      print_node(*n.lhs, vars, 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

// Neg(Literal c) and Literal(-c) compare equal.
std::optional<double> folded_literal(const Node& n) {
  if (n.kind == NodeKind::kLiteral) return n.literal;
  if (n.kind == NodeKind::kNeg) {
    if (auto inner = folded_literal(*n.lhs)) return -*inner;
  }
  return std::nullopt;
}

bool equal_nodes(const Node& a, const Node& b) {
  const auto la = folded_literal(a);
  const auto lb = folded_literal(b);
  if (la || lb) return la && lb && *la == *lb;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::kVariable:
      return a.variable == b.variable;
    case NodeKind::kPow:
      return a.exponent == b.exponent && equal_nodes(*a.lhs, *b.lhs);
    case NodeKind::kAdd:
    case NodeKind::kSub:
    case NodeKind::kMul:
    case NodeKind::kDiv:
      return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
    default:
      return equal_nodes(*a.lhs, *b.lhs);
  }
}

}  // namespace

Expr parse(std::string_view source, std::vector<std::string> variables) {
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError(source.size(), kOperandStart, "empty expression");
  Parser parser(source, variables);
  auto root = parser.parse_all();
  return Expr(std::move(root), std::move(variables));
}

double eval(const Expr& expr, std::span<const double> env) {
  if (env.size() != expr.variables().size())
    throw DimensionMismatch("environment does not cover the declared variables");
  return eval_node<double>(expr.root(), env);
}

Taylor2 eval(const Expr& expr, std::span<const Taylor2> env) {
  if (env.size() != expr.variables().size())
    throw DimensionMismatch("environment does not cover the declared variables");
  return eval_node<Taylor2>(expr.root(), env);
}

double eval(const Expr& expr, const std::map<std::string, double>& env) {
  std::vector<double> values;
  values.reserve(expr.variables().size());
  for (const auto& name : expr.variables()) {
    const auto it = env.find(name);
    if (it == env.end()) throw UnknownVariable(name, 0);
    values.push_back(it->second);
  }
  return eval(expr, std::span<const double>(values));
}

std::string print(const Expr& expr) {
  std::string out;
  print_node(expr.root(), expr.variables(), 0, out);
  return out;
}

bool equivalent(const Expr& a, const Expr& b) {
  return a.variables() == b.variables() && equal_nodes(a.root(), b.root());
}

}  // namespace dsl
}  // namespace crwarp
