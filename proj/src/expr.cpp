#include "penaparab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace penaparab::expr {

enum class Kind : std::uint8_t { Number, Variable, Constant, Negate, Binary, Call };
enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Pow };
enum class Func : std::uint8_t { Sin, Cos, Exp, Log, Sqrt, Abs, Tanh, Min, Max, Pow };

struct Node {
  Kind kind = Kind::Number;
  double value = 0.0;  // Number and Constant
  Var var = Var::x;
  BinOp op = BinOp::Add;
  Func fn = Func::Sin;
  std::string name;  // Constant and Call
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

struct FuncInfo {
  std::string_view name;
  Func fn;
  int arity;
};

constexpr FuncInfo kFunctions[] = {
    {"sin", Func::Sin, 1},   {"cos", Func::Cos, 1},   {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},   {"sqrt", Func::Sqrt, 1}, {"abs", Func::Abs, 1},
    {"tanh", Func::Tanh, 1}, {"min", Func::Min, 2},   {"max", Func::Max, 2},
    {"pow", Func::Pow, 2},
};

const FuncInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

std::optional<Var> find_variable(std::string_view name) {
  if (name == "x") return Var::x;
  if (name == "t") return Var::t;
  if (name == "u") return Var::u;
  return std::nullopt;
}

std::optional<double> find_constant(std::string_view name) {
  if (name == "pi") return std::numbers::pi;
  if (name == "e") return std::numbers::e;
  return std::nullopt;
}

std::string_view var_name(Var v) {
  switch (v) {
    case Var::x: return "x";
    case Var::t: return "t";
    case Var::u: return "u";
  }
  return "?";
}

char op_char(BinOp op) {
  switch (op) {
    case BinOp::Add: return '+';
    case BinOp::Sub: return '-';
    case BinOp::Mul: return '*';
    case BinOp::Div: return '/';
    case BinOp::Pow: return '^';
  }
  return '?';
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double eval_node(const Node& n, const Bindings& b) {
  switch (n.kind) {
    case Kind::Number:
    case Kind::Constant:
      return n.value;
    case Kind::Variable: {
      const std::optional<double>* slot = nullptr;
      switch (n.var) {
        case Var::x: slot = &b.x; break;
        case Var::t: slot = &b.t; break;
        case Var::u: slot = &b.u; break;
      }
      if (!slot->has_value())
        throw std::logic_error("expression evaluated without a binding for '" +
                               std::string(var_name(n.var)) + "'");
      return **slot;
    }
    case Kind::Negate:
      return -eval_node(*n.args[0], b);
    case Kind::Binary: {
      const double l = eval_node(*n.args[0], b);
      const double r = eval_node(*n.args[1], b);
      switch (n.op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div: return l / r;
        case BinOp::Pow: return std::pow(l, r);
      }
      break;
    }
    case Kind::Call: {
      const double a = eval_node(*n.args[0], b);
      switch (n.fn) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Log: return std::log(a);
        case Func::Sqrt: return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        case Func::Tanh: return std::tanh(a);
        case Func::Min: return std::min(a, eval_node(*n.args[1], b));
        case Func::Max: return std::max(a, eval_node(*n.args[1], b));
        case Func::Pow: return std::pow(a, eval_node(*n.args[1], b));
      }
      break;
    }
  }
  throw std::logic_error("corrupt expression node");
}

void render(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number:
      out += format_number(n.value);
      return;
    case Kind::Constant:
      out += n.name;
      return;
    case Kind::Variable:
      out += var_name(n.var);
      return;
    case Kind::Negate:
      out += "(-";
      render(*n.args[0], out);
      out += ')';
      return;
    case Kind::Binary:
      out += '(';
      render(*n.args[0], out);
      out += ' ';
      out += op_char(n.op);
      out += ' ';
      render(*n.args[1], out);
      out += ')';
      return;
    case Kind::Call:
      out += n.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        render(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

bool same_node(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Kind::Number:
      if (a.value != b.value) return false;
      break;
    case Kind::Constant:
      if (a.name != b.name) return false;
      break;
    case Kind::Variable:
      if (a.var != b.var) return false;
      break;
    case Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case Kind::Call:
      if (a.fn != b.fn) return false;
      break;
    case Kind::Negate:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_node(*a.args[i], *b.args[i])) return false;
  return true;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string describe_offset(std::size_t offset, const std::string& message) {
  return "offset " + std::to_string(offset) + ": " + message;
}

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error(describe_offset(offset, message)), offset_(offset), detail_(message) {}

using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  Parser(std::string_view src, VarSet allowed) : src_(src), allowed_(allowed) {}

  Expr run() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expected an expression, found end of input");
    NodePtr root = parse_sum();
    skip_ws();
    if (pos_ < src_.size())
      throw ParseError(pos_, std::string("expected operator or end of input, found '") +
                                 src_[pos_] + "'");
    return Expr(std::move(root), std::string(src_));
  }

 private:
  // sum := product (('+' | '-') product)*
  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      skip_ws();
      if (!at('+') && !at('-')) return lhs;
      const BinOp op = at('+') ? BinOp::Add : BinOp::Sub;
      ++pos_;
      lhs = binary(op, lhs, parse_product());
    }
  }

  // product := unary (('*' | '/') unary)*
  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (!at('*') && !at('/')) return lhs;
      const BinOp op = at('*') ? BinOp::Mul : BinOp::Div;
      ++pos_;
      lhs = binary(op, lhs, parse_unary());
    }
  }

  // unary := '-' unary | power
  NodePtr parse_unary() {
    skip_ws();
    if (at('-')) {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->kind = Kind::Negate;
      n->args.push_back(parse_unary());
      return n;
    }
    return parse_power();
  }

  // power := primary ('^' unary)?   -- right associative through unary
  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    if (at('^')) {
      ++pos_;
      return binary(BinOp::Pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expected an operand, found end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    throw ParseError(pos_, std::string("expected number, identifier or '(', found '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ - start == 1 && src_[start] == '.') throw ParseError(start, "expected digits");
    // Exponent only when digits follow, so "2e" is not swallowed.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
      throw ParseError(start, "malformed number");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = value;
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    if (at('(')) return parse_call(name, start);

    if (auto v = find_variable(name)) {
      if (!allowed_.contains(*v))
        throw ParseError(start, "variable '" + std::string(name) + "' is not allowed here");
      auto n = std::make_shared<Node>();
      n->kind = Kind::Variable;
      n->var = *v;
      return n;
    }
    if (auto c = find_constant(name)) {
      auto n = std::make_shared<Node>();
      n->kind = Kind::Constant;
      n->value = *c;
      n->name = std::string(name);
      return n;
    }
    if (find_function(name))
      throw ParseError(pos_, "expected '(' after function '" + std::string(name) + "'");
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
  }

  NodePtr parse_call(std::string_view name, std::size_t start) {
    const FuncInfo* info = find_function(name);
    if (!info) throw ParseError(start, "unknown function '" + std::string(name) + "'");
    ++pos_;  // '('
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->fn = info->fn;
    n->name = std::string(name);
    skip_ws();
    if (!at(')')) {
      n->args.push_back(parse_sum());
      skip_ws();
      while (at(',')) {
        ++pos_;
        n->args.push_back(parse_sum());
        skip_ws();
      }
    }
    expect(')');
    if (static_cast<int>(n->args.size()) != info->arity)
      throw ParseError(start, "function '" + std::string(name) + "' takes " +
                                  std::to_string(info->arity) + " argument(s), got " +
                                  std::to_string(n->args.size()));
    return n;
  }

  static NodePtr binary(BinOp op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return n;
  }

  void expect(char c) {
    skip_ws();
    if (!at(c)) {
      if (pos_ >= src_.size())
        throw ParseError(pos_, std::string("expected '") + c + "', found end of input");
      throw ParseError(pos_, std::string("expected '") + c + "', found '" + src_[pos_] + "'");
    }
    ++pos_;
  }

  bool at(char c) const { return pos_ < src_.size() && src_[pos_] == c; }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  std::string_view src_;
  VarSet allowed_;
  std::size_t pos_ = 0;
};

namespace {

VarSet collect_vars(const Node& n) {
  VarSet out;
  if (n.kind == Kind::Variable) out.insert(n.var);
  for (const auto& a : n.args) {
    const VarSet sub = collect_vars(*a);
    for (Var v : {Var::x, Var::t, Var::u})
      if (sub.contains(v)) out.insert(v);
  }
  return out;
}

}  // namespace

Expr::Expr() : Expr(std::make_shared<const Node>(), "0") {}

Expr::Expr(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), vars_(collect_vars(*root_)), source_(std::move(source)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = value;
  return Expr(std::move(n), format_number(value));
}

double Expr::eval(const Bindings& b) const { return eval_node(*root_, b); }

double Expr::eval(const std::map<std::string, double>& bindings) const {
  Bindings b;
  if (auto it = bindings.find("x"); it != bindings.end()) b.x = it->second;
  if (auto it = bindings.find("t"); it != bindings.end()) b.t = it->second;
  if (auto it = bindings.find("u"); it != bindings.end()) b.u = it->second;
  return eval(b);
}

std::string Expr::to_string() const {
  std::string out;
  render(*root_, out);
  return out;
}

bool Expr::same_as(const Expr& other) const { return same_node(*root_, *other.root_); }

Expr parse(std::string_view source, VarSet allowed) { return Parser(source, allowed).run(); }

namespace {

double eval_checked(const Expr& e, double x, double t) {
  const double v = e.eval(Bindings{x, t, std::nullopt});
  if (!std::isfinite(v))
    throw std::domain_error("non-finite value of '" + e.source() + "' at x=" + format_number(x) +
                            ", t=" + format_number(t));
  return v;
}

// Second order difference on a stencil of spacing h that stays inside window.
double first_derivative(const Expr& e, double x, double t, Window w, double h) {
  if (t - h >= w.lo && t + h <= w.hi)
    return (eval_checked(e, x, t + h) - eval_checked(e, x, t - h)) / (2.0 * h);
  if (t - h < w.lo) {
    return (-3.0 * eval_checked(e, x, t) + 4.0 * eval_checked(e, x, t + h) -
            eval_checked(e, x, t + 2.0 * h)) /
           (2.0 * h);
  }
  return (3.0 * eval_checked(e, x, t) - 4.0 * eval_checked(e, x, t - h) +
          eval_checked(e, x, t - 2.0 * h)) /
         (2.0 * h);
}

}  // namespace

double diff_t_numeric(const Expr& e, double x, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("difference step must be positive");
  return (eval_checked(e, x, t + h) - eval_checked(e, x, t - h)) / (2.0 * h);
}

double derivative_t(const Expr& e, double x, double t, Window window, double h) {
  if (!e.uses(Var::t)) return 0.0;
  const double coarse = first_derivative(e, x, t, window, h);
  const double fine = first_derivative(e, x, t, window, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double derivative_x(const Expr& e, double x, double t, double h) {
  if (!e.uses(Var::x)) return 0.0;
  auto central = [&](double step) {
    return (eval_checked(e, x + step, t) - eval_checked(e, x - step, t)) / (2.0 * step);
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace penaparab::expr
