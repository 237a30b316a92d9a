#ifndef PENAPARAB_EXPR_HPP
#define PENAPARAB_EXPR_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace penaparab::expr {

/// Variables an expression may reference.
enum class Var : std::uint8_t { x = 1, t = 2, u = 4 };

/// Small bit set of variables.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr VarSet(std::initializer_list<Var> vars) {
    for (Var v : vars) bits_ |= static_cast<std::uint8_t>(v);
  }
  constexpr bool contains(Var v) const { return (bits_ & static_cast<std::uint8_t>(v)) != 0; }
  constexpr VarSet& insert(Var v) {
    bits_ |= static_cast<std::uint8_t>(v);
    return *this;
  }
  constexpr bool subset_of(VarSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool operator==(const VarSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

inline constexpr VarSet kSpaceTime{Var::x, Var::t};
inline constexpr VarSet kTimeOnly{Var::t};
inline constexpr VarSet kSpaceOnly{Var::x};
inline constexpr VarSet kReaction{Var::x, Var::t, Var::u};

/// Parse failure. `offset()` is the byte offset into the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

/// Values for the free variables of an expression.
struct Bindings {
  std::optional<double> x;
  std::optional<double> t;
  std::optional<double> u;
};

struct Node;

/// Immutable expression tree. Copies share the tree.
class Expr {
 public:
  /// The constant 0.
  Expr();
  static Expr constant(double value);

  double eval(const Bindings& b) const;
  double eval(const std::map<std::string, double>& bindings) const;
  double operator()(double x, double t) const { return eval(Bindings{x, t, std::nullopt}); }

  /// Variables referenced anywhere in the tree.
  VarSet free_vars() const { return vars_; }
  bool uses(Var v) const { return vars_.contains(v); }

  /// Fully parenthesised rendering; reparses to a structurally identical tree.
  std::string to_string() const;

  /// Structural equality.
  bool same_as(const Expr& other) const;

  const std::string& source() const { return source_; }

 private:
  friend class Parser;
  explicit Expr(std::shared_ptr<const Node> root, std::string source);

  std::shared_ptr<const Node> root_;
  VarSet vars_;
  std::string source_;
};

/// Recursive-descent parse. Precedence, tightest first: `^` (right
/// associative), unary minus, `* /`, `+ -`.
Expr parse(std::string_view source, VarSet allowed);

/// Central difference (e(x,t+h) - e(x,t-h)) / (2h).
double diff_t_numeric(const Expr& e, double x, double t, double h);

/// Window in which a curve may be evaluated. Stencils that would leave it
/// fall back to one-sided second order differences.
struct Window {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

inline constexpr double kDefaultDiffStep = 1e-6;

/// d/dt with one Richardson refinement of the central difference.
double derivative_t(const Expr& e, double x, double t, Window window = {},
                    double h = kDefaultDiffStep);

/// d/dx with one Richardson refinement of the central difference.
double derivative_x(const Expr& e, double x, double t, double h = kDefaultDiffStep);

}  // namespace penaparab::expr

#endif  // PENAPARAB_EXPR_HPP
