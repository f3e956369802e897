#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <string>

namespace logds {

/// Parse or identifier failure; `offset` is the byte position in the source
/// string where the problem was detected.
class ExprError : public std::runtime_error {
public:
  ExprError(std::size_t offset, const std::string& what)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Expression tree over constants, variables x1..xn, arithmetic operators,
/// and the function set {sin, cos, exp, log, abs, max, min}.
/// Immutable after parse.
struct ExprNode {
  enum class Kind {
    Constant,
    Variable,  // 1-based index
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Max,
    Min,
  };

  Kind kind;
  double value = 0.0;  // Constant
  int var_index = 0;   // Variable, 1-based
  std::unique_ptr<ExprNode> lhs;
  std::unique_ptr<ExprNode> rhs;
};

using ExprPtr = std::unique_ptr<ExprNode>;

/// Recursive-descent parse with precedence ^ > unary- > *,/ > +,-.
/// '^' is right-associative, the rest left-associative; whitespace is
/// insignificant. Throws ExprError with a byte offset on failure.
ExprPtr parse_expr(const std::string& src);

/// Evaluates with IEEE semantics (0 division yields +-inf, invalid ops NaN).
/// log(x) for x <= 0 yields NaN. `x` is 0-based storage for x1..xn; a
/// variable index beyond x.size() throws std::out_of_range.
double eval_expr(const ExprNode& ast, const Eigen::VectorXd& x);

/// Fully parenthesized form; reparsing it yields a structurally identical
/// tree (constants printed with round-trip precision).
std::string pretty_print(const ExprNode& ast);

/// Structural equality (same shape, exact constant/index match).
bool expr_equal(const ExprNode& a, const ExprNode& b);

/// Largest variable index mentioned, 0 when none.
int max_var_index(const ExprNode& ast);

ExprPtr clone_expr(const ExprNode& ast);

}  // namespace logds
