#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace logds {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Evaluator = std::function<double(const Vector&)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Per-variable box; +-inf entries mean the side is absent.
struct Bounds {
  Vector lo;
  Vector hi;

  static Bounds unbounded(int n) {
    Bounds b;
    b.lo = Vector::Constant(n, -kInf);
    b.hi = Vector::Constant(n, kInf);
    return b;
  }

  bool contains(const Vector& x, double slack = 0.0) const {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
  }
};

struct LinearConstraints {
  Matrix A;  // q x n
  Vector b;  // q
};

/// min f(x)  s.t.  g(x) <= 0, h(x) = 0, A x <= b, lo <= x <= hi.
/// The starting point must satisfy the linear constraints and bounds;
/// construction throws std::invalid_argument otherwise.
class Problem {
public:
  Problem(std::string name, int n, Evaluator objective, std::vector<Evaluator> ineq,
          std::vector<Evaluator> eq, std::optional<LinearConstraints> linear, Bounds bounds,
          Vector x0);

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  int num_ineq() const { return static_cast<int>(ineq_.size()); }
  int num_eq() const { return static_cast<int>(eq_.size()); }
  int num_linear() const { return linear_ ? static_cast<int>(linear_->b.size()) : 0; }

  double objective(const Vector& x) const { return objective_(x); }
  double ineq(int i, const Vector& x) const { return ineq_[i](x); }
  double eq(int j, const Vector& x) const { return eq_[j](x); }

  Vector eval_ineq(const Vector& x) const;
  Vector eval_eq(const Vector& x) const;

  const Evaluator& objective_evaluator() const { return objective_; }
  const std::vector<Evaluator>& ineq_evaluators() const { return ineq_; }
  const std::vector<Evaluator>& eq_evaluators() const { return eq_; }

  const std::optional<LinearConstraints>& linear() const { return linear_; }
  const Bounds& bounds() const { return bounds_; }
  const Vector& x0() const { return x0_; }

  /// Exact polyhedral membership (raw rows and bounds, 1e-12 absolute slack).
  bool feasible_linear(const Vector& x, double slack = 1e-12) const;

private:
  std::string name_;
  int n_;
  Evaluator objective_;
  std::vector<Evaluator> ineq_;
  std::vector<Evaluator> eq_;
  std::optional<LinearConstraints> linear_;
  Bounds bounds_;
  Vector x0_;
};

/// Moves the linear rows a_i'x <= b_i of `p` into its inequality list as
/// evaluators a_i'x - b_i, leaving only the bounds as the polyhedral set.
/// Identity when no linear rows are present.
Problem fold_linear_into_penalty(const Problem& p);

}  // namespace logds
