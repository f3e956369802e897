#include "logds/problem.hpp"

#include <stdexcept>

namespace logds {

Problem::Problem(std::string name, int n, Evaluator objective, std::vector<Evaluator> ineq,
                 std::vector<Evaluator> eq, std::optional<LinearConstraints> linear,
                 Bounds bounds, Vector x0)
    : name_(std::move(name)),
      n_(n),
      objective_(std::move(objective)),
      ineq_(std::move(ineq)),
      eq_(std::move(eq)),
      linear_(std::move(linear)),
      bounds_(std::move(bounds)),
      x0_(std::move(x0)) {
  if (n_ < 1) throw std::invalid_argument(name_ + ": dimension must be >= 1");
  if (!objective_) throw std::invalid_argument(name_ + ": objective evaluator missing");
  if (x0_.size() != n_)
    throw std::invalid_argument(name_ + ": x0 has length " + std::to_string(x0_.size()) +
                                ", expected " + std::to_string(n_));
  if (bounds_.lo.size() != n_ || bounds_.hi.size() != n_)
    throw std::invalid_argument(name_ + ": bounds length mismatch");
  for (int i = 0; i < n_; ++i)
    if (!(bounds_.lo[i] <= bounds_.hi[i]))
      throw std::invalid_argument(name_ + ": bounds[" + std::to_string(i) + "]: lo > hi");
  if (linear_) {
    if (linear_->A.rows() != linear_->b.size() || linear_->A.cols() != n_)
      throw std::invalid_argument(name_ + ": linear constraint shape mismatch");
  }
  if (!feasible_linear(x0_))
    throw std::invalid_argument(name_ + ": x0 violates the linear constraints or bounds");
}

Vector Problem::eval_ineq(const Vector& x) const {
  Vector g(num_ineq());
  for (int i = 0; i < num_ineq(); ++i) g[i] = ineq_[i](x);
  return g;
}

Vector Problem::eval_eq(const Vector& x) const {
  Vector h(num_eq());
  for (int j = 0; j < num_eq(); ++j) h[j] = eq_[j](x);
  return h;
}

bool Problem::feasible_linear(const Vector& x, double slack) const {
  if (!bounds_.contains(x, slack)) return false;
  if (linear_) {
    Vector r = linear_->A * x - linear_->b;
    if ((r.array() > slack).any()) return false;
  }
  return true;
}

Problem fold_linear_into_penalty(const Problem& p) {
  if (!p.linear()) return p;
  std::vector<Evaluator> ineq = p.ineq_evaluators();
  ineq.reserve(ineq.size() + p.num_linear());
  const Matrix A = p.linear()->A;
  const Vector b = p.linear()->b;
  for (int r = 0; r < A.rows(); ++r) {
    Vector row = A.row(r).transpose();
    double rhs = b[r];
    ineq.push_back([row, rhs](const Vector& x) { return row.dot(x) - rhs; });
  }
  return Problem(p.name(), p.dim(), p.objective_evaluator(), std::move(ineq),
                 p.eq_evaluators(), std::nullopt, p.bounds(), p.x0());
}

}  // namespace logds
