#include "logds/polyhedral.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace logds {

ScaledPolyhedron scale_rows(const Matrix& A, const Vector& b, Bounds bounds, int n) {
  ScaledPolyhedron poly;
  poly.n = n;
  poly.bounds = std::move(bounds);
  poly.A_bar.resize(A.rows(), n);
  poly.b_bar.resize(b.size());
  for (int i = 0; i < A.rows(); ++i) {
    double norm = A.row(i).norm();
    if (norm == 0.0)
      throw std::invalid_argument("scale_rows: row " + std::to_string(i + 1) + " is zero");
    poly.A_bar.row(i) = A.row(i) / norm;
    poly.b_bar[i] = b[i] / norm;
  }
  return poly;
}

ScaledPolyhedron box_polyhedron(Bounds bounds, int n) {
  ScaledPolyhedron poly;
  poly.n = n;
  poly.bounds = std::move(bounds);
  poly.A_bar.resize(0, n);
  poly.b_bar.resize(0);
  return poly;
}

std::pair<Matrix, Vector> augmented_rows(const ScaledPolyhedron& poly) {
  int extra = 0;
  for (int i = 0; i < poly.n; ++i) {
    if (std::isfinite(poly.bounds.lo[i])) ++extra;
    if (std::isfinite(poly.bounds.hi[i])) ++extra;
  }
  Matrix A(poly.num_rows() + extra, poly.n);
  Vector b(poly.num_rows() + extra);
  A.topRows(poly.num_rows()) = poly.A_bar;
  b.head(poly.num_rows()) = poly.b_bar;
  int r = poly.num_rows();
  for (int i = 0; i < poly.n; ++i) {
    if (std::isfinite(poly.bounds.lo[i])) {
      A.row(r).setZero();
      A(r, i) = -1.0;
      b[r] = -poly.bounds.lo[i];
      ++r;
    }
    if (std::isfinite(poly.bounds.hi[i])) {
      A.row(r).setZero();
      A(r, i) = 1.0;
      b[r] = poly.bounds.hi[i];
      ++r;
    }
  }
  return {std::move(A), std::move(b)};
}

std::vector<int> eps_active(const ScaledPolyhedron& poly, const Vector& x, double epsilon) {
  auto [A, b] = augmented_rows(poly);
  std::vector<int> active;
  for (int i = 0; i < A.rows(); ++i)
    if (A.row(i).dot(x) >= b[i] - epsilon) active.push_back(i);
  return active;
}

bool in_X(const ScaledPolyhedron& poly, const Vector& x) {
  constexpr double slack = 1e-12;
  if (!poly.bounds.contains(x, slack)) return false;
  for (int i = 0; i < poly.num_rows(); ++i)
    if (poly.A_bar.row(i).dot(x) > poly.b_bar[i] + slack) return false;
  return true;
}

DirectionSet default_directions(int n) {
  DirectionSet set;
  set.dirs.reserve(2 * n + 2);
  Vector ones = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  set.dirs.push_back(ones);
  set.dirs.push_back(-ones);
  for (int i = 0; i < n; ++i) set.dirs.push_back(Vector::Unit(n, i));
  for (int i = 0; i < n; ++i) set.dirs.push_back(-Vector::Unit(n, i));
  return set;
}

DirectionSet tangent_cone_generators(const ScaledPolyhedron& poly, const Vector& x,
                                     double epsilon, const DirectionSet& fallback) {
  std::vector<int> active = eps_active(poly, x, epsilon);
  if (active.empty()) return fallback;

  auto [A, b] = augmented_rows(poly);
  const int r = static_cast<int>(active.size());
  const int n = poly.n;
  Matrix B(r, n);
  for (int i = 0; i < r; ++i) B.row(i) = A.row(active[i]);

  if (r > n)
    throw DegenerateConeError(
        "degenerate active set: " + std::to_string(r) + " active rows in dimension " +
        std::to_string(n) + "; use linear_mode = penalty");

  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double threshold = 1e-10 * svd.singularValues()[0];
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > threshold) ++rank;
  if (rank < r)
    throw DegenerateConeError("degenerate active set: rank " + std::to_string(rank) +
                              " < " + std::to_string(r) +
                              " active rows; use linear_mode = penalty");

  DirectionSet gen;
  // B W = -I  =>  W = -B'(BB')^-1 = -pinv(B); columns make nonpositive
  // products with every active row.
  Matrix W = -svd.matrixV().leftCols(r) *
             svd.singularValues().head(r).cwiseInverse().asDiagonal() *
             svd.matrixU().transpose();
  for (int j = 0; j < r; ++j) {
    Vector d = W.col(j);
    gen.dirs.push_back(d / d.norm());
  }
  // Null-space directions (both signs); orthonormal columns of V beyond rank.
  const Matrix& V = svd.matrixV();
  for (int j = r; j < n; ++j) {
    Vector z = V.col(j);
    gen.dirs.push_back(z);
    gen.dirs.push_back(-z);
  }
  return gen;
}

}  // namespace logds
