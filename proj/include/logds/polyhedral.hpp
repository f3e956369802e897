#pragma once

#include <stdexcept>
#include <vector>

#include "logds/problem.hpp"

namespace logds {

/// Raised when the epsilon-active rows are rank deficient; cone generation
/// for the degenerate case is not implemented. Callers should fall back to
/// linear_mode = penalty.
class DegenerateConeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Ax <= b with every row scaled to unit Euclidean norm, plus the box.
/// The feasible set is unchanged by the scaling. For activity and cone
/// purposes the finite bound faces are folded in as +-unit rows; membership
/// tests the bounds separately.
struct ScaledPolyhedron {
  Matrix A_bar;  // q x n, unit rows
  Vector b_bar;  // q
  Bounds bounds;
  int n = 0;

  int num_rows() const { return static_cast<int>(b_bar.size()); }
};

/// Divides each row of A (and entry of b) by the row norm. A zero row throws
/// std::invalid_argument naming the row. Bounds pass through untouched.
ScaledPolyhedron scale_rows(const Matrix& A, const Vector& b, Bounds bounds, int n);

/// Bounds-only polyhedron (no general rows).
ScaledPolyhedron box_polyhedron(Bounds bounds, int n);

/// Scaled rows followed by the finite bound faces as unit rows; row i of the
/// result pairs with entry i of the returned vector. Bound rows are appended
/// variable by variable, lower face (-e_i, -lo_i) before upper (e_i, hi_i).
std::pair<Matrix, Vector> augmented_rows(const ScaledPolyhedron& poly);

/// I(x, eps) = { i : a_i' x >= b_i - eps } over the augmented rows.
std::vector<int> eps_active(const ScaledPolyhedron& poly, const Vector& x, double epsilon);

/// True iff A_bar x <= b_bar + 1e-12 and the bounds hold with the same slack.
bool in_X(const ScaledPolyhedron& poly, const Vector& x);

struct DirectionSet {
  std::vector<Vector> dirs;  // unit norm, nonempty
};

/// [ones, -ones, I, -I] normalized, in that order.
DirectionSet default_directions(int n);

/// Generators of the eps-tangent cone at x. Empty active set returns
/// `fallback`. With active unit rows stacked into B of full row rank the set
/// is the normalized columns of -B'(BB')^-1 together with +-(null-space
/// basis of B). Rank-deficient B throws DegenerateConeError.
DirectionSet tangent_cone_generators(const ScaledPolyhedron& poly, const Vector& x,
                                     double epsilon, const DirectionSet& fallback);

}  // namespace logds
