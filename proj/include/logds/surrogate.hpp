#pragma once

#include <optional>
#include <vector>

#include "logds/merit.hpp"

namespace logds {

/// m(y) = c + g'(y - center) + 0.5 (y - center)' H (y - center), H symmetric.
struct QuadraticModel {
  Vector center;
  double c = 0.0;
  Vector g;
  Matrix H;

  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;

  static QuadraticModel constant(const Vector& center, double value);
};

/// Interpolation data for one scalar function: absolute points (all within
/// `radius` of `center`, pairwise distinct) and matched finite values.
struct SampleSet {
  std::vector<Vector> points;
  std::vector<double> values;
  Vector center;
  double radius = 0.0;
};

/// Picks usable history records near `center`: finite raw values, within
/// `radius`, most recent first, capped at (n+1)(n+2)/2, points closer than
/// 1e-12 deduplicated keeping the newest. Pointers remain valid only while
/// `history` is untouched.
std::vector<const EvaluationRecord*> select_samples(const std::vector<EvaluationRecord>& history,
                                                    const Vector& center, double radius);

/// Builds a quadratic from p = |samples| points (q = (n+1)(n+2)/2):
///   p <  n+1 : decline
///   p <  q   : minimum-Frobenius-norm interpolation
///   p == q   : full quadratic interpolation
///   p >  q   : least-squares regression (normal equations, 1e-10 ridge)
/// Declines instead of throwing when the linear algebra is singular.
std::optional<QuadraticModel> build_model(const SampleSet& samples);

/// Least-squares gradient from value differences against the center sample.
/// Declines when the center is missing or the displacement matrix has rank 0.
std::optional<Vector> simplex_gradient(const SampleSet& samples);

/// Stable sort by increasing d . ascent (largest angle with the ascent
/// indicator first). Missing or zero ascent preserves the input order.
std::vector<Vector> order_directions(const std::vector<Vector>& directions,
                                     const std::optional<Vector>& ascent);

/// Approximately minimizes the merit assembled from the models over the ball
/// ||y - center|| <= radius by projected gradient descent with backtracking.
/// Returns the best point found; never worse than `center` in model merit.
/// `g_models` must carry one model per inequality constraint (constant
/// models stand in for declined fits), `h_models` one per equality.
Vector merit_model_min(const QuadraticModel& f_model, const std::vector<QuadraticModel>& g_models,
                       const std::vector<QuadraticModel>& h_models,
                       const ConstraintPartition& part, const MeritParams& params,
                       const Vector& center, double radius);

/// Model merit at y (+inf past the modeled barrier); exposed for tests.
double model_merit(const QuadraticModel& f_model, const std::vector<QuadraticModel>& g_models,
                   const std::vector<QuadraticModel>& h_models, const ConstraintPartition& part,
                   const MeritParams& params, const Vector& y);

}  // namespace logds
