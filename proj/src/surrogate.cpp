#include "logds/surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace logds {

double QuadraticModel::value(const Vector& y) const {
  Vector s = y - center;
  return c + g.dot(s) + 0.5 * s.dot(H * s);
}

Vector QuadraticModel::gradient(const Vector& y) const { return g + H * (y - center); }

QuadraticModel QuadraticModel::constant(const Vector& center, double value) {
  QuadraticModel m;
  m.center = center;
  m.c = value;
  m.g = Vector::Zero(center.size());
  m.H = Matrix::Zero(center.size(), center.size());
  return m;
}

std::vector<const EvaluationRecord*> select_samples(const std::vector<EvaluationRecord>& history,
                                                    const Vector& center, double radius) {
  const int n = static_cast<int>(center.size());
  const std::size_t cap = static_cast<std::size_t>((n + 1) * (n + 2) / 2);
  std::vector<const EvaluationRecord*> picked;
  for (auto it = history.rbegin(); it != history.rend() && picked.size() < cap; ++it) {
    const EvaluationRecord& rec = *it;
    if (rec.evaluator_failure) continue;
    if (!std::isfinite(rec.f)) continue;
    if ((rec.x - center).norm() > radius) continue;
    bool dup = false;
    for (const EvaluationRecord* kept : picked)
      if ((kept->x - rec.x).norm() <= 1e-12) {
        dup = true;  // newest occurrence already kept
        break;
      }
    if (!dup) picked.push_back(&rec);
  }
  return picked;
}

namespace {

// Natural basis {1, s_i, 0.5 s_i^2, s_i s_j (i<j)}; the quadratic-term
// coefficients are exactly the entries of H.
int quadratic_basis_size(int n) { return (n + 1) * (n + 2) / 2; }

Eigen::RowVectorXd basis_row(const Vector& s) {
  const int n = static_cast<int>(s.size());
  Eigen::RowVectorXd row(quadratic_basis_size(n));
  int k = 0;
  row[k++] = 1.0;
  for (int i = 0; i < n; ++i) row[k++] = s[i];
  for (int i = 0; i < n; ++i) row[k++] = 0.5 * s[i] * s[i];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) row[k++] = s[i] * s[j];
  return row;
}

QuadraticModel model_from_coeffs(const Vector& center, const Vector& a) {
  const int n = static_cast<int>(center.size());
  QuadraticModel m;
  m.center = center;
  m.c = a[0];
  m.g = a.segment(1, n);
  m.H = Matrix::Zero(n, n);
  int k = 1 + n;
  for (int i = 0; i < n; ++i) m.H(i, i) = a[k++];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      m.H(i, j) = a[k];
      m.H(j, i) = a[k];
      ++k;
    }
  return m;
}

bool finite(const Vector& v) { return v.allFinite(); }

std::optional<QuadraticModel> interpolate_full(const SampleSet& samples) {
  const int n = static_cast<int>(samples.center.size());
  const int q = quadratic_basis_size(n);
  Matrix Phi(q, q);
  Vector v(q);
  for (int i = 0; i < q; ++i) {
    Phi.row(i) = basis_row(samples.points[i] - samples.center);
    v[i] = samples.values[i];
  }
  Eigen::FullPivLU<Matrix> lu(Phi);
  if (!lu.isInvertible()) return std::nullopt;
  Vector a = lu.solve(v);
  if (!finite(a)) return std::nullopt;
  return model_from_coeffs(samples.center, a);
}

std::optional<QuadraticModel> regress(const SampleSet& samples) {
  const int n = static_cast<int>(samples.center.size());
  const int q = quadratic_basis_size(n);
  const int p = static_cast<int>(samples.points.size());
  Matrix Phi(p, q);
  Vector v(p);
  for (int i = 0; i < p; ++i) {
    Phi.row(i) = basis_row(samples.points[i] - samples.center);
    v[i] = samples.values[i];
  }
  Matrix N = Phi.transpose() * Phi + 1e-10 * Matrix::Identity(q, q);
  Vector a = N.ldlt().solve(Phi.transpose() * v);
  if (!finite(a)) return std::nullopt;
  return model_from_coeffs(samples.center, a);
}

// Minimum Frobenius norm interpolation: H = sum_i u_i s_i s_i' with the
// KKT system  [Q L; L' 0] [u; w] = [v; 0],  Q_ij = 0.5 (s_i's_j)^2,
// L = [1 S], w = (c, g).
std::optional<QuadraticModel> interpolate_mfn(const SampleSet& samples) {
  const int n = static_cast<int>(samples.center.size());
  const int p = static_cast<int>(samples.points.size());
  Matrix S(p, n);
  Vector v(p);
  for (int i = 0; i < p; ++i) {
    S.row(i) = (samples.points[i] - samples.center).transpose();
    v[i] = samples.values[i];
  }
  Matrix Q(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      double dot = S.row(i).dot(S.row(j));
      Q(i, j) = 0.5 * dot * dot;
    }
  Matrix L(p, n + 1);
  L.col(0).setOnes();
  L.rightCols(n) = S;

  Matrix M = Matrix::Zero(p + n + 1, p + n + 1);
  M.topLeftCorner(p, p) = Q;
  M.topRightCorner(p, n + 1) = L;
  M.bottomLeftCorner(n + 1, p) = L.transpose();
  Vector rhs = Vector::Zero(p + n + 1);
  rhs.head(p) = v;

  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) return std::nullopt;
  Vector sol = lu.solve(rhs);
  if (!finite(sol)) return std::nullopt;

  QuadraticModel m;
  m.center = samples.center;
  m.c = sol[p];
  m.g = sol.segment(p + 1, n);
  m.H = Matrix::Zero(n, n);
  for (int i = 0; i < p; ++i) m.H += sol[i] * S.row(i).transpose() * S.row(i);
  return m;
}

}  // namespace

std::optional<QuadraticModel> build_model(const SampleSet& samples) {
  const int n = static_cast<int>(samples.center.size());
  const int p = static_cast<int>(samples.points.size());
  const int q = quadratic_basis_size(n);
  if (p < n + 1) return std::nullopt;
  std::optional<QuadraticModel> model;
  if (p < q)
    model = interpolate_mfn(samples);
  else if (p == q)
    model = interpolate_full(samples);
  else
    model = regress(samples);
  if (!model) return std::nullopt;

  if (p <= q) {
    // Interpolation must reproduce its data; a large residual signals a
    // nearly singular system that slipped past the rank test.
    double scale = 1.0;
    for (double val : samples.values) scale = std::max(scale, std::fabs(val));
    for (int i = 0; i < p; ++i)
      if (std::fabs(model->value(samples.points[i]) - samples.values[i]) > 1e-6 * scale)
        return std::nullopt;
  }
  return model;
}

std::optional<Vector> simplex_gradient(const SampleSet& samples) {
  const int n = static_cast<int>(samples.center.size());
  int center_idx = -1;
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    if ((samples.points[i] - samples.center).norm() <= 1e-12) {
      center_idx = static_cast<int>(i);
      break;
    }
  if (center_idx < 0 || samples.points.size() < 2) return std::nullopt;

  const int rows = static_cast<int>(samples.points.size()) - 1;
  Matrix S(rows, n);
  Vector delta(rows);
  int r = 0;
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    if (static_cast<int>(i) == center_idx) continue;
    S.row(r) = (samples.points[i] - samples.center).transpose();
    delta[r] = samples.values[i] - samples.values[center_idx];
    ++r;
  }
  Eigen::BDCSVD<Matrix> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || svd.singularValues()[0] <= 1e-14)
    return std::nullopt;
  Vector g = svd.solve(delta);  // minimum-norm least squares
  if (!finite(g)) return std::nullopt;
  return g;
}

std::vector<Vector> order_directions(const std::vector<Vector>& directions,
                                     const std::optional<Vector>& ascent) {
  if (!ascent || ascent->norm() == 0.0) return directions;
  std::vector<std::size_t> idx(directions.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return directions[a].dot(*ascent) < directions[b].dot(*ascent);
  });
  std::vector<Vector> out;
  out.reserve(directions.size());
  for (std::size_t i : idx) out.push_back(directions[i]);
  return out;
}

double model_merit(const QuadraticModel& f_model, const std::vector<QuadraticModel>& g_models,
                   const std::vector<QuadraticModel>& h_models, const ConstraintPartition& part,
                   const MeritParams& params, const Vector& y) {
  double z = f_model.value(y);
  for (int l : part.log_set) {
    double gval = g_models[l].value(y);
    if (gval >= 0.0) return kInf;
    z -= params.rho_log * std::log(-gval);
  }
  double pen = 0.0;
  for (int l : part.ext_set) pen += std::pow(std::max(0.0, g_models[l].value(y)), params.nu);
  for (const QuadraticModel& hm : h_models) pen += std::pow(std::fabs(hm.value(y)), params.nu);
  z += pen / params.rho_ext;
  return std::isfinite(z) ? z : kInf;
}

namespace {

Vector model_merit_gradient(const QuadraticModel& f_model,
                            const std::vector<QuadraticModel>& g_models,
                            const std::vector<QuadraticModel>& h_models,
                            const ConstraintPartition& part, const MeritParams& params,
                            const Vector& y) {
  Vector grad = f_model.gradient(y);
  for (int l : part.log_set) {
    double gval = g_models[l].value(y);
    grad += params.rho_log / (-gval) * g_models[l].gradient(y);
  }
  for (int l : part.ext_set) {
    double gval = g_models[l].value(y);
    if (gval > 0.0)
      grad += params.nu * std::pow(gval, params.nu - 1.0) / params.rho_ext *
              g_models[l].gradient(y);
  }
  for (const QuadraticModel& hm : h_models) {
    double hval = hm.value(y);
    if (hval != 0.0)
      grad += params.nu * std::pow(std::fabs(hval), params.nu - 1.0) / params.rho_ext *
              (hval > 0.0 ? 1.0 : -1.0) * hm.gradient(y);
  }
  return grad;
}

}  // namespace

Vector merit_model_min(const QuadraticModel& f_model, const std::vector<QuadraticModel>& g_models,
                       const std::vector<QuadraticModel>& h_models,
                       const ConstraintPartition& part, const MeritParams& params,
                       const Vector& center, double radius) {
  auto zhat = [&](const Vector& y) {
    return model_merit(f_model, g_models, h_models, part, params, y);
  };
  auto project = [&](Vector y) {
    Vector s = y - center;
    double norm = s.norm();
    if (norm > radius) y = center + s * (radius / norm);
    return y;
  };

  Vector best = center;
  double zbest = zhat(center);
  if (!std::isfinite(zbest)) return best;

  auto descend_from = [&](Vector y) {
    double zy = zhat(y);
    if (!std::isfinite(zy)) return;
    constexpr int max_outer = 50;
    constexpr int max_backtracks = 30;
    double step = radius;
    for (int outer = 0; outer < max_outer; ++outer) {
      Vector grad = model_merit_gradient(f_model, g_models, h_models, part, params, y);
      double gnorm = grad.norm();
      if (!std::isfinite(gnorm) || gnorm <= 1e-14 * (1.0 + std::fabs(zy))) break;

      double t = step / gnorm;
      bool accepted = false;
      for (int bt = 0; bt < max_backtracks; ++bt, t *= 0.5) {
        Vector cand = project(y - t * grad);
        if ((cand - y).squaredNorm() == 0.0) continue;  // pinned by the ball
        double zc = zhat(cand);
        if (zc <= zy + 1e-4 * grad.dot(cand - y)) {
          step = std::min(radius, 2.0 * t * gnorm);
          y = cand;
          zy = zc;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (zy < zbest) {
      zbest = zy;
      best = y;
    }
  };

  // A single descent started at the center cannot leave an invariant
  // symmetry axis (a saddle of the model merit keeps the gradient on the
  // axis), so seed further starts on the ball boundary.
  descend_from(center);
  const int n = static_cast<int>(center.size());
  for (int i = 0; i < n; ++i) {
    descend_from(center + radius * Vector::Unit(n, i));
    descend_from(center - radius * Vector::Unit(n, i));
  }
  Vector diag = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  descend_from(center + radius * diag);
  descend_from(center - radius * diag);
  return best;
}

}  // namespace logds
