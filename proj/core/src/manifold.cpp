#include "bcmsdp/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "bcmsdp/error.hpp"

namespace bcmsdp {
namespace {

void require_same_shape(const FactorPoint& point, const Matrix& m, const char* what) {
  if (m.rows() != point.n() || m.cols() != point.r()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(point.n()) +
                         "x" + std::to_string(point.r()) + ", got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_cache(const FactorPoint& point, const GradientCache& cache) {
  if (cache.g.rows() != point.n() || cache.g.cols() != point.r()) {
    throw DimensionError("gradient cache does not match the point");
  }
}

}  // namespace

TangentVector project_tangent(const FactorPoint& point, const Matrix& w) {
  require_same_shape(point, w, "project_tangent");
  const Matrix& s = point.matrix();
  const Vector coeff = (w.array() * s.array()).rowwise().sum();
  return TangentVector(w - coeff.asDiagonal() * s);
}

double tangency_error(const FactorPoint& point, const TangentVector& u) {
  require_same_shape(point, u.u, "tangent vector");
  if (u.u.rows() == 0) return 0.0;
  return (u.u.array() * point.matrix().array()).rowwise().sum().abs().maxCoeff();
}

void require_tangent(const FactorPoint& point, const TangentVector& u) {
  const double err = tangency_error(point, u);
  if (err > kTangentTolerance * std::max(1.0, u.norm())) {
    throw ValidationError("vector is not tangent at the point (max |<u_i, sigma_i>| = " +
                          std::to_string(err) + ")");
  }
}

FactorPoint exp_map(const FactorPoint& point, const TangentVector& u, double t) {
  require_tangent(point, u);
  if (t < 0.0 || !std::isfinite(t)) throw ValidationError("exp_map needs finite t >= 0");
  Matrix out = point.matrix();
  if (t == 0.0) return point;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = u.u.row(i).norm();
    if (norm < kZeroMotion) continue;
    const double angle = norm * t;
    out.row(i) = point.row(i) * std::cos(angle) + (u.u.row(i) / norm) * std::sin(angle);
    out.row(i).normalize();
  }
  return FactorPoint(std::move(out), point.rank_one());
}

double geodesic_distance(const FactorPoint& p, const FactorPoint& q) {
  require_same_shape(p, q.matrix(), "geodesic_distance");
  double sum = 0.0;
  for (Index i = 0; i < p.n(); ++i) {
    const double angle =
        2.0 * std::atan2((p.row(i) - q.row(i)).norm(), (p.row(i) + q.row(i)).norm());
    sum += angle * angle;
  }
  return std::sqrt(sum);
}

Vector lambda_diag(const GradientCache& cache) { return cache.inner; }

TangentVector riemannian_gradient(const FactorPoint& point, const GradientCache& cache) {
  require_cache(point, cache);
  return TangentVector(2.0 * (cache.g - cache.inner.asDiagonal() * point.matrix()));
}

double grad_metric_sq(const GradientCache& cache) {
  double sum = 0.0;
  for (Index i = 0; i < cache.norms.size(); ++i) {
    const double nrm = cache.norms[i];
    const double in = cache.inner[i];
    // ||g||^2 - <sigma, g>^2 factored to limit cancellation.
    sum += std::max(0.0, (nrm - in) * (nrm + in));
  }
  return 2.0 * sum;
}

double grad_metric_sq(const FactorPoint& point, const GradientCache& cache) {
  require_cache(point, cache);
  const Matrix res = cache.g - cache.inner.asDiagonal() * point.matrix();
  return 2.0 * res.squaredNorm();
}

double grad_frobenius_sq(const FactorPoint& point, const GradientCache& cache) {
  return riemannian_gradient(point, cache).squared_norm();
}

double hess_quadratic(const ProblemInstance& instance, const FactorPoint& point,
                      const GradientCache& cache, const TangentVector& u) {
  require_cache(point, cache);
  require_tangent(point, u);
  const Matrix au = instance.matrix() * u.u;
  const double uau = (u.u.array() * au.array()).sum();
  const double weighted = (cache.inner.array() * u.u.rowwise().squaredNorm().array()).sum();
  return 2.0 * (uau - weighted);
}

TangentVector hess_apply(const ProblemInstance& instance, const FactorPoint& point,
                         const GradientCache& cache, const TangentVector& u) {
  require_cache(point, cache);
  require_tangent(point, u);
  const Matrix w = 2.0 * (instance.matrix() * u.u - cache.inner.asDiagonal() * u.u);
  return project_tangent(point, w);
}

ProcrustesAlignment align_procrustes(const FactorPoint& p, const FactorPoint& q) {
  require_same_shape(p, q.matrix(), "align_procrustes");
  const Matrix m = q.matrix().transpose() * p.matrix();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesAlignment out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.residual = (p.matrix() - q.matrix() * out.rotation).norm();
  return out;
}

}  // namespace bcmsdp
