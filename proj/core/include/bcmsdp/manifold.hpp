#pragma once

#include "bcmsdp/gradient_cache.hpp"
#include "bcmsdp/point.hpp"
#include "bcmsdp/problem.hpp"

// Geometry of the product-of-spheres manifold {Sigma : ||sigma_i|| = 1} and
// the derivatives of f(Sigma) = <A, Sigma Sigma^T> on it.

namespace bcmsdp {

/// Inputs whose rows satisfy |<u_i, sigma_i>| <= kTangentTolerance * max(1, ||u||_F)
/// are accepted as tangent.
inline constexpr double kTangentTolerance = 1e-8;

/// Rows with ||u_i|| below this are treated as zero motion by exp_map.
inline constexpr double kZeroMotion = 1e-14;

/// Row i becomes w_i - <sigma_i, w_i> sigma_i.
TangentVector project_tangent(const FactorPoint& point, const Matrix& w);

/// Largest |<u_i, sigma_i>| over rows.
double tangency_error(const FactorPoint& point, const TangentVector& u);

/// Throws ValidationError if u is not tangent at point.
void require_tangent(const FactorPoint& point, const TangentVector& u);

/// Geodesic step sigma_i cos(||u_i|| t) + (u_i/||u_i||) sin(||u_i|| t).
FactorPoint exp_map(const FactorPoint& point, const TangentVector& u, double t = 1.0);

/// (sum_i arccos(<p_i, q_i>)^2)^(1/2) with clamped inner products.
double geodesic_distance(const FactorPoint& p, const FactorPoint& q);

/// lambda_i = <sigma_i, g_i>, i.e. diag(A Sigma Sigma^T).
Vector lambda_diag(const GradientCache& cache);

/// Rows 2 (g_i - <sigma_i, g_i> sigma_i).
TangentVector riemannian_gradient(const FactorPoint& point, const GradientCache& cache);

/// 2 sum_i (||g_i||^2 - <sigma_i, g_i>^2).
///
/// This is the gradient metric the escape threshold is calibrated against.
/// It equals half the squared Frobenius norm of riemannian_gradient(); see
/// grad_frobenius_sq() for the literal norm.
double grad_metric_sq(const GradientCache& cache);
/// Same quantity from the residual rows g_i - <sigma_i, g_i> sigma_i; O(nr)
/// instead of O(n) but free of cancellation near stationary points.
double grad_metric_sq(const FactorPoint& point, const GradientCache& cache);

/// ||riemannian_gradient||_F^2 = 4 sum_i (||g_i||^2 - <sigma_i, g_i>^2).
double grad_frobenius_sq(const FactorPoint& point, const GradientCache& cache);

/// <u, Hess f[u]> = 2 (<U, AU> - sum_i lambda_i ||u_i||^2).
double hess_quadratic(const ProblemInstance& instance, const FactorPoint& point,
                      const GradientCache& cache, const TangentVector& u);

/// Hess f[u] = P(2 (A - Lambda) U).
TangentVector hess_apply(const ProblemInstance& instance, const FactorPoint& point,
                         const GradientCache& cache, const TangentVector& u);

struct ProcrustesAlignment {
  Matrix rotation;  // r x r orthogonal
  double residual;  // ||P - Q_mat * rotation||_F
};

/// Orthogonal R minimizing ||P - Q R||_F, from the SVD of Q^T P. Used to
/// measure distances between orbits {Sigma R : R in O(r)}.
ProcrustesAlignment align_procrustes(const FactorPoint& p, const FactorPoint& q);

}  // namespace bcmsdp
