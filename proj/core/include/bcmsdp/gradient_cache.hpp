#pragma once

#include "bcmsdp/point.hpp"
#include "bcmsdp/problem.hpp"

namespace bcmsdp {

/// Neighbor sums g_i = sum_{j != i} A_ij sigma_j, with their norms and the
/// inner products <sigma_i, g_i>. Kept consistent with one FactorPoint.
struct GradientCache {
  Matrix g;       // n x r
  Vector norms;   // ||g_i||
  Vector inner;   // <sigma_i, g_i>

  Index n() const noexcept { return g.rows(); }

  /// Recomputes norms[i] and inner[i] from g and the point.
  void refresh_row(const FactorPoint& point, Index i);

  /// sum_i <sigma_i, g_i> = <A, Sigma Sigma^T> without the trace offset.
  double objective() const { return inner.sum(); }

  /// Largest relative deviation from a full recomputation A * Sigma.
  double max_deviation(const ProblemInstance& instance,
                       const FactorPoint& point) const;
};

/// g = A * Sigma in O(nnz r).
GradientCache init_cache(const ProblemInstance& instance, const FactorPoint& point);

/// <A, Sigma Sigma^T> computed from scratch, without the trace offset.
double objective(const ProblemInstance& instance, const FactorPoint& point);

}  // namespace bcmsdp
