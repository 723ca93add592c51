#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bcmsdp/rng.hpp"
#include "bcmsdp/types.hpp"

namespace bcmsdp {

/// Symmetric tridiagonal matrix built by the Lanczos recurrence together
/// with the basis that tridiagonalizes the operator.
struct TridiagonalForm {
  Vector alpha;               // diagonal, size m
  Vector beta;                // off-diagonal, size m - 1, all >= 0
  std::vector<Matrix> basis;  // m vectors, orthonormal in the Frobenius product

  Index size() const noexcept { return alpha.size(); }
  Matrix dense() const;
};

/// Largest eigenvalue of the tridiagonal matrix and its unit eigenvector.
std::pair<double, Vector> tridiagonal_leading(const Vector& alpha, const Vector& beta);

using LinearOperator = std::function<Matrix(const Matrix&)>;
/// Orthogonal projection onto the subspace the operator acts on.
using SubspaceProjector = std::function<Matrix(const Matrix&)>;

struct LanczosOptions {
  Index max_iters = 50;
  /// Full reorthogonalization against the stored basis.
  bool reorthogonalize = true;
  /// Early exit when the Ritz residual ||r|| |y_m| <= tolerance * max(1, |theta|).
  /// Zero runs the whole budget.
  double tolerance = 0.0;
  Index check_every = 10;
};

struct LanczosResult {
  double ritz_value = 0.0;
  Matrix ritz_vector;       // unit Frobenius norm, inside the subspace
  TridiagonalForm tridiagonal;
  Index iterations = 0;
  bool exhausted = false;   // the whole subspace was spanned
  bool stagnated = false;   // a breakdown could not be restarted
  double residual = 0.0;    // ||A x - theta x||_F
};

/// Lanczos three-term recurrence for the leading eigenpair of a symmetric
/// operator restricted to a subspace of dimension `dim`. On breakdown
/// (beta = 0) the recurrence restarts from a random vector orthogonal to the
/// current basis.
LanczosResult lanczos_leading(const LinearOperator& op, const SubspaceProjector& project,
                              const Matrix& start, Index dim,
                              const LanczosOptions& options, Rng& rng);

}  // namespace bcmsdp
