#pragma once

#include <cstdint>
#include <optional>

#include "bcmsdp/bcm.hpp"
#include "bcmsdp/lanczos.hpp"
#include "bcmsdp/manifold.hpp"

// Second-order escape for block-coordinate maximization: when the gradient
// metric drops below eps^3 / (1350 ||A||_1), a Lanczos estimate of the
// leading tangent Hessian eigenvector is followed along a geodesic of length
// eps / (15 ||A||_1).

namespace bcmsdp {

struct EscapeConfig {
  double epsilon = 1e-2;
  /// Failure probability used to size the Lanczos budget.
  double delta = 0.01;
  bool lanczos_reorth = true;
  std::uint64_t seed = 0;
  /// Replace epsilon by 2 U / (n (r - 1)), U the running dual upper bound.
  bool auto_epsilon = false;
  /// Fresh Lanczos starts tried before accepting a concave-point verdict.
  int escape_retries = 0;
  /// Overrides the theoretical Lanczos budget when set.
  std::optional<Index> lanczos_iters;

  void validate() const;
};

double escape_threshold(const ProblemInstance& instance, double epsilon);

/// Geodesic step length eps / (15 ||A||_1).
double escape_step_length(const ProblemInstance& instance, double epsilon);

/// ceil(675 n ||A||_1^2 / eps^2), the combined epoch budget.
std::int64_t bcm2_epoch_cap(const ProblemInstance& instance, double epsilon);

/// Hess f[u] + 4 ||A||_1 u, positive semidefinite on the tangent space.
TangentVector shifted_hess_apply(const ProblemInstance& instance, const FactorPoint& point,
                                 const GradientCache& cache, const TangentVector& u);

struct CurvatureEstimate {
  /// Leading Ritz value of the shifted operator minus 4 ||A||_1.
  double estimate = 0.0;
  /// Unit Frobenius tangent direction reconstructed from the Lanczos basis.
  TangentVector direction;
  TridiagonalForm tridiagonal;
  Index iterations = 0;
  bool stagnated = false;
};

/// Lanczos on the shifted tangent Hessian started from the tangent
/// projection of a Gaussian matrix.
CurvatureEstimate lanczos_leading(const ProblemInstance& instance, const FactorPoint& point,
                                  const GradientCache& cache, Index max_iters, Rng& rng,
                                  bool reorthogonalize = true);

/// min(l*, n (r - 1)) with
///   l* = ceil((1/2 + 2 sqrt(||A||_1/eps)) log(ceil(675 n ||A||_1^2/eps^2) 1.648 sqrt(n (r-1)) / delta)).
std::int64_t lanczos_budget(double one_norm, double epsilon, double delta, Index n, Index r);
std::int64_t lanczos_budget(const ProblemInstance& instance, double epsilon, double delta,
                            Index r);

/// Moves along exp_map(point, +-direction, eps / (15 ||A||_1)), choosing the
/// sign with <direction, grad f> >= 0, then rebuilds the cache from scratch.
/// Returns the measured increase of f.
double second_order_step(const ProblemInstance& instance, FactorPoint& point,
                         GradientCache& cache, const TangentVector& direction,
                         double epsilon);

/// Greedy BCM interleaved with second-order escape steps. Stops with
/// Termination::ConcavePoint once a direction's Rayleigh quotient falls
/// below eps/2, or when the combined epoch cap (or config.max_epochs) is hit.
SolveResult run_bcm2(const ProblemInstance& instance, const SolverConfig& config,
                     const EscapeConfig& escape, Index rank,
                     std::optional<FactorPoint> initial = std::nullopt);

}  // namespace bcmsdp
