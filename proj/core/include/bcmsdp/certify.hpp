#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcmsdp/gradient_cache.hpp"
#include "bcmsdp/point.hpp"
#include "bcmsdp/problem.hpp"

namespace bcmsdp {

/// Weak-duality certificate. For any X psd with unit diagonal,
///   <A, X> = <A - Diag(lambda), X> + sum lambda <= n max(s, 0) + sum lambda,
/// with s = lambda_max(A - Diag(lambda)). All values exclude the trace offset.
struct Certificate {
  Vector lambda;
  double f = 0.0;            // <A, Sigma Sigma^T>
  double upper_bound = 0.0;  // sum lambda + n max(s, 0)
  double slack = 0.0;        // s
  double gap = 0.0;          // upper_bound - f
  bool exact_eigensolve = false;
};

/// Dimension up to which lambda_max is computed by a dense eigensolver.
inline constexpr Index kDenseCertifyLimit = 200;

Certificate dual_upper_bound(const ProblemInstance& instance, const FactorPoint& point,
                             const GradientCache& cache);

/// Largest eigenvalue of A - Diag(shift): dense for n <= kDenseCertifyLimit,
/// otherwise 200 Lanczos iterations with residual tolerance 1e-8.
double shifted_lambda_max(const ProblemInstance& instance, const Vector& shift,
                          bool* exact = nullptr);

struct ApproxReport {
  Index r = 0;
  double epsilon = 0.0;
  double f = 0.0;             // includes the trace offset
  double upper_bound = 0.0;   // includes the trace offset
  double ratio = 0.0;         // f / U
  /// (1 - 1/(r-1)) U - n eps/2; guaranteed for eps-approximate concave points
  /// when the cost matrix is psd.
  double floor_concave = 0.0;
  /// (1 - 2/(r-1)) U; the floor reached with eps = 2 SDP / (n (r-1)).
  double floor_rank = 0.0;
  bool floor_concave_vacuous = false;
  bool floor_rank_vacuous = false;
  double gap = 0.0;
  std::vector<std::string> notes;
};

ApproxReport approx_report(const ProblemInstance& instance, const FactorPoint& point,
                           const GradientCache& cache, Index r, double epsilon);

struct Cut {
  std::vector<int> signs;  // entries in {-1, +1}
  double value = 0.0;      // <A, x x^T> without the trace offset

  double value_with_offset(const ProblemInstance& instance) const {
    return value + instance.trace_offset();
  }
};

double cut_value(const ProblemInstance& instance, const std::vector<int>& signs);

/// Best of `trials` hyperplane roundings x_i = sign(<sigma_i, z>), z uniform on
/// the sphere, sign(0) = +1. Trial k draws from substream (seed, k).
Cut round_cut(const ProblemInstance& instance, const FactorPoint& point,
              std::int64_t trials, std::uint64_t seed);

inline constexpr Index kBruteForceLimit = 24;

/// Exhaustive maximization of <A, x x^T> over x in {-1, +1}^n with x_1 = +1.
Cut brute_force_best_cut(const ProblemInstance& instance);

}  // namespace bcmsdp
