#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bcmsdp/gradient_cache.hpp"
#include "bcmsdp/point.hpp"
#include "bcmsdp/problem.hpp"
#include "bcmsdp/rng.hpp"
#include "bcmsdp/trace.hpp"

namespace bcmsdp {

enum class SelectionRule { Uniform, Importance, Greedy, Cyclic };

const char* to_string(SelectionRule rule);
SelectionRule parse_rule(const std::string& name);

struct SolverConfig {
  SelectionRule rule = SelectionRule::Greedy;
  std::int64_t max_epochs = 10000;
  /// Stop once grad_metric_sq <= grad_tol. Unset means 1e-12 * n * ||A||_1^2.
  std::optional<double> grad_tol;
  std::uint64_t seed = 0;
  /// Epochs between full recomputations of the gradient cache.
  std::int64_t refresh_period = 100;
  /// Adds wall-clock seconds to trace rows (makes traces non-reproducible).
  bool record_time = false;

  void validate() const;
  double resolved_grad_tol(const ProblemInstance& instance) const;
};

/// Draws coordinates according to a selection rule. Owns the cyclic cursor;
/// randomized rules draw from the generator passed to next().
class CoordinateSelector {
 public:
  explicit CoordinateSelector(SelectionRule rule) : rule_(rule) {}

  Index next(const GradientCache& cache, Rng& rng);
  SelectionRule rule() const noexcept { return rule_; }

 private:
  SelectionRule rule_;
  Index cursor_ = 0;
};

/// Greedy score ||g_i|| - <sigma_i, g_i>; argmax with ties to the lowest index.
Index greedy_coordinate(const GradientCache& cache);

/// sigma_i <- g_i / ||g_i|| with the incremental cache update of the rows
/// adjacent to i. Returns the ascent 2 (||g_i|| - <sigma_i, g_i>) measured
/// before the update; a row with g_i = 0 or without positive ascent is left
/// unchanged and 0 is returned.
double bcm_step(const ProblemInstance& instance, FactorPoint& point,
                GradientCache& cache, Index i);

enum class Termination {
  Stationary,     // gradient metric at or below tolerance
  ConcavePoint,   // no escape direction with enough curvature
  MaxEpochs,
  EpochCap,       // second-order iteration budget exhausted
  TrivialInstance,
};

const char* to_string(Termination t);

struct SolveResult {
  FactorPoint point;
  SolveTrace trace;
  Termination termination = Termination::MaxEpochs;
  std::int64_t bcm_steps = 0;
  std::int64_t escape_steps = 0;
  double f_raw = 0.0;          // recomputed from scratch at termination
  double grad_metric_sq = 0.0;
  double wall_seconds = 0.0;

  double f(const ProblemInstance& instance) const {
    return f_raw + instance.trace_offset();
  }
};

/// Block-coordinate maximization. Without an initial point, rows are drawn
/// uniformly on the sphere from `config.seed`.
SolveResult run(const ProblemInstance& instance, const SolverConfig& config,
                Index rank, std::optional<FactorPoint> initial = std::nullopt);

}  // namespace bcmsdp
