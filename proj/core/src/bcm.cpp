#include "bcmsdp/bcm.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include "bcmsdp/error.hpp"
#include "bcmsdp/manifold.hpp"
#include "internal.hpp"

namespace bcmsdp {

const char* to_string(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::Uniform: return "uniform";
    case SelectionRule::Importance: return "importance";
    case SelectionRule::Greedy: return "greedy";
    case SelectionRule::Cyclic: return "cyclic";
  }
  return "?";
}

SelectionRule parse_rule(const std::string& name) {
  if (name == "uniform") return SelectionRule::Uniform;
  if (name == "importance") return SelectionRule::Importance;
  if (name == "greedy") return SelectionRule::Greedy;
  if (name == "cyclic") return SelectionRule::Cyclic;
  throw ValidationError("unknown selection rule '" + name + "'");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Stationary: return "stationary";
    case Termination::ConcavePoint: return "concave_point";
    case Termination::MaxEpochs: return "max_epochs";
    case Termination::EpochCap: return "epoch_cap";
    case Termination::TrivialInstance: return "trivial_instance";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (grad_tol && !(*grad_tol >= 0.0)) throw ValidationError("grad_tol must be >= 0");
  if (refresh_period < 1) throw ValidationError("refresh_period must be >= 1");
}

double SolverConfig::resolved_grad_tol(const ProblemInstance& instance) const {
  if (grad_tol) return *grad_tol;
  const double a1 = instance.one_norm();
  return 1e-12 * static_cast<double>(instance.n()) * a1 * a1;
}

Index greedy_coordinate(const GradientCache& cache) {
  Index best = 0;
  double best_score = cache.norms[0] - cache.inner[0];
  for (Index i = 1; i < cache.n(); ++i) {
    const double score = cache.norms[i] - cache.inner[i];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

Index CoordinateSelector::next(const GradientCache& cache, Rng& rng) {
  const Index n = cache.n();
  switch (rule_) {
    case SelectionRule::Uniform: {
      std::uniform_int_distribution<Index> pick(0, n - 1);
      return pick(rng);
    }
    case SelectionRule::Importance: {
      const double total = cache.norms.sum();
      if (!(total > 0.0)) {
        std::uniform_int_distribution<Index> pick(0, n - 1);
        return pick(rng);
      }
      std::uniform_real_distribution<double> unit(0.0, total);
      const double target = unit(rng);
      double acc = 0.0;
      Index last_positive = 0;
      for (Index i = 0; i < n; ++i) {
        if (cache.norms[i] <= 0.0) continue;
        acc += cache.norms[i];
        last_positive = i;
        if (target < acc) return i;
      }
      return last_positive;
    }
    case SelectionRule::Greedy:
      return greedy_coordinate(cache);
    case SelectionRule::Cyclic: {
      const Index i = cursor_;
      cursor_ = (cursor_ + 1) % n;
      return i;
    }
  }
  return 0;
}

double bcm_step(const ProblemInstance& instance, FactorPoint& point,
                GradientCache& cache, Index i) {
  if (i < 0 || i >= point.n()) {
    throw ValidationError("coordinate " + std::to_string(i) + " out of range");
  }
  const double gnorm = cache.norms[i];
  if (gnorm == 0.0) return 0.0;
  const double ascent = 2.0 * (gnorm - cache.inner[i]);
  if (!(ascent > 0.0)) return 0.0;

  const Eigen::RowVectorXd updated = cache.g.row(i) / gnorm;
  const Eigen::RowVectorXd delta = updated - point.row(i);
  point.set_row_normalized(i, updated);

  for (SparseMatrix::InnerIterator it(instance.matrix(), i); it; ++it) {
    const Index j = it.col();
    cache.g.row(j) += it.value() * delta;
    cache.refresh_row(point, j);
  }
  cache.refresh_row(point, i);
  return ascent;
}

SolveResult run(const ProblemInstance& instance, const SolverConfig& config,
                Index rank, std::optional<FactorPoint> initial) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index n = instance.n();

  FactorPoint point = initial ? std::move(*initial)
                              : FactorPoint::random(n, rank, config.seed);
  if (point.n() != n) throw DimensionError("initial point does not match the instance");
  if (point.r() != rank) throw DimensionError("initial point rank differs from r");

  SolveResult result;
  result.trace.set("method", std::string("bcm"));
  result.trace.set("rule", std::string(to_string(config.rule)));
  detail::describe_run(result.trace, instance, point);
  const double tol = config.resolved_grad_tol(instance);
  result.trace.set("max_epochs", config.max_epochs);
  result.trace.set("grad_tol", tol);
  result.trace.set("seed", static_cast<std::int64_t>(config.seed));
  result.trace.set("refresh_period", config.refresh_period);

  GradientCache cache = init_cache(instance, point);
  Rng rng = substream(config.seed, 1);
  CoordinateSelector selector(config.rule);
  detail::TraceClock clock(config.record_time);

  double f_raw = cache.objective();
  TraceRecord rec;
  rec.f_raw = f_raw;
  rec.f = f_raw + instance.trace_offset();
  rec.grad_metric_sq = grad_metric_sq(cache);
  rec.wall_seconds = clock.now();
  result.trace.records.push_back(rec);

  std::vector<char> touched(static_cast<std::size_t>(n), 0);
  result.termination = Termination::MaxEpochs;
  for (std::int64_t epoch = 1;; ++epoch) {
    if (grad_metric_sq(cache) <= tol) {
      result.termination =
          instance.is_zero() ? Termination::TrivialInstance : Termination::Stationary;
      break;
    }
    if (epoch > config.max_epochs) break;

    std::fill(touched.begin(), touched.end(), 0);
    TraceRecord r;
    for (Index step = 0; step < n; ++step) {
      const Index i = selector.next(cache, rng);
      const double ascent = bcm_step(instance, point, cache, i);
      if (ascent == 0.0) ++r.idle_steps;
      if (!touched[static_cast<std::size_t>(i)]) {
        touched[static_cast<std::size_t>(i)] = 1;
        ++r.distinct_coords;
      }
      f_raw += ascent;
      r.ascent += ascent;
    }
    result.bcm_steps += n;
    if (epoch % config.refresh_period == 0) cache = init_cache(instance, point);

    r.epoch = epoch;
    r.bcm_steps = result.bcm_steps;
    r.steps = n;
    r.f_raw = f_raw;
    r.f = f_raw + instance.trace_offset();
    r.grad_metric_sq = grad_metric_sq(cache);
    r.wall_seconds = clock.now();
    result.trace.records.push_back(r);
  }

  result.f_raw = objective(instance, point);
  result.grad_metric_sq = grad_metric_sq(init_cache(instance, point));
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.trace.set("termination", std::string(to_string(result.termination)));
  result.point = std::move(point);
  return result;
}

}  // namespace bcmsdp
