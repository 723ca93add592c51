#include "bcmsdp/escape.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "bcmsdp/certify.hpp"
#include "bcmsdp/error.hpp"
#include "internal.hpp"

namespace bcmsdp {
namespace {

void require_nontrivial(const ProblemInstance& instance) {
  if (!(instance.one_norm() > 0.0)) {
    throw TrivialInstanceError("the zero cost matrix is optimal at every point");
  }
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be a positive finite number");
  }
}

std::int64_t saturating_ceil(double v) {
  if (!(v < 9.0e18)) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::ceil(v));
}

}  // namespace

void EscapeConfig::validate() const {
  if (!auto_epsilon) require_epsilon(epsilon);
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (escape_retries < 0) throw ValidationError("escape_retries must be >= 0");
  if (lanczos_iters && *lanczos_iters < 1) throw ValidationError("lanczos_iters must be >= 1");
}

double escape_threshold(const ProblemInstance& instance, double epsilon) {
  require_epsilon(epsilon);
  require_nontrivial(instance);
  return epsilon * epsilon * epsilon / (1350.0 * instance.one_norm());
}

double escape_step_length(const ProblemInstance& instance, double epsilon) {
  require_epsilon(epsilon);
  require_nontrivial(instance);
  return epsilon / (15.0 * instance.one_norm());
}

std::int64_t bcm2_epoch_cap(const ProblemInstance& instance, double epsilon) {
  require_epsilon(epsilon);
  const double a1 = instance.one_norm();
  return saturating_ceil(675.0 * static_cast<double>(instance.n()) * a1 * a1 /
                         (epsilon * epsilon));
}

TangentVector shifted_hess_apply(const ProblemInstance& instance, const FactorPoint& point,
                                 const GradientCache& cache, const TangentVector& u) {
  TangentVector h = hess_apply(instance, point, cache, u);
  h.u += 4.0 * instance.one_norm() * u.u;
  return h;
}

CurvatureEstimate lanczos_leading(const ProblemInstance& instance, const FactorPoint& point,
                                  const GradientCache& cache, Index max_iters, Rng& rng,
                                  bool reorthogonalize) {
  if (max_iters < 1) throw ValidationError("Lanczos needs max_iters >= 1");
  const Index dim = point.n() * (point.r() - 1);
  if (dim < 1) throw ValidationError("tangent space is trivial for r = 1");

  const double shift = 4.0 * instance.one_norm();
  const Matrix& sigma = point.matrix();
  SubspaceProjector project = [&sigma](const Matrix& w) -> Matrix {
    const Vector coeff = (w.array() * sigma.array()).rowwise().sum();
    return w - coeff.asDiagonal() * sigma;
  };
  const auto& a = instance.matrix();
  LinearOperator op = [&](const Matrix& u) -> Matrix {
    const Matrix w = 2.0 * (a * u - cache.inner.asDiagonal() * u);
    return project(w) + shift * u;
  };

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix start(point.n(), point.r());
  for (Index k = 0; k < start.size(); ++k) start.data()[k] = normal(rng);

  LanczosOptions opts;
  opts.max_iters = max_iters;
  opts.reorthogonalize = reorthogonalize;
  LanczosResult res = lanczos_leading(op, project, start, dim, opts, rng);

  CurvatureEstimate out;
  out.estimate = res.ritz_value - shift;
  out.direction = TangentVector(std::move(res.ritz_vector));
  out.tridiagonal = std::move(res.tridiagonal);
  out.iterations = res.iterations;
  out.stagnated = res.stagnated;
  return out;
}

std::int64_t lanczos_budget(double one_norm, double epsilon, double delta, Index n, Index r) {
  require_epsilon(epsilon);
  if (!(one_norm > 0.0)) throw TrivialInstanceError("Lanczos budget needs ||A||_1 > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (n < 1 || r < 2) throw ValidationError("Lanczos budget needs n >= 1 and r >= 2");
  const double dim = static_cast<double>(n) * static_cast<double>(r - 1);
  const double calls =
      std::ceil(675.0 * static_cast<double>(n) * one_norm * one_norm / (epsilon * epsilon));
  const double l_star = std::ceil((0.5 + 2.0 * std::sqrt(one_norm / epsilon)) *
                                  std::log(calls * 1.648 * std::sqrt(dim) / delta));
  const std::int64_t cap = static_cast<std::int64_t>(n) * (r - 1);
  return std::min(saturating_ceil(l_star), cap);
}

std::int64_t lanczos_budget(const ProblemInstance& instance, double epsilon, double delta,
                            Index r) {
  return lanczos_budget(instance.one_norm(), epsilon, delta, instance.n(), r);
}

double second_order_step(const ProblemInstance& instance, FactorPoint& point,
                         GradientCache& cache, const TangentVector& direction,
                         double epsilon) {
  const double t = escape_step_length(instance, epsilon);
  require_tangent(point, direction);
  if (std::abs(direction.norm() - 1.0) > 1e-8) {
    throw ValidationError("escape direction must have unit Frobenius norm");
  }
  const TangentVector grad = riemannian_gradient(point, cache);
  TangentVector d = direction;
  if (inner(d, grad) < 0.0) d.u = -d.u;

  const double before = cache.objective();
  point = exp_map(point, d, t);
  cache = init_cache(instance, point);
  return cache.objective() - before;
}

SolveResult run_bcm2(const ProblemInstance& instance, const SolverConfig& config,
                     const EscapeConfig& escape, Index rank,
                     std::optional<FactorPoint> initial) {
  config.validate();
  escape.validate();
  if (rank < 2) throw ValidationError("BCM2 needs r >= 2");
  const auto start_time = std::chrono::steady_clock::now();
  const Index n = instance.n();

  FactorPoint point = initial ? std::move(*initial)
                              : FactorPoint::random(n, rank, config.seed);
  if (point.n() != n) throw DimensionError("initial point does not match the instance");
  if (point.r() != rank) throw DimensionError("initial point rank differs from r");

  SolveResult result;
  SolveTrace& trace = result.trace;
  trace.set("method", std::string("bcm2"));
  trace.set("rule", std::string("greedy"));
  detail::describe_run(trace, instance, point);
  trace.set("max_epochs", config.max_epochs);
  trace.set("seed", static_cast<std::int64_t>(config.seed));
  trace.set("refresh_period", config.refresh_period);
  trace.set("delta", escape.delta);
  trace.set("lanczos_reorth", escape.lanczos_reorth);
  trace.set("escape_seed", static_cast<std::int64_t>(escape.seed));
  trace.set("escape_retries", static_cast<std::int64_t>(escape.escape_retries));
  trace.set("auto_epsilon", escape.auto_epsilon);

  GradientCache cache = init_cache(instance, point);
  detail::TraceClock clock(config.record_time);
  double f_raw = cache.objective();

  TraceRecord first;
  first.f_raw = f_raw;
  first.f = f_raw + instance.trace_offset();
  first.grad_metric_sq = grad_metric_sq(cache);
  first.wall_seconds = clock.now();
  trace.records.push_back(first);

  auto finish = [&](Termination why) {
    result.termination = why;
    result.f_raw = objective(instance, point);
    result.grad_metric_sq = grad_metric_sq(init_cache(instance, point));
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    trace.set("termination", std::string(to_string(why)));
    trace.set("k_bcm_steps", result.bcm_steps);
    trace.set("k_escape", result.escape_steps);
    result.point = std::move(point);
    return std::move(result);
  };

  if (instance.is_zero()) {
    trace.set("epsilon", escape.epsilon);
    return finish(Termination::TrivialInstance);
  }

  const double tangent_dim = static_cast<double>(n) * static_cast<double>(rank - 1);
  double epsilon = escape.epsilon;
  if (escape.auto_epsilon) {
    const Certificate cert = dual_upper_bound(instance, point, cache);
    epsilon = 2.0 * (cert.upper_bound + instance.trace_offset()) / tangent_dim;
    if (!(epsilon > 0.0)) return finish(Termination::ConcavePoint);
  }
  double threshold = escape_threshold(instance, epsilon);
  std::int64_t cap = bcm2_epoch_cap(instance, epsilon);
  std::int64_t budget =
      escape.lanczos_iters ? *escape.lanczos_iters
                           : lanczos_budget(instance, epsilon, escape.delta, rank);
  auto echo_thresholds = [&]() {
    trace.set("epsilon", epsilon);
    trace.set("escape_threshold", threshold);
    trace.set("step_length", escape_step_length(instance, epsilon));
    trace.set("epoch_cap", cap);
    trace.set("lanczos_budget", budget);
  };
  echo_thresholds();

  Rng lanczos_rng = substream(escape.seed, 2);
  std::vector<char> touched(static_cast<std::size_t>(n), 0);
  TraceRecord pending;
  std::int64_t steps_since_refresh = 0;

  auto epochs_done = [&]() {
    return result.bcm_steps / n + result.escape_steps;
  };
  auto flush_bcm = [&]() {
    if (pending.steps == 0) return;
    pending.kind = StepKind::Bcm;
    pending.epoch = epochs_done();
    pending.bcm_steps = result.bcm_steps;
    pending.escape_steps = result.escape_steps;
    pending.f_raw = f_raw;
    pending.f = f_raw + instance.trace_offset();
    pending.grad_metric_sq = grad_metric_sq(cache);
    pending.wall_seconds = clock.now();
    trace.records.push_back(pending);
    pending = TraceRecord{};
    std::fill(touched.begin(), touched.end(), 0);
  };

  for (;;) {
    const std::int64_t done = epochs_done();
    if (done >= cap) {
      flush_bcm();
      return finish(Termination::EpochCap);
    }
    if (done >= config.max_epochs) {
      flush_bcm();
      return finish(Termination::MaxEpochs);
    }

    if (grad_metric_sq(cache) > threshold) {
      const Index i = greedy_coordinate(cache);
      const double ascent = bcm_step(instance, point, cache, i);
      if (ascent == 0.0) ++pending.idle_steps;
      if (!touched[static_cast<std::size_t>(i)]) {
        touched[static_cast<std::size_t>(i)] = 1;
        ++pending.distinct_coords;
      }
      f_raw += ascent;
      pending.ascent += ascent;
      ++pending.steps;
      ++result.bcm_steps;
      if (++steps_since_refresh >= config.refresh_period * n) {
        cache = init_cache(instance, point);
        steps_since_refresh = 0;
      }
      if (pending.steps == n) flush_bcm();
      continue;
    }

    flush_bcm();
    cache = init_cache(instance, point);
    steps_since_refresh = 0;

    if (escape.auto_epsilon) {
      const Certificate cert = dual_upper_bound(instance, point, cache);
      const double candidate = 2.0 * (cert.upper_bound + instance.trace_offset()) / tangent_dim;
      if (candidate > 0.0 && candidate < epsilon) {
        epsilon = candidate;
        threshold = escape_threshold(instance, epsilon);
        cap = bcm2_epoch_cap(instance, epsilon);
        if (!escape.lanczos_iters) budget = lanczos_budget(instance, epsilon, escape.delta, rank);
        echo_thresholds();
        if (grad_metric_sq(cache) > threshold) continue;
      }
    }

    CurvatureEstimate est;
    double rayleigh = -std::numeric_limits<double>::infinity();
    Index lanczos_iters = 0;
    for (int attempt = 0; attempt <= escape.escape_retries; ++attempt) {
      est = lanczos_leading(instance, point, cache, budget, lanczos_rng, escape.lanczos_reorth);
      est.direction = project_tangent(point, est.direction.u);
      est.direction.u /= est.direction.norm();
      lanczos_iters += est.iterations;
      rayleigh = hess_quadratic(instance, point, cache, est.direction);
      if (rayleigh >= epsilon / 2.0) break;
    }
    if (rayleigh < epsilon / 2.0) return finish(Termination::ConcavePoint);

    const double ascent = second_order_step(instance, point, cache, est.direction, epsilon);
    f_raw += ascent;
    ++result.escape_steps;

    TraceRecord rec;
    rec.kind = StepKind::Escape;
    rec.epoch = epochs_done();
    rec.bcm_steps = result.bcm_steps;
    rec.escape_steps = result.escape_steps;
    rec.f_raw = f_raw;
    rec.f = f_raw + instance.trace_offset();
    rec.grad_metric_sq = grad_metric_sq(cache);
    rec.ascent = ascent;
    rec.rayleigh = rayleigh;
    rec.lanczos_iters = lanczos_iters;
    rec.wall_seconds = clock.now();
    trace.records.push_back(rec);
  }
}

}  // namespace bcmsdp
