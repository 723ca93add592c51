#include "bcmsdp/certify.hpp"

#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "bcmsdp/error.hpp"
#include "bcmsdp/lanczos.hpp"

namespace bcmsdp {

double shifted_lambda_max(const ProblemInstance& instance, const Vector& shift, bool* exact) {
  const Index n = instance.n();
  if (shift.size() != n) throw DimensionError("shift vector does not match the instance");
  if (n <= kDenseCertifyLimit) {
    Matrix m = instance.dense();
    m.diagonal() -= shift;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    if (exact) *exact = true;
    return es.eigenvalues()[n - 1];
  }
  const auto& a = instance.matrix();
  LinearOperator op = [&](const Matrix& x) -> Matrix {
    return a * x - shift.asDiagonal() * x;
  };
  SubspaceProjector identity = [](const Matrix& x) -> Matrix { return x; };
  Rng rng = substream(instance.checksum(), 7);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix start(n, 1);
  for (Index i = 0; i < n; ++i) start(i, 0) = normal(rng);
  LanczosOptions opts;
  opts.max_iters = 200;
  opts.tolerance = 1e-8;
  const auto res = lanczos_leading(op, identity, start, n, opts, rng);
  if (exact) *exact = false;
  return res.ritz_value;
}

Certificate dual_upper_bound(const ProblemInstance& instance, const FactorPoint& point,
                             const GradientCache& cache) {
  if (cache.n() != point.n() || point.n() != instance.n()) {
    throw DimensionError("certificate inputs have inconsistent sizes");
  }
  Certificate c;
  c.lambda = cache.inner;
  c.f = c.lambda.sum();
  c.slack = shifted_lambda_max(instance, c.lambda, &c.exact_eigensolve);
  c.upper_bound = c.f + static_cast<double>(instance.n()) * std::max(c.slack, 0.0);
  c.gap = c.upper_bound - c.f;
  return c;
}

ApproxReport approx_report(const ProblemInstance& instance, const FactorPoint& point,
                           const GradientCache& cache, Index r, double epsilon) {
  if (r < 2) throw ValidationError("approximation report needs r >= 2");
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
  const Certificate cert = dual_upper_bound(instance, point, cache);
  ApproxReport rep;
  rep.r = r;
  rep.epsilon = epsilon;
  rep.f = cert.f + instance.trace_offset();
  rep.upper_bound = cert.upper_bound + instance.trace_offset();
  rep.gap = cert.gap;
  if (rep.upper_bound != 0.0) {
    rep.ratio = rep.f / rep.upper_bound;
  } else {
    rep.ratio = rep.f == 0.0 ? 1.0 : 0.0;
  }
  const double rm1 = static_cast<double>(r - 1);
  const double n = static_cast<double>(instance.n());
  const double concave_factor = 1.0 - 1.0 / rm1;
  const double rank_factor = 1.0 - 2.0 / rm1;
  rep.floor_concave = concave_factor * rep.upper_bound - n * epsilon / 2.0;
  rep.floor_rank = rank_factor * rep.upper_bound;
  rep.floor_concave_vacuous = concave_factor <= 0.0;
  rep.floor_rank_vacuous = rank_factor <= 0.0;

  rep.notes.push_back(
      "upper_bound is an unconditional weak-duality bound on the SDP value");
  rep.notes.push_back(
      "floors are guarantees only for a positive semidefinite cost matrix; "
      "otherwise they are diagnostics");
  rep.notes.push_back(
      "floors substitute upper_bound for the unknown SDP value and therefore "
      "over-demand");
  if (!cert.exact_eigensolve) {
    rep.notes.push_back("upper_bound uses a Lanczos estimate of lambda_max");
  }
  if (rep.floor_concave_vacuous) {
    rep.notes.push_back("r = 2 makes the concave-point floor vacuous");
  }
  if (rep.floor_rank_vacuous) {
    rep.notes.push_back("r <= 3 makes the rank floor vacuous");
  }
  return rep;
}

double cut_value(const ProblemInstance& instance, const std::vector<int>& signs) {
  if (static_cast<Index>(signs.size()) != instance.n()) {
    throw DimensionError("sign vector does not match the instance");
  }
  const auto& a = instance.matrix();
  double value = 0.0;
  for (Index i = 0; i < instance.n(); ++i) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      row += it.value() * signs[static_cast<std::size_t>(it.col())];
    value += signs[static_cast<std::size_t>(i)] * row;
  }
  return value;
}

Cut round_cut(const ProblemInstance& instance, const FactorPoint& point,
              std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("round_cut needs at least one trial");
  if (point.n() != instance.n()) throw DimensionError("point does not match the instance");
  const Index n = point.n();
  const Index r = point.r();
  Cut best;
  bool have = false;
  std::vector<int> signs(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < trials; ++k) {
    Vector z(r);
    if (r == 1) {
      z[0] = 1.0;
    } else {
      Rng rng = substream(seed, static_cast<std::uint64_t>(k));
      std::normal_distribution<double> normal(0.0, 1.0);
      do {
        for (Index c = 0; c < r; ++c) z[c] = normal(rng);
      } while (z.norm() == 0.0);
      z.normalize();
    }
    const Vector proj = point.matrix() * z;
    for (Index i = 0; i < n; ++i) signs[static_cast<std::size_t>(i)] = proj[i] >= 0.0 ? 1 : -1;
    const double v = cut_value(instance, signs);
    if (!have || v > best.value) {
      best.signs = signs;
      best.value = v;
      have = true;
    }
  }
  return best;
}

Cut brute_force_best_cut(const ProblemInstance& instance) {
  const Index n = instance.n();
  if (n > kBruteForceLimit) {
    throw ValidationError("brute-force enumeration refused for n = " + std::to_string(n) +
                          " > " + std::to_string(kBruteForceLimit));
  }
  const auto& a = instance.matrix();
  std::vector<int> x(static_cast<std::size_t>(n), 1);
  // field[i] = sum_j A_ij x_j
  std::vector<double> field(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) field[static_cast<std::size_t>(i)] += it.value();
  double value = 0.0;
  for (double h : field) value += h;

  double best_value = value;
  std::uint64_t best_code = 0;
  const std::uint64_t count = n > 1 ? (std::uint64_t{1} << (n - 1)) : 1;
  for (std::uint64_t k = 1; k < count; ++k) {
    // Gray code: step k flips coordinate 1 + ctz(k); coordinate 0 stays +1.
    const Index c = 1 + static_cast<Index>(std::countr_zero(k));
    const auto cu = static_cast<std::size_t>(c);
    value -= 4.0 * x[cu] * field[cu];
    const double change = -2.0 * x[cu];
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      field[static_cast<std::size_t>(it.col())] += it.value() * change;
    x[cu] = -x[cu];
    if (value > best_value) {
      best_value = value;
      best_code = k ^ (k >> 1);
    }
  }

  Cut best;
  best.signs.assign(static_cast<std::size_t>(n), 1);
  for (Index c = 1; c < n; ++c)
    if ((best_code >> (c - 1)) & 1U) best.signs[static_cast<std::size_t>(c)] = -1;
  best.value = cut_value(instance, best.signs);
  return best;
}

}  // namespace bcmsdp
