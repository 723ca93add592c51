#include <cmath>

#include <gtest/gtest.h>

#include "bcmsdp/certify.hpp"
#include "bcmsdp/error.hpp"
#include "bcmsdp/escape.hpp"
#include "oracles.hpp"

using namespace bcmsdp;

namespace {

ProblemInstance triangle() { return gen_erdos_renyi(3, 3, -1, 0); }

FactorPoint all_equal(Index n, Index r) {
  Vector e = Vector::Zero(r);
  e[0] = 1.0;
  return FactorPoint::constant(n, e);
}

TangentVector random_tangent(const FactorPoint& p, std::mt19937_64& rng) {
  return project_tangent(p, oracle::random_matrix(p.n(), p.r(), rng));
}

// Top eigenvector of the dense tangent Hessian as an n x r matrix.
Matrix oracle_top_direction(const Matrix& a, const Matrix& sigma) {
  const auto basis = oracle::tangent_basis(sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::tangent_hessian(a, sigma));
  const Vector y = es.eigenvectors().col(es.eigenvalues().size() - 1);
  Matrix d = Matrix::Zero(sigma.rows(), sigma.cols());
  for (std::size_t k = 0; k < basis.size(); ++k) d += y[static_cast<Index>(k)] * basis[k];
  return d / d.norm();
}

LinearOperator dense_op(const Matrix& m) {
  return [m](const Matrix& x) -> Matrix { return m * x; };
}

Matrix identity_projector(const Matrix& x) { return x; }

}  // namespace

TEST(Tridiagonal, LeadingMatchesDense) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (Index m : {1, 2, 5, 30}) {
    Vector alpha(m), beta(std::max<Index>(m - 1, 0));
    for (Index k = 0; k < m; ++k) alpha[k] = g(rng);
    for (Index k = 0; k + 1 < m; ++k) beta[k] = std::abs(g(rng));
    TridiagonalForm t;
    t.alpha = alpha;
    t.beta = beta;
    const Matrix dense = t.dense();
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
    const auto [theta, y] = tridiagonal_leading(alpha, beta);
    EXPECT_NEAR(theta, es.eigenvalues().maxCoeff(), 1e-12);
    EXPECT_NEAR(y.norm(), 1.0, 1e-12);
    EXPECT_LT((dense * y - theta * y).norm(), 1e-10);
  }
  EXPECT_THROW(tridiagonal_leading(Vector(0), Vector(0)), ValidationError);
  EXPECT_THROW(tridiagonal_leading(Vector::Ones(3), Vector::Ones(1)), DimensionError);
}

TEST(GenericLanczos, FullBudgetIsExact) {
  std::mt19937_64 src(2);
  std::normal_distribution<double> g;
  Matrix m(40, 40);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = g(src);
  const Matrix sym = 0.5 * (m + m.transpose());
  m = sym;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Rng rng = make_rng(2);
  LanczosOptions opts;
  opts.max_iters = 40;
  const auto res = lanczos_leading(dense_op(m), identity_projector,
                                   oracle::random_matrix(40, 1, src), 40, opts, rng);
  EXPECT_NEAR(res.ritz_value, es.eigenvalues().maxCoeff(), 1e-10);
  EXPECT_TRUE(res.exhausted);
  EXPECT_LT(res.residual, 1e-8);

  const auto& basis = res.tridiagonal.basis;
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double d = (basis[i].array() * basis[j].array()).sum();
      worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
    }
  EXPECT_LT(worst, 1e-10);
  EXPECT_GE(res.tridiagonal.beta.minCoeff(), 0.0);
}

TEST(GenericLanczos, BreakdownRestarts) {
  // A start inside a 2-dimensional eigenspace breaks down after two steps.
  Vector d(6);
  d << 1, 1, 2, 3, 5, 8;
  const Matrix m = d.asDiagonal();
  Matrix start = Matrix::Zero(6, 1);
  start(0, 0) = 1.0;
  start(2, 0) = 1.0;
  Rng rng = make_rng(3);
  LanczosOptions opts;
  opts.max_iters = 6;
  const auto res = lanczos_leading(dense_op(m), identity_projector, start, 6, opts, rng);
  EXPECT_NEAR(res.ritz_value, 8.0, 1e-12);
  EXPECT_FALSE(res.stagnated);
  EXPECT_EQ(res.tridiagonal.beta[1], 0.0);
}

TEST(GenericLanczos, ToleranceStopsEarly) {
  Vector d = Vector::LinSpaced(200, 0.0, 1.0);
  d[199] = 10.0;
  const Matrix m = d.asDiagonal();
  Rng rng = make_rng(4);
  std::mt19937_64 src(4);
  LanczosOptions opts;
  opts.max_iters = 200;
  opts.tolerance = 1e-8;
  const auto res = lanczos_leading(dense_op(m), identity_projector,
                                   oracle::random_matrix(200, 1, src), 200, opts, rng);
  EXPECT_LT(res.iterations, 200);
  EXPECT_NEAR(res.ritz_value, 10.0, 1e-8);
}

TEST(EscapeThreshold, Examples) {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  const auto unit = preprocess(m);
  EXPECT_DOUBLE_EQ(escape_threshold(unit, 1.0), 1.0 / 1350.0);
  EXPECT_DOUBLE_EQ(escape_threshold(unit, 0.2) / escape_threshold(unit, 0.1), 8.0);
  EXPECT_THROW(escape_threshold(unit, 0.0), ValidationError);
  EXPECT_THROW(escape_threshold(unit, -1.0), ValidationError);
  EXPECT_THROW(escape_threshold(preprocess(Matrix::Zero(3, 3)), 1.0), TrivialInstanceError);

  const auto g = gen_gaussian(30, 2);
  EXPECT_DOUBLE_EQ(escape_threshold(g, 0.3), 0.027 / (1350.0 * g.one_norm()));
  EXPECT_DOUBLE_EQ(escape_step_length(g, 0.3), 0.3 / (15.0 * g.one_norm()));
  EXPECT_EQ(bcm2_epoch_cap(unit, 0.1), 67500 * 2);
  EXPECT_THROW(escape_step_length(unit, 0.0), ValidationError);
}

TEST(ShiftedHessian, ZeroInstance) {
  std::mt19937_64 rng(5);
  const auto zero = preprocess(Matrix::Zero(4, 4));
  const auto p = FactorPoint::random(4, 3, 5);
  EXPECT_EQ(shifted_hess_apply(zero, p, init_cache(zero, p), random_tangent(p, rng)).norm(), 0.0);
  EXPECT_THROW(lanczos_budget(zero, 0.1, 0.1, 3), TrivialInstanceError);
}

TEST(ShiftedHessian, PositiveSemidefiniteOnTangents) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto inst = seed % 2 ? gen_gaussian(8, seed) : gen_erdos_renyi(8, 14, -1, seed);
    const auto p = FactorPoint::random(8, 3, rng);
    const auto cache = init_cache(inst, p);
    const double shift = 4.0 * inst.one_norm();
    // ||Hess||_op <= 4 ||A||_1 on the dense oracle.
    Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::tangent_hessian(inst.dense(), p.matrix()));
    EXPECT_GE(es.eigenvalues().minCoeff() + shift, -1e-10);
    for (int k = 0; k < 25; ++k) {
      const auto u = random_tangent(p, rng);
      const double q = inner(u, shifted_hess_apply(inst, p, cache, u));
      EXPECT_GE(q, -1e-12);
      EXPECT_NEAR(q, hess_quadratic(inst, p, cache, u) + shift * u.squared_norm(), 1e-10);
    }
  }
}

TEST(LanczosLeading, FullBudgetMatchesDenseOracle) {
  std::mt19937_64 src(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = gen_gaussian(10, static_cast<std::uint64_t>(trial));
    const auto p = FactorPoint::random(10, 4, src);
    const auto cache = init_cache(inst, p);
    const double dense = oracle::tangent_hessian_lambda_max(inst.dense(), p.matrix());
    Rng rng = make_rng(static_cast<std::uint64_t>(trial));
    const auto est = lanczos_leading(inst, p, cache, 30, rng);
    EXPECT_NEAR(est.estimate, dense, 1e-8);
    EXPECT_EQ(est.iterations, 30);
    EXPECT_NEAR(est.direction.norm(), 1.0, 1e-12);
    EXPECT_LT(tangency_error(p, est.direction), 1e-12);
    EXPECT_GE(hess_quadratic(inst, p, cache, est.direction), est.estimate - 1e-8);
  }
}

TEST(LanczosLeading, FewIterationsOnLargeTangentSpace) {
  // n = 200, r = 2: a 200-dimensional tangent space, 20 iterations.
  const auto inst = gen_gaussian(200, 8);
  std::mt19937_64 src(8);
  int within = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = FactorPoint::random(200, 2, src);
    const auto cache = init_cache(inst, p);
    const double dense = oracle::tangent_hessian_lambda_max(inst.dense(), p.matrix());
    Rng rng = make_rng(static_cast<std::uint64_t>(100 + trial));
    const auto est = lanczos_leading(inst, p, cache, 20, rng);
    EXPECT_LE(est.estimate, dense + 1e-9);
    if (std::abs(est.estimate - dense) <= 0.01 * std::abs(dense)) ++within;
  }
  EXPECT_GE(within, 9);
}

TEST(LanczosLeading, TridiagonalInvariants) {
  const auto inst = gen_gaussian(12, 9);
  const auto p = FactorPoint::random(12, 3, 9);
  const auto cache = init_cache(inst, p);
  for (bool reorth : {true, false}) {
    Rng rng = make_rng(9);
    const auto est = lanczos_leading(inst, p, cache, 15, rng, reorth);
    const auto& basis = est.tridiagonal.basis;
    EXPECT_GE(est.tridiagonal.beta.minCoeff(), 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      EXPECT_LT(tangency_error(p, TangentVector(basis[i])), 1e-12);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double d = (basis[i].array() * basis[j].array()).sum();
        worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
      }
    }
    EXPECT_LT(worst, reorth ? 1e-10 : 1e-6);
  }
}

TEST(LanczosLeading, Errors) {
  const auto inst = gen_gaussian(5, 1);
  const auto p = FactorPoint::random(5, 3, 1);
  Rng rng = make_rng(1);
  EXPECT_THROW(lanczos_leading(inst, p, init_cache(inst, p), 0, rng), ValidationError);
}

TEST(LanczosBudget, FrozenValue) {
  EXPECT_EQ(lanczos_budget(1.0, 0.1, 0.1, 100, 15), 152);
}

TEST(LanczosBudget, CapAndMonotonicity) {
  for (Index n : {3, 10, 100})
    for (Index r : {2, 3, 8})
      for (double eps : {1.0, 0.1, 1e-3}) {
        EXPECT_LE(lanczos_budget(1.0, eps, 0.1, n, r), n * (r - 1));
        EXPECT_GE(lanczos_budget(2.5, eps / 4, 0.1, n, r), lanczos_budget(2.5, eps, 0.1, n, r));
      }
  // Below the cap the leading factor grows like 2 sqrt(||A||_1 / eps).
  const auto b1 = lanczos_budget(1.0, 1e-2, 0.1, 100000, 50);
  const auto b4 = lanczos_budget(1.0, 1e-2 / 4, 0.1, 100000, 50);
  EXPECT_GT(b4, 1.8 * b1);
  EXPECT_THROW(lanczos_budget(1.0, 0.1, 1.5, 10, 3), ValidationError);
  EXPECT_THROW(lanczos_budget(1.0, 0.1, 0.1, 10, 1), ValidationError);
}

TEST(SecondOrderStep, TriangleSaddleAscentFloor) {
  const auto tri = triangle();
  const double a1 = tri.one_norm();
  for (double eps : {0.5, 0.1, 0.01}) {
    auto p = all_equal(3, 2);
    auto cache = init_cache(tri, p);
    const Matrix d = oracle_top_direction(tri.dense(), p.matrix());
    ASSERT_GE(hess_quadratic(tri, p, cache, TangentVector(d)), eps / 2);
    const double ascent = second_order_step(tri, p, cache, TangentVector(d), eps);
    EXPECT_GE(ascent, eps * eps * eps / (2700.0 * a1 * a1) - 1e-9);
    EXPECT_NEAR(ascent, objective(tri, p) + 6.0, 1e-12);
    EXPECT_LT(cache.max_deviation(tri, p), 1e-15);
  }
}

TEST(SecondOrderStep, SignFollowsGradient) {
  std::mt19937_64 rng(10);
  const auto inst = gen_gaussian(10, 10);
  const auto p0 = FactorPoint::random(10, 3, rng);
  const auto cache0 = init_cache(inst, p0);
  const auto grad = riemannian_gradient(p0, cache0);
  TangentVector d(-grad.u / grad.norm());
  ASSERT_LT(inner(d, grad), 0.0);
  const double eps = 0.2;
  auto p = p0;
  auto cache = cache0;
  second_order_step(inst, p, cache, d, eps);
  const auto expected = exp_map(p0, TangentVector(-d.u), escape_step_length(inst, eps));
  EXPECT_LT((p.matrix() - expected.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SecondOrderStep, Validation) {
  const auto inst = gen_gaussian(6, 11);
  auto p = FactorPoint::random(6, 3, 11);
  auto cache = init_cache(inst, p);
  std::mt19937_64 rng(11);
  auto u = random_tangent(p, rng);
  u.u *= 2.0 / u.norm();
  EXPECT_THROW(second_order_step(inst, p, cache, u, 0.1), ValidationError);
  u.u /= u.norm();
  EXPECT_THROW(second_order_step(inst, p, cache, u, 0.0), ValidationError);
  EXPECT_THROW(second_order_step(inst, p, cache, TangentVector(p.matrix() / p.matrix().norm()), 0.1),
               ValidationError);
}

TEST(EscapeConfig, Validation) {
  EscapeConfig c;
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EscapeConfig{};
  c.delta = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EscapeConfig{};
  c.escape_retries = -1;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(run_bcm2(triangle(), SolverConfig{}, EscapeConfig{}, 1), ValidationError);
}

TEST(RunBcm2, EscapesTriangleSaddle) {
  EscapeConfig esc;
  esc.epsilon = 0.01;
  const auto tri = triangle();
  const auto res = run_bcm2(tri, SolverConfig{}, esc, 2, all_equal(3, 2));
  EXPECT_GE(res.f_raw, 3.0 - 3.0 * 0.01 / 2.0);
  EXPECT_GE(res.escape_steps, 1);
  EXPECT_EQ(res.trace.records.at(1).kind, StepKind::Escape);
  EXPECT_LE(res.bcm_steps / 3 + res.escape_steps, bcm2_epoch_cap(tri, 0.01));
}

TEST(RunBcm2, ZeroInstance) {
  const auto res = run_bcm2(preprocess(Matrix::Zero(4, 4)), SolverConfig{}, EscapeConfig{}, 2);
  EXPECT_EQ(res.termination, Termination::TrivialInstance);
  EXPECT_EQ(res.f_raw, 0.0);
  EXPECT_EQ(res.bcm_steps + res.escape_steps, 0);
}

TEST(RunBcm2, GaussianRankFloor) {
  const Index n = 60, r = 11;
  const auto inst = gen_gaussian(n, 12);
  EscapeConfig esc;
  esc.auto_epsilon = true;
  SolverConfig cfg;
  cfg.seed = 12;
  const auto res = run_bcm2(inst, cfg, esc, r);
  const auto cache = init_cache(inst, res.point);
  const auto cert = dual_upper_bound(inst, res.point, cache);
  EXPECT_GE(res.f_raw, (1.0 - 2.0 / (r - 1)) * cert.upper_bound);
}

TEST(RunBcm2, MonotoneTraceAndEscapeFloor) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto inst = gen_erdos_renyi(12, 30, -1, seed);
    EscapeConfig esc;
    esc.epsilon = 0.05;
    SolverConfig cfg;
    cfg.seed = seed;
    const auto res = run_bcm2(inst, cfg, esc, 3);
    const double floor = std::pow(0.05, 3) / (2700.0 * inst.one_norm() * inst.one_norm());
    const auto& recs = res.trace.records;
    for (std::size_t k = 1; k < recs.size(); ++k) {
      EXPECT_GE(recs[k].f, recs[k - 1].f);
      if (recs[k].kind == StepKind::Escape) {
        EXPECT_GE(recs[k].ascent, floor - 1e-9);
        EXPECT_GE(recs[k].rayleigh, 0.05 / 2);
      }
    }
  }
}

TEST(RunBcm2, ConcaveVerdictConfirmedByDenseOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Index n = 8, r = 3;
    const auto inst = seed % 2 ? gen_gaussian(n, seed) : gen_erdos_renyi(n, 12, -1, seed);
    EscapeConfig esc;
    esc.epsilon = 0.05;
    esc.lanczos_iters = n * (r - 1);
    SolverConfig cfg;
    cfg.seed = seed;
    const auto res = run_bcm2(inst, cfg, esc, r);
    ASSERT_EQ(res.termination, Termination::ConcavePoint);
    EXPECT_LE(oracle::tangent_hessian_lambda_max(inst.dense(), res.point.matrix()),
              esc.epsilon + 1e-6);
  }
}

TEST(RunBcm2, HeaderEchoesThresholds) {
  EscapeConfig esc;
  esc.epsilon = 0.02;
  const auto tri = triangle();
  const auto res = run_bcm2(tri, SolverConfig{}, esc, 2);
  ASSERT_NE(res.trace.find("escape_threshold"), nullptr);
  EXPECT_DOUBLE_EQ(std::get<double>(*res.trace.find("escape_threshold")),
                   escape_threshold(tri, 0.02));
  EXPECT_EQ(std::get<std::int64_t>(*res.trace.find("epoch_cap")), bcm2_epoch_cap(tri, 0.02));
  EXPECT_EQ(std::get<std::string>(*res.trace.find("method")), "bcm2");
}

TEST(RunBcm2, GradedTridiagonalDoesNotAbort) {
  // This run produces a tridiagonal with near-zero off-diagonals on which
  // the implicit QR sweep alone fails to converge.
  const auto inst = gen_erdos_renyi(17, 34, -1, 805);
  EscapeConfig esc;
  esc.epsilon = 1e-3;
  SolverConfig cfg;
  cfg.seed = 8005;
  const auto res = run_bcm2(inst, cfg, esc, 6);
  EXPECT_EQ(res.termination, Termination::ConcavePoint);
}
