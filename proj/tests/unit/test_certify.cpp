#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bcmsdp/bcm.hpp"
#include "bcmsdp/certify.hpp"
#include "bcmsdp/error.hpp"
#include "oracles.hpp"

using namespace bcmsdp;

namespace {

ProblemInstance edge() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return preprocess(m);
}

ProblemInstance triangle() { return gen_erdos_renyi(3, 3, -1, 0); }

FactorPoint triangle_optimum() {
  Matrix s(3, 2);
  for (Index i = 0; i < 3; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / 3.0;
    s(i, 0) = std::cos(th);
    s(i, 1) = std::sin(th);
  }
  return FactorPoint(s);
}

FactorPoint all_equal(Index n, Index r) {
  Vector e = Vector::Zero(r);
  e[0] = 1.0;
  return FactorPoint::constant(n, e);
}

}  // namespace

TEST(DualBound, SingleEdgeOptimum) {
  const auto inst = edge();
  const auto p = all_equal(2, 3);
  const auto c = dual_upper_bound(inst, p, init_cache(inst, p));
  EXPECT_NEAR(c.lambda[0], 1.0, 1e-15);
  EXPECT_NEAR(c.lambda[1], 1.0, 1e-15);
  EXPECT_NEAR(c.slack, 0.0, 1e-14);
  EXPECT_NEAR(c.upper_bound, 2.0, 1e-13);
  EXPECT_NEAR(c.f, 2.0, 1e-15);
  EXPECT_TRUE(c.exact_eigensolve);
}

TEST(DualBound, TriangleOptimumIsTight) {
  const auto inst = triangle();
  const auto p = triangle_optimum();
  const auto c = dual_upper_bound(inst, p, init_cache(inst, p));
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(c.lambda[i], 1.0, 1e-14);
  EXPECT_NEAR(c.slack, 0.0, 1e-13);
  EXPECT_NEAR(c.upper_bound, 3.0, 1e-12);
  EXPECT_LT(c.gap, 1e-12);
}

TEST(DualBound, NonStationaryPointHasGap) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = gen_gaussian(20, seed);
    const auto p = FactorPoint::random(20, 4, seed);
    const auto c = dual_upper_bound(inst, p, init_cache(inst, p));
    EXPECT_GE(c.upper_bound, c.f - 1e-8);
    EXPECT_GT(c.gap, 0.0);
    // Slack against the dense oracle.
    Matrix m = inst.dense();
    m.diagonal() -= c.lambda;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    EXPECT_NEAR(c.slack, es.eigenvalues().maxCoeff(), 1e-10);
  }
}

TEST(DualBound, LanczosPathAboveDenseLimit) {
  const auto inst = gen_erdos_renyi(300, 900, -1, 4);
  const auto p = FactorPoint::random(300, 5, 4);
  const auto cache = init_cache(inst, p);
  const auto c = dual_upper_bound(inst, p, cache);
  EXPECT_FALSE(c.exact_eigensolve);
  Matrix m = inst.dense();
  m.diagonal() -= c.lambda;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(c.slack, es.eigenvalues().maxCoeff(), 1e-6 * std::max(1.0, std::abs(c.slack)));
}

TEST(DualBound, ShapeMismatch) {
  const auto inst = edge();
  const auto p = FactorPoint::random(3, 2, 0);
  EXPECT_THROW(dual_upper_bound(inst, p, init_cache(triangle(), p)), DimensionError);
}

TEST(ApproxReport, RankTwoFloorIsVacuous) {
  const auto inst = triangle();
  const auto p = triangle_optimum();
  const auto rep = approx_report(inst, p, init_cache(inst, p), 2, 0.1);
  EXPECT_TRUE(rep.floor_concave_vacuous);
  EXPECT_NEAR(rep.floor_concave, -3 * 0.1 / 2, 1e-12);
  EXPECT_NEAR(rep.ratio, 1.0, 1e-12);
  EXPECT_NEAR(rep.upper_bound, 3.0, 1e-12);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(ApproxReport, RankFloorFactor) {
  const auto inst = gen_gaussian(60, 1);
  const auto p = FactorPoint::random(60, 11, 1);
  const auto rep = approx_report(inst, p, init_cache(inst, p), 11, 0.0);
  EXPECT_NEAR(rep.floor_rank, 0.8 * rep.upper_bound, 1e-12 * std::abs(rep.upper_bound));
  EXPECT_FALSE(rep.floor_rank_vacuous);
  EXPECT_THROW(approx_report(inst, p, init_cache(inst, p), 1, 0.1), ValidationError);
}

TEST(ApproxReport, IncludesTraceOffset) {
  Matrix m = triangle().dense();
  m.diagonal().setConstant(2.0);
  const auto inst = preprocess(m);
  const auto p = triangle_optimum();
  const auto rep = approx_report(inst, p, init_cache(inst, p), 2, 0.0);
  EXPECT_NEAR(rep.f, 9.0, 1e-12);
  EXPECT_NEAR(rep.upper_bound, 9.0, 1e-12);
}

TEST(RoundCut, IdenticalRows) {
  const auto inst = edge();
  const auto cut = round_cut(inst, all_equal(2, 3), 20, 1);
  EXPECT_EQ(cut.signs[0], cut.signs[1]);
  EXPECT_EQ(cut.value, 2.0);
}

TEST(RoundCut, TriangleOptimum) {
  const auto inst = triangle();
  const auto cut = round_cut(inst, triangle_optimum(), 100, 2);
  EXPECT_EQ(cut.value, oracle::best_cut(inst.dense()));
  EXPECT_EQ(cut.value, 2.0);
}

TEST(RoundCut, RankOneUsesEntrySigns) {
  Matrix s(4, 1);
  s << 1, -1, -1, 1;
  const FactorPoint p(s, true);
  const auto inst = gen_gaussian(4, 3);
  const auto cut = round_cut(inst, p, 5, 0);
  EXPECT_EQ(cut.signs, (std::vector<int>{1, -1, -1, 1}));
  EXPECT_NEAR(cut.value, cut_value(inst, cut.signs), 1e-15);
}

TEST(RoundCut, ReproducibleAndConsistent) {
  const auto inst = gen_erdos_renyi(20, 40, -1, 5);
  const auto p = FactorPoint::random(20, 4, 5);
  const auto a = round_cut(inst, p, 200, 9);
  const auto b = round_cut(inst, p, 200, 9);
  EXPECT_EQ(a.signs, b.signs);
  EXPECT_EQ(a.value, b.value);
  Vector x(20);
  for (Index i = 0; i < 20; ++i) x[i] = a.signs[static_cast<std::size_t>(i)];
  EXPECT_NEAR(a.value, x.dot(inst.dense() * x), 1e-10);
  // More trials never do worse: trial k uses the same substream regardless of count.
  EXPECT_GE(round_cut(inst, p, 400, 9).value, a.value);
  EXPECT_THROW(round_cut(inst, p, 0, 9), ValidationError);
}

TEST(BruteForce, Examples) {
  EXPECT_EQ(brute_force_best_cut(triangle()).value, 2.0);
  const auto e = brute_force_best_cut(edge());
  EXPECT_EQ(e.value, 2.0);
  EXPECT_EQ(e.signs, (std::vector<int>{1, 1}));
  EXPECT_THROW(brute_force_best_cut(gen_gaussian(25, 0)), ValidationError);
}

TEST(BruteForce, MatchesEnumerationOracle) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = seed % 2 ? gen_gaussian(11, seed) : gen_erdos_renyi(12, 25, -1, seed);
    const auto cut = brute_force_best_cut(inst);
    EXPECT_NEAR(cut.value, oracle::best_cut(inst.dense()), 1e-10);
    EXPECT_EQ(cut.signs[0], 1);
    EXPECT_NEAR(cut.value, cut_value(inst, cut.signs), 1e-12);
  }
}

TEST(CertifyInvariants, WeakDualityChain) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = gen_erdos_renyi(14, 30, seed % 2 ? 1 : -1, seed);
    const double brute = brute_force_best_cut(inst).value;
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.max_epochs = 50;
    const auto res = run(inst, cfg, 4);
    // Every iterate in the trace is feasible; check the final and a fresh random point.
    for (const auto& p : {res.point, FactorPoint::random(14, 4, seed + 50)}) {
      const auto cache = init_cache(inst, p);
      const auto cert = dual_upper_bound(inst, p, cache);
      const auto cut = round_cut(inst, p, 100, seed);
      EXPECT_LE(cut.value, brute + 1e-9);
      EXPECT_LE(brute, cert.upper_bound + 1e-8);
      EXPECT_LE(cert.f, cert.upper_bound + 1e-8);
    }
  }
}
