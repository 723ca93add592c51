#include "bcmsdp/point.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bcmsdp/error.hpp"

namespace bcmsdp {
namespace {

void check_shape(const Matrix& sigma, bool allow_rank_one) {
  if (sigma.rows() < 1) throw DimensionError("factor point needs n >= 1 rows");
  if (sigma.cols() < 1) throw DimensionError("factor point needs r >= 1 columns");
  if (sigma.cols() == 1 && !allow_rank_one) {
    throw ValidationError("rank r = 1 requires an explicit rank-one opt-in");
  }
  if (!sigma.allFinite()) throw ValidationError("factor point has non-finite entries");
}

}  // namespace

FactorPoint::FactorPoint(Matrix sigma, bool allow_rank_one)
    : sigma_(std::move(sigma)) {
  check_shape(sigma_, allow_rank_one);
  for (Index i = 0; i < sigma_.rows(); ++i) {
    const double norm = sigma_.row(i).norm();
    if (std::abs(norm - 1.0) > kUnitTolerance) {
      throw ValidationError("row " + std::to_string(i) + " has norm " +
                            std::to_string(norm) + ", expected 1");
    }
    // Rows already unit to rounding are kept bit-exact.
    if (std::abs(norm - 1.0) > 1e-15) sigma_.row(i) /= norm;
  }
}

FactorPoint FactorPoint::from_unnormalized(Matrix sigma, bool allow_rank_one) {
  check_shape(sigma, allow_rank_one);
  for (Index i = 0; i < sigma.rows(); ++i) {
    const double norm = sigma.row(i).norm();
    if (norm == 0.0) {
      throw ValidationError("row " + std::to_string(i) + " is zero");
    }
    sigma.row(i) /= norm;
  }
  FactorPoint p;
  p.sigma_ = std::move(sigma);
  return p;
}

FactorPoint FactorPoint::random(Index n, Index r, Rng& rng, bool allow_rank_one) {
  Matrix sigma(n, r);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (Index k = 0; k < r; ++k) sigma(i, k) = normal(rng);
      norm = sigma.row(i).norm();
    } while (norm == 0.0);
  }
  return from_unnormalized(std::move(sigma), allow_rank_one);
}

FactorPoint FactorPoint::random(Index n, Index r, std::uint64_t seed,
                                bool allow_rank_one) {
  Rng rng = make_rng(seed);
  return random(n, r, rng, allow_rank_one);
}

FactorPoint FactorPoint::constant(Index n, const Vector& direction,
                                  bool allow_rank_one) {
  Matrix sigma = direction.transpose().replicate(n, 1);
  return from_unnormalized(std::move(sigma), allow_rank_one);
}

void FactorPoint::set_row_normalized(
    Index i, const Eigen::Ref<const Eigen::RowVectorXd>& value) {
  sigma_.row(i) = value / value.norm();
}

void FactorPoint::renormalize() { sigma_.rowwise().normalize(); }

double FactorPoint::max_row_norm_error() const {
  if (sigma_.rows() == 0) return 0.0;
  return (sigma_.rowwise().norm().array() - 1.0).abs().maxCoeff();
}

std::uint64_t FactorPoint::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t dims[2] = {sigma_.rows(), sigma_.cols()};
  feed(dims, sizeof dims);
  for (Index i = 0; i < sigma_.rows(); ++i)
    for (Index k = 0; k < sigma_.cols(); ++k) {
      const double v = sigma_(i, k);
      feed(&v, sizeof v);
    }
  return h;
}

double inner(const TangentVector& a, const TangentVector& b) {
  if (a.u.rows() != b.u.rows() || a.u.cols() != b.u.cols()) {
    throw DimensionError("tangent vectors of different shapes");
  }
  return (a.u.array() * b.u.array()).sum();
}

}  // namespace bcmsdp
