#pragma once

#include <cstdint>

#include "bcmsdp/rng.hpp"
#include "bcmsdp/types.hpp"

namespace bcmsdp {

/// A point of the product of n unit spheres in R^r: an n x r matrix whose
/// rows have unit Euclidean norm.
///
/// Rank one points are only useful for rounding diagnostics and must be
/// requested explicitly.
class FactorPoint {
 public:
  static constexpr double kUnitTolerance = 1e-8;

  FactorPoint() = default;

  /// Validates unit rows (within kUnitTolerance) and renormalizes them.
  explicit FactorPoint(Matrix sigma, bool allow_rank_one = false);

  /// Normalizes every row; rows of zero norm are rejected.
  static FactorPoint from_unnormalized(Matrix sigma, bool allow_rank_one = false);

  /// Rows drawn uniformly on the sphere as normalized Gaussian vectors.
  static FactorPoint random(Index n, Index r, Rng& rng, bool allow_rank_one = false);
  static FactorPoint random(Index n, Index r, std::uint64_t seed,
                            bool allow_rank_one = false);

  /// Every row equal to `direction` (normalized).
  static FactorPoint constant(Index n, const Vector& direction,
                              bool allow_rank_one = false);

  Index n() const noexcept { return sigma_.rows(); }
  Index r() const noexcept { return sigma_.cols(); }
  bool rank_one() const noexcept { return sigma_.cols() == 1; }

  const Matrix& matrix() const noexcept { return sigma_; }
  auto row(Index i) const { return sigma_.row(i); }

  /// Replaces row i by `value / ||value||`.
  void set_row_normalized(Index i, const Eigen::Ref<const Eigen::RowVectorXd>& value);

  void renormalize();
  double max_row_norm_error() const;

  std::uint64_t checksum() const;

 private:
  Matrix sigma_;
};

/// An n x r matrix whose rows are orthogonal to the rows of its base point.
/// Holds no reference to the base; operations take the base explicitly.
struct TangentVector {
  Matrix u;

  TangentVector() = default;
  explicit TangentVector(Matrix m) : u(std::move(m)) {}

  static TangentVector zero(const FactorPoint& base) {
    return TangentVector(Matrix::Zero(base.n(), base.r()));
  }

  double norm() const { return u.norm(); }
  double squared_norm() const { return u.squaredNorm(); }
};

double inner(const TangentVector& a, const TangentVector& b);

}  // namespace bcmsdp
