#include "bcmsdp/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "bcmsdp/error.hpp"

namespace bcmsdp {
namespace {

double dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

void orthogonalize(Matrix& v, const std::vector<Matrix>& basis) {
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) v -= dot(q, v) * q;
}

Matrix random_like(const Matrix& shape, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(shape.rows(), shape.cols());
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
  return m;
}

}  // namespace

Matrix TridiagonalForm::dense() const {
  const Index m = size();
  Matrix t = Matrix::Zero(m, m);
  for (Index k = 0; k < m; ++k) t(k, k) = alpha[k];
  for (Index k = 0; k + 1 < m; ++k) t(k, k + 1) = t(k + 1, k) = beta[k];
  return t;
}

std::pair<double, Vector> tridiagonal_leading(const Vector& alpha, const Vector& beta) {
  const Index m = alpha.size();
  if (m == 0) throw ValidationError("empty tridiagonal matrix");
  if (beta.size() != m - 1) throw DimensionError("tridiagonal off-diagonal size");
  if (m == 1) return {alpha[0], Vector::Ones(1)};
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(alpha, beta, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    // The implicit QR sweep can stall on graded off-diagonals; the dense
    // path reduces the same matrix with its own Householder pass.
    TridiagonalForm t;
    t.alpha = alpha;
    t.beta = beta;
    es.compute(t.dense());
  }
  if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");
  return {es.eigenvalues()[m - 1], es.eigenvectors().col(m - 1)};
}

LanczosResult lanczos_leading(const LinearOperator& op, const SubspaceProjector& project,
                              const Matrix& start, Index dim,
                              const LanczosOptions& options, Rng& rng) {
  if (options.max_iters < 1) throw ValidationError("Lanczos needs max_iters >= 1");
  if (dim < 1) throw ValidationError("Lanczos subspace is empty");
  const Index budget = std::min(options.max_iters, dim);

  LanczosResult out;
  auto& basis = out.tridiagonal.basis;
  std::vector<double> alpha, beta;

  Matrix u = project(start);
  double unorm = u.norm();
  for (int attempt = 0; unorm == 0.0 && attempt < 8; ++attempt) {
    u = project(random_like(start, rng));
    unorm = u.norm();
  }
  if (unorm == 0.0) throw NumericalError("cannot draw a Lanczos start vector");
  u /= unorm;

  Matrix w = op(u);
  double scale = w.norm();
  alpha.push_back(dot(u, w));
  Matrix r = project(w - alpha.back() * u);
  basis.push_back(std::move(u));

  auto ritz_residual = [&]() {
    const Vector a = Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
    const Vector b = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
    auto [theta, y] = tridiagonal_leading(a, b);
    return std::pair{theta, std::abs(y[y.size() - 1]) * r.norm()};
  };

  while (static_cast<Index>(basis.size()) < budget) {
    if (options.reorthogonalize) orthogonalize(r, basis);
    double b = r.norm();
    Matrix next;
    if (b <= 1e-10 * std::max(scale, 1e-300)) {
      // Invariant subspace reached: continue in its orthogonal complement.
      next = project(random_like(start, rng));
      orthogonalize(next, basis);
      next = project(next);
      orthogonalize(next, basis);
      const double nn = next.norm();
      if (nn <= 1e-8) {
        out.stagnated = true;
        break;
      }
      next /= nn;
      b = 0.0;
    } else {
      next = r / b;
    }
    beta.push_back(b);
    w = op(next);
    scale = std::max(scale, w.norm());
    alpha.push_back(dot(next, w));
    r = w - alpha.back() * next;
    if (b != 0.0) r -= b * basis.back();
    r = project(r);
    basis.push_back(std::move(next));

    const Index m = static_cast<Index>(basis.size());
    if (options.tolerance > 0.0 && m % options.check_every == 0) {
      auto [theta, res] = ritz_residual();
      if (res <= options.tolerance * std::max(1.0, std::abs(theta))) break;
    }
  }

  const Index m = static_cast<Index>(basis.size());
  out.iterations = m;
  out.exhausted = m >= dim;
  out.tridiagonal.alpha = Eigen::Map<const Vector>(alpha.data(), m);
  out.tridiagonal.beta = Eigen::Map<const Vector>(beta.data(), m - 1);

  auto [theta, y] = tridiagonal_leading(out.tridiagonal.alpha, out.tridiagonal.beta);
  Matrix x = Matrix::Zero(start.rows(), start.cols());
  for (Index k = 0; k < m; ++k) x += y[k] * basis[static_cast<std::size_t>(k)];
  x = project(x);
  const double xn = x.norm();
  if (xn == 0.0) throw NumericalError("Lanczos produced a zero Ritz vector");
  x /= xn;
  out.ritz_value = theta;
  out.residual = (op(x) - theta * x).norm();
  out.ritz_vector = std::move(x);
  return out;
}

}  // namespace bcmsdp
