#include "bcmsdp/gradient_cache.hpp"

#include <algorithm>

#include "bcmsdp/error.hpp"

namespace bcmsdp {

void GradientCache::refresh_row(const FactorPoint& point, Index i) {
  norms[i] = g.row(i).norm();
  inner[i] = g.row(i).dot(point.row(i));
}

double GradientCache::max_deviation(const ProblemInstance& instance,
                                    const FactorPoint& point) const {
  const Matrix exact = instance.matrix() * point.matrix();
  const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
  return (g - exact).cwiseAbs().maxCoeff() / scale;
}

GradientCache init_cache(const ProblemInstance& instance, const FactorPoint& point) {
  if (instance.n() != point.n()) {
    throw DimensionError("point has " + std::to_string(point.n()) +
                         " rows, instance has n = " + std::to_string(instance.n()));
  }
  GradientCache cache;
  cache.g = instance.matrix() * point.matrix();
  cache.norms = cache.g.rowwise().norm();
  cache.inner = (cache.g.array() * point.matrix().array()).rowwise().sum();
  return cache;
}

double objective(const ProblemInstance& instance, const FactorPoint& point) {
  if (instance.n() != point.n()) throw DimensionError("point/instance size mismatch");
  const Matrix g = instance.matrix() * point.matrix();
  return (g.array() * point.matrix().array()).sum();
}

}  // namespace bcmsdp
