#include "bcmsdp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <unordered_set>

#include "bcmsdp/error.hpp"
#include "bcmsdp/rng.hpp"

namespace bcmsdp {

ProblemInstance ProblemInstance::from_triplets(Index n,
                                               const std::vector<Triplet>& raw) {
  if (n < 1) throw ValidationError("instance dimension must be positive");

  std::vector<Eigen::Triplet<double, std::int64_t>> entries;
  entries.reserve(raw.size());
  for (const auto& t : raw) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw DimensionError("entry (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") outside a " +
                           std::to_string(n) + "x" + std::to_string(n) +
                           " matrix");
    }
    if (!std::isfinite(t.value)) {
      throw ValidationError("non-finite entry at (" + std::to_string(t.row) +
                            ", " + std::to_string(t.col) + ")");
    }
    entries.emplace_back(t.row, t.col, t.value);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());

  // The transpose is materialized in the same storage order so that both
  // operands hold the summed duplicate M_ij; (M_ij + M_ji) == (M_ji + M_ij)
  // then makes the symmetry exact.
  SparseMatrix mt = m.transpose();
  SparseMatrix sym = 0.5 * (m + mt);

  ProblemInstance inst;
  inst.n_ = n;
  double trace = 0.0;
  for (Index i = 0; i < n; ++i) trace += sym.coeff(i, i);
  inst.trace_offset_ = trace;

  sym.prune([](Index r, Index c, double v) { return r != c && v != 0.0; });
  sym.makeCompressed();
  inst.A_ = std::move(sym);

  Vector col_sums = Vector::Zero(n);
  double l11 = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(inst.A_, i); it; ++it) {
      col_sums[it.col()] += std::abs(it.value());
      l11 += std::abs(it.value());
    }
  }
  inst.one_norm_ = n > 0 ? col_sums.maxCoeff() : 0.0;
  inst.l11_norm_ = l11;
  return inst;
}

Matrix ProblemInstance::dense() const { return Matrix(A_); }

double ProblemInstance::entry(Index i, Index j) const { return A_.coeff(i, j); }

std::uint64_t ProblemInstance::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t n = n_;
  feed(&n, sizeof n);
  feed(&trace_offset_, sizeof trace_offset_);
  for (Index i = 0; i < n_; ++i) {
    for (SparseMatrix::InnerIterator it(A_, i); it; ++it) {
      const std::int64_t r = i, c = it.col();
      const double v = it.value();
      feed(&r, sizeof r);
      feed(&c, sizeof c);
      feed(&v, sizeof v);
    }
  }
  return h;
}

ProblemInstance preprocess(const Matrix& raw) {
  if (raw.rows() != raw.cols()) {
    throw DimensionError("cost matrix must be square, got " +
                         std::to_string(raw.rows()) + "x" +
                         std::to_string(raw.cols()));
  }
  if (raw.rows() == 0) throw ValidationError("cost matrix is empty");
  std::vector<Triplet> entries;
  for (Index i = 0; i < raw.rows(); ++i) {
    for (Index j = 0; j < raw.cols(); ++j) {
      const double v = raw(i, j);
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite entry at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
      }
      if (v != 0.0) entries.push_back({i, j, v});
    }
  }
  return ProblemInstance::from_triplets(raw.rows(), entries);
}

ProblemInstance gen_gaussian(Index n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("gaussian instance needs n >= 2");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  const Matrix a = (g + g.transpose()) / static_cast<double>(n);
  return preprocess(a);
}

ProblemInstance gen_erdos_renyi(Index n, std::int64_t edges, int sign,
                                std::uint64_t seed) {
  if (n < 2) throw ValidationError("graph instance needs n >= 2");
  if (sign != 1 && sign != -1) throw ValidationError("sign must be +1 or -1");
  const std::int64_t capacity = static_cast<std::int64_t>(n) * (n - 1) / 2;
  if (edges < 1) throw ValidationError("edge count must be positive");
  if (edges > capacity) {
    throw ValidationError("edge count " + std::to_string(edges) +
                          " exceeds n(n-1)/2 = " + std::to_string(capacity));
  }

  // Floyd's sampling of `edges` distinct pair indices from [0, capacity).
  Rng rng = make_rng(seed);
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(edges) * 2);
  for (std::int64_t j = capacity - edges; j < capacity; ++j) {
    std::uniform_int_distribution<std::int64_t> pick(0, j);
    const std::int64_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::int64_t> keys(chosen.begin(), chosen.end());
  std::sort(keys.begin(), keys.end());

  // Pair index k enumerates (i, j), i < j, row by row.
  std::vector<Triplet> entries;
  entries.reserve(keys.size() * 2);
  Index row = 0;
  std::int64_t row_start = 0;
  const double w = static_cast<double>(sign);
  for (const std::int64_t k : keys) {
    while (k >= row_start + (n - 1 - row)) {
      row_start += n - 1 - row;
      ++row;
    }
    const Index col = row + 1 + static_cast<Index>(k - row_start);
    entries.push_back({row, col, w});
    entries.push_back({col, row, w});
  }
  return ProblemInstance::from_triplets(n, entries);
}

}  // namespace bcmsdp
