#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bcmsdp/types.hpp"

namespace bcmsdp {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Cost matrix of max <A, X> s.t. diag(X) = 1, X psd.
///
/// Stored symmetric with an identically zero diagonal; the diagonal of the
/// original matrix only shifts the objective and is kept as `trace_offset`.
/// Rows are compressed with sorted column indices and no explicit zeros.
/// Immutable after construction.
class ProblemInstance {
 public:
  ProblemInstance() = default;

  /// Builds from raw entries (duplicates summed), applying (M + M^T)/2 and
  /// moving the diagonal into the trace offset.
  static ProblemInstance from_triplets(Index n, const std::vector<Triplet>& raw);

  Index n() const noexcept { return n_; }
  const SparseMatrix& matrix() const noexcept { return A_; }
  std::int64_t nnz() const noexcept { return A_.nonZeros(); }

  double trace_offset() const noexcept { return trace_offset_; }
  /// max_j sum_i |A_ij|
  double one_norm() const noexcept { return one_norm_; }
  /// sum_ij |A_ij|
  double l11_norm() const noexcept { return l11_norm_; }
  bool is_zero() const noexcept { return nnz() == 0; }

  Matrix dense() const;
  double entry(Index i, Index j) const;

  /// FNV-1a over the dimension and the stored entries.
  std::uint64_t checksum() const;

 private:
  Index n_ = 0;
  SparseMatrix A_;
  double trace_offset_ = 0.0;
  double one_norm_ = 0.0;
  double l11_norm_ = 0.0;
};

ProblemInstance preprocess(const Matrix& raw);

/// A = (G + G^T)/n with G_ij ~ N(0,1), diagonal moved to the trace offset.
ProblemInstance gen_gaussian(Index n, std::uint64_t seed);

/// Uniform simple graph with exactly `edges` edges, every edge weighted
/// `sign` (+1 adjacency, -1 Max-Cut orientation).
ProblemInstance gen_erdos_renyi(Index n, std::int64_t edges, int sign,
                                std::uint64_t seed);

enum class InstanceFormat { MatrixMarket, EdgeList };

ProblemInstance load_instance(const std::filesystem::path& path,
                              InstanceFormat format);
ProblemInstance parse_instance(std::istream& in, InstanceFormat format,
                               const std::string& source = "<stream>");

/// Symmetric coordinate Matrix Market (lower triangle). The trace offset is
/// spread evenly over the diagonal so that reloading reproduces it.
void write_matrix_market(std::ostream& out, const ProblemInstance& instance);

}  // namespace bcmsdp
