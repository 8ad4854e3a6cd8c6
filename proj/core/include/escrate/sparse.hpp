#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace escrate {

/// Compressed sparse row matrix of nonnegative doubles.
class SparseMatrix {
 public:
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  SparseMatrix() = default;
  /// Entries need not be sorted; duplicates are summed.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  double at(std::size_t r, std::size_t c) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  SparseMatrix transpose() const;
  /// Copy keeping only entries whose column is not flagged.
  SparseMatrix without_columns(const std::vector<bool>& drop) const;
  /// Principal submatrix on `keep` (in the given order).
  SparseMatrix principal(const std::vector<std::uint32_t>& keep) const;
  std::vector<std::vector<double>> to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

/// Strongly connected components of the directed graph with an edge
/// i -> j for every nonzero A(i, j).
struct ComponentDecomposition {
  std::vector<std::uint32_t> component_of;
  std::vector<std::vector<std::uint32_t>> members;
};

ComponentDecomposition strongly_connected_components(const SparseMatrix& a);

/// Period (gcd of cycle lengths) of the subgraph induced by `members`,
/// assumed strongly connected. Returns 0 for a single vertex without a loop.
std::size_t component_period(const SparseMatrix& a, const std::vector<std::uint32_t>& members,
                             const std::vector<std::uint32_t>& component_of, std::uint32_t id);

}  // namespace escrate
