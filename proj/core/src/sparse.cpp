#include "escrate/sparse.hpp"

#include <algorithm>

#include "escrate/errors.hpp"

namespace escrate {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(rows + 1, 0);
  col_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.row >= rows || e.col >= cols) raise(ErrorCode::InvalidInput, "sparse entry out of range");
    if (!col_idx_.empty() && i > 0 && entries[i - 1].row == e.row && entries[i - 1].col == e.col) {
      values_.back() += e.value;
      continue;
    }
    col_idx_.push_back(e.col);
    values_.push_back(e.value);
    ++row_ptr_[e.row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(c));
  if (it == cols.end() || *it != c) return 0.0;
  return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
    y[r] = acc;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * xr;
  }
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Entry> entries;
  entries.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      entries.push_back({col_idx_[k], static_cast<std::uint32_t>(r), values_[k]});
  return SparseMatrix(cols_, rows_, std::move(entries));
}

SparseMatrix SparseMatrix::without_columns(const std::vector<bool>& drop) const {
  std::vector<Entry> entries;
  entries.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (!drop[col_idx_[k]]) entries.push_back({static_cast<std::uint32_t>(r), col_idx_[k], values_[k]});
  return SparseMatrix(rows_, cols_, std::move(entries));
}

SparseMatrix SparseMatrix::principal(const std::vector<std::uint32_t>& keep) const {
  std::vector<std::int64_t> position(cols_, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) position[keep[i]] = static_cast<std::int64_t>(i);
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto r = keep[i];
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      auto p = position[col_idx_[k]];
      if (p >= 0) entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(p), values_[k]});
    }
  }
  return SparseMatrix(keep.size(), keep.size(), std::move(entries));
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_, 0.0));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out[r][col_idx_[k]] = values_[k];
  return out;
}
}  // namespace escrate
