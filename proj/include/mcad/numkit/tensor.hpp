// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace mcad::nk {

// Dense row-major matrix of doubles.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data);
  Tensor2(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws ShapeMismatch with `what` as context when the condition fails.
void require_shape(bool ok, std::string_view what);

// C = A * B            (n x k) * (k x m)
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
// C = A * B^T          (n x k) * (m x k)^T
Tensor2 matmul_bt(const Tensor2& a, const Tensor2& b);
// C += A^T * B         (n x k)^T * (n x m), accumulated into c (k x m)
void matmul_at_acc(const Tensor2& a, const Tensor2& b, Tensor2& c);

// Column-wise concatenation of row-aligned blocks.
Tensor2 hconcat(std::span<const Tensor2* const> blocks);
// Copy of columns [begin, begin + count).
Tensor2 column_slice(const Tensor2& x, std::size_t begin, std::size_t count);
Tensor2 transpose(const Tensor2& x);
std::vector<double> column_mean(const Tensor2& x);

}  // namespace mcad::nk
