// SPDX-License-Identifier: Apache-2.0

#include "mcad/numkit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcad/error.hpp"
#include "mcad/simd/kernels.hpp"

namespace mcad::nk {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_shape(data_.size() == rows_ * cols_, "Tensor2 data length");
}

Tensor2::Tensor2(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require_shape(r.size() == cols_, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void Tensor2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor2::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_shape(bool ok, std::string_view what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, std::string(what));
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  require_shape(a.cols() == b.rows(), "matmul inner dimension");
  Tensor2 c(a.rows(), b.cols());
  const auto& k = simd::active();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double s = a(i, p);
      if (s != 0.0) k.axpy(s, b.row(p).data(), out, b.cols());
    }
  }
  return c;
}

Tensor2 matmul_bt(const Tensor2& a, const Tensor2& b) {
  require_shape(a.cols() == b.cols(), "matmul_bt inner dimension");
  Tensor2 c(a.rows(), b.rows());
  const auto& k = simd::active();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      c(i, j) = k.dot(a.row(i).data(), b.row(j).data(), a.cols());
    }
  }
  return c;
}

void matmul_at_acc(const Tensor2& a, const Tensor2& b, Tensor2& c) {
  require_shape(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols(),
                "matmul_at_acc shapes");
  const auto& k = simd::active();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* brow = b.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double s = a(i, p);
      if (s != 0.0) k.axpy(s, brow, c.row(p).data(), b.cols());
    }
  }
}

Tensor2 hconcat(std::span<const Tensor2* const> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front()->rows();
  std::size_t cols = 0;
  for (const Tensor2* b : blocks) {
    require_shape(b->rows() == rows, "hconcat row count");
    cols += b->cols();
  }
  Tensor2 out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.row(r).data();
    for (const Tensor2* b : blocks) {
      auto src = b->row(r);
      std::copy(src.begin(), src.end(), dst);
      dst += src.size();
    }
  }
  return out;
}

Tensor2 column_slice(const Tensor2& x, std::size_t begin, std::size_t count) {
  require_shape(begin + count <= x.cols(), "column_slice range");
  Tensor2 out(x.rows(), count);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r).subspan(begin, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Tensor2 transpose(const Tensor2& x) {
  Tensor2 out(x.cols(), x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(c, r) = x(r, c);
  return out;
}

std::vector<double> column_mean(const Tensor2& x) {
  std::vector<double> mean(x.cols(), 0.0);
  if (x.rows() == 0) return mean;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    simd::axpy(1.0, x.row(r), mean);
  }
  simd::scale(1.0 / static_cast<double>(x.rows()), mean);
  return mean;
}

}  // namespace mcad::nk
