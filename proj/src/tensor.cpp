#include "elmdetect/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "elmdetect/error.hpp"

namespace elmdetect::nn {

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)),
      values_(std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>()),
              fill) {}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values) {
  Tensor t(std::move(shape));
  if (t.values_.size() != values.size()) {
    throw Error(ErrorCode::kShapeMismatch, "shape " + t.shape_string() + " needs " +
                                               std::to_string(t.values_.size()) + " values, got " +
                                               std::to_string(values.size()));
  }
  t.values_ = std::move(values);
  return t;
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t stride = shape_.empty() ? 0 : values_.size() / shape_[0];
  return std::span<double>(values_).subspan(r * stride, stride);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t stride = shape_.empty() ? 0 : values_.size() / shape_[0];
  return std::span<const double>(values_).subspan(r * stride, stride);
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape_[i]);
  }
  return out + ")";
}

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace elmdetect::nn
