#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dosp/kernels.hpp"

namespace dosp {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels::active().dot(a.size(), a.data(), b.data());
}

inline double norm2(std::span<const double> a) {
  return std::sqrt(kernels::active().nrm2sq(a.size(), a.data()));
}

inline double norm1(std::span<const double> a) {
  return kernels::active().nrm1(a.size(), a.data());
}

inline double norm_inf(std::span<const double> a) {
  return kernels::active().amax(a.size(), a.data());
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(kernels::active().diff_nrm2sq(a.size(), a.data(), b.data()));
}

inline double dist1(std::span<const double> a, std::span<const double> b) {
  return kernels::active().diff_nrm1(a.size(), a.data(), b.data());
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Dense row-major matrix; small sizes only (agent counts, decision dims).
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {a_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {a_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  // out = M * v
  void apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != cols_ || out.size() != rows_)
      throw std::invalid_argument("Mat::apply: dimension mismatch");
    for (std::size_t r = 0; r < rows_; ++r)
      out[r] = kernels::active().dot(cols_, a_.data() + r * cols_, v.data());
  }

  Vec apply(std::span<const double> v) const {
    Vec out(rows_, 0.0);
    apply(v, out);
    return out;
  }

  friend Mat operator*(const Mat& lhs, const Mat& rhs) {
    if (lhs.cols_ != rhs.rows_)
      throw std::invalid_argument("Mat multiply: dimension mismatch");
    Mat out(lhs.rows_, rhs.cols_);
    // fixed accumulation order to keep products reproducible
    for (std::size_t i = 0; i < lhs.rows_; ++i)
      for (std::size_t k = 0; k < lhs.cols_; ++k) {
        double v = lhs(i, k);
        if (v == 0.0) continue;
        kernels::active().axpy(rhs.cols_, v, rhs.a_.data() + k * rhs.cols_,
                               out.a_.data() + i * out.cols_);
      }
    return out;
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

// Largest singular value by power iteration on M^T M.
double operator_norm2(const Mat& m);

}  // namespace dosp
