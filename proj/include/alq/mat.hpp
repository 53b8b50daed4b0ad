#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "alq/errors.hpp"

namespace alq {

// Dense row-major matrix. Vectors are n x 1 matrices.
template <typename T>
class BasicMat {
 public:
  BasicMat() = default;
  BasicMat(std::size_t rows, std::size_t cols, T fill = T(0))
      : r_(rows), c_(cols), a_(rows * cols, fill) {}
  BasicMat(std::size_t rows, std::size_t cols, std::vector<T> data)
      : r_(rows), c_(cols), a_(std::move(data)) {
    if (a_.size() != r_ * c_) fail(ErrorKind::Dimension, "entry count does not match shape");
    for (const T& v : a_)
      if (!std::isfinite(static_cast<double>(v)))
        fail(ErrorKind::Numeric, "non-finite entry in matrix construction");
  }
  BasicMat(std::initializer_list<std::initializer_list<T>> rows) {
    r_ = rows.size();
    c_ = r_ ? rows.begin()->size() : 0;
    a_.reserve(r_ * c_);
    for (const auto& row : rows) {
      if (row.size() != c_) fail(ErrorKind::Dimension, "ragged initializer");
      for (const T& v : row) {
        if (!std::isfinite(static_cast<double>(v)))
          fail(ErrorKind::Numeric, "non-finite entry in matrix construction");
        a_.push_back(v);
      }
    }
  }

  static BasicMat zeros(std::size_t r, std::size_t c) { return BasicMat(r, c); }
  static BasicMat identity(std::size_t n) {
    BasicMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static BasicMat column(const std::vector<T>& v) { return BasicMat(v.size(), 1, v); }

  template <typename U>
  static BasicMat cast(const BasicMat<U>& o) {
    BasicMat m(o.rows(), o.cols());
    for (std::size_t i = 0; i < o.size(); ++i) m.data()[i] = static_cast<T>(o.data()[i]);
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  std::size_t size() const { return a_.size(); }
  bool square() const { return r_ == c_; }
  bool empty() const { return a_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  T& operator[](std::size_t i) { return a_[i]; }
  const T& operator[](std::size_t i) const { return a_[i]; }
  T* data() { return a_.data(); }
  const T* data() const { return a_.data(); }
  const std::vector<T>& values() const { return a_; }

  BasicMat transpose() const {
    BasicMat t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  BasicMat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > r_ || c0 + nc > c_) fail(ErrorKind::Dimension, "block out of range");
    BasicMat b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const BasicMat& b) {
    if (r0 + b.r_ > r_ || c0 + b.c_ > c_) fail(ErrorKind::Dimension, "set_block out of range");
    for (std::size_t i = 0; i < b.r_; ++i)
      for (std::size_t j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  bool all_finite() const {
    for (const T& v : a_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  T max_abs() const {
    T m = 0;
    for (const T& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  BasicMat& operator+=(const BasicMat& o) {
    same_shape(o, "+=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  BasicMat& operator-=(const BasicMat& o) {
    same_shape(o, "-=");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  BasicMat& operator*=(T s) {
    for (T& v : a_) v *= s;
    return *this;
  }

  friend BasicMat operator+(BasicMat a, const BasicMat& b) { return a += b; }
  friend BasicMat operator-(BasicMat a, const BasicMat& b) { return a -= b; }
  friend BasicMat operator-(BasicMat a) { return a *= T(-1); }
  friend BasicMat operator*(BasicMat a, T s) { return a *= s; }
  friend BasicMat operator*(T s, BasicMat a) { return a *= s; }
  friend BasicMat operator/(BasicMat a, T s) {
    for (T& v : a.a_) v /= s;
    return a;
  }

  friend BasicMat operator*(const BasicMat& a, const BasicMat& b) {
    if (a.c_ != b.r_)
      fail(ErrorKind::Dimension, "matmul " + a.shape() + " * " + b.shape());
    BasicMat p(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const T aik = a(i, k);
        if (aik == T(0)) continue;
        const T* brow = &b.a_[k * b.c_];
        T* prow = &p.a_[i * p.c_];
        for (std::size_t j = 0; j < b.c_; ++j) prow[j] += aik * brow[j];
      }
    return p;
  }

  bool operator==(const BasicMat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

  std::string shape() const { return std::to_string(r_) + "x" + std::to_string(c_); }

 private:
  void same_shape(const BasicMat& o, const char* op) const {
    if (r_ != o.r_ || c_ != o.c_)
      fail(ErrorKind::Dimension, std::string(op) + " shape mismatch " + shape() + " vs " + o.shape());
  }

  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using Mat = BasicMat<double>;
using MatL = BasicMat<long double>;

Mat vstack(const Mat& top, const Mat& bottom);
Mat hstack(const Mat& left, const Mat& right);

// Throws Overflow naming `what` if any entry is NaN/Inf.
void require_finite(const Mat& m, const std::string& what);

}  // namespace alq
