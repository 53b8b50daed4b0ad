#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "alq/mat.hpp"

namespace alq {

// LU with partial pivoting. `singular` is set when a pivot is exactly zero.
template <typename T>
struct Lu {
  BasicMat<T> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;

  explicit Lu(const BasicMat<T>& m) : lu(m), perm(m.rows()) {
    if (!m.square()) fail(ErrorKind::Dimension, "LU of non-square " + m.shape());
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      T best = std::abs(lu(k, k));
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu(i, k)) > best) best = std::abs(lu(i, k)), piv = i;
      if (best == T(0)) {
        singular = true;
        continue;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
        std::swap(perm[k], perm[piv]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const T f = lu(i, k) / lu(k, k);
        lu(i, k) = f;
        if (f == T(0)) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
  }

  T det() const {
    if (singular) return T(0);
    T d = T(sign);
    for (std::size_t i = 0; i < lu.rows(); ++i) d *= lu(i, i);
    return d;
  }

  // Solves m * X = b. Caller must check `singular` first.
  BasicMat<T> solve(const BasicMat<T>& b) const {
    const std::size_t n = lu.rows();
    if (b.rows() != n) fail(ErrorKind::Dimension, "LU solve rhs " + b.shape());
    if (singular) fail(ErrorKind::Singularity, "LU solve on singular matrix");
    BasicMat<T> x(n, b.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(perm[i], j);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        T s = x(i, j);
        for (std::size_t k = 0; k < i; ++k) s -= lu(i, k) * x(k, j);
        x(i, j) = s;
      }
      for (std::size_t i = n; i-- > 0;) {
        T s = x(i, j);
        for (std::size_t k = i + 1; k < n; ++k) s -= lu(i, k) * x(k, j);
        x(i, j) = s / lu(i, i);
      }
    }
    return x;
  }

  BasicMat<T> inverse() const { return solve(BasicMat<T>::identity(lu.rows())); }
};

double det(const Mat& m);
Mat adjugate(const Mat& m);

// adj(m) * x and a * adj(m), evaluated as det(m) * (m^-1 x) and det(m) * (a m^-1)
// when LU sees no zero pivot; explicit adjugate otherwise.
Mat adj_times(const Mat& m, const Mat& x);
Mat times_adj(const Mat& a, const Mat& m);

Mat inverse(const Mat& m);
Mat solve(const Mat& m, const Mat& b);

// 1-norm condition estimate (explicit inverse, long double). +inf when singular.
double condition_number(const Mat& m);

Mat mat_exp_taylor(const Mat& d, double tau, int p);
Mat mat_exp_oracle(const Mat& d, double tau);
MatL mat_exp_oracle_ld(const MatL& d, long double tau);
double taylor_remainder_bound(const Mat& d, double tau, int p);

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
};
Spectrum eigenvalues(const Mat& m);

struct Norms {
  double spectral;
  double frobenius;
};
Norms norms(const Mat& m);
double frobenius_norm(const Mat& m);
double spectral_norm(const Mat& m);

enum class NormKind { Frobenius, Spectral };
double matrix_norm(const Mat& m, NormKind kind);

}  // namespace alq
