#include "alq/mat_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace alq {

namespace {

void require_square(const Mat& m, const char* op) {
  if (!m.square()) fail(ErrorKind::Dimension, std::string(op) + " needs a square matrix, got " + m.shape());
}

double det_small(const Mat& m) {
  switch (m.rows()) {
    case 0: return 1.0;
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    default:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
}

Mat minor_of(const Mat& m, std::size_t row, std::size_t col) {
  const std::size_t n = m.rows();
  Mat s(n - 1, n - 1);
  for (std::size_t i = 0, si = 0; i < n; ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, sj = 0; j < n; ++j) {
      if (j == col) continue;
      s(si, sj++) = m(i, j);
    }
    ++si;
  }
  return s;
}

double norm1(const MatL& m) {
  long double best = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    long double s = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return static_cast<double>(best);
}

}  // namespace

double det(const Mat& m) {
  require_square(m, "det");
  if (m.rows() <= 3) return det_small(m);
  return Lu<double>(m).det();
}

Mat adjugate(const Mat& m) {
  require_square(m, "adjugate");
  const std::size_t n = m.rows();
  Mat adj(n, n);
  if (n == 0) return adj;
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  if (n <= 4) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double c = det(minor_of(m, i, j));
        adj(j, i) = ((i + j) % 2 == 0) ? c : -c;
      }
    return adj;
  }
  // adj(m)(i, j) = det(m with column i replaced by e_j)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Mat r = m;
      for (std::size_t k = 0; k < n; ++k) r(k, i) = (k == j) ? 1.0 : 0.0;
      adj(i, j) = Lu<double>(r).det();
    }
  return adj;
}

Mat adj_times(const Mat& m, const Mat& x) {
  require_square(m, "adj_times");
  if (x.rows() != m.rows()) fail(ErrorKind::Dimension, "adj_times rhs " + x.shape());
  Lu<double> lu(m);
  if (lu.singular) return adjugate(m) * x;
  return lu.det() * lu.solve(x);
}

Mat times_adj(const Mat& a, const Mat& m) {
  return adj_times(m.transpose(), a.transpose()).transpose();
}

Mat inverse(const Mat& m) {
  require_square(m, "inverse");
  Lu<double> lu(m);
  if (lu.singular) fail(ErrorKind::Singularity, "inverse of singular " + m.shape() + " matrix");
  return lu.inverse();
}

Mat solve(const Mat& m, const Mat& b) {
  require_square(m, "solve");
  Lu<double> lu(m);
  if (lu.singular) fail(ErrorKind::Singularity, "solve with singular " + m.shape() + " matrix");
  return lu.solve(b);
}

double condition_number(const Mat& m) {
  require_square(m, "condition_number");
  MatL ml = MatL::cast(m);
  Lu<long double> lu(ml);
  if (lu.singular) return std::numeric_limits<double>::infinity();
  return norm1(ml) * norm1(lu.inverse());
}

Mat mat_exp_taylor(const Mat& d, double tau, int p) {
  require_square(d, "mat_exp_taylor");
  if (p < 0) fail(ErrorKind::Parameter, "Taylor degree must be >= 0");
  if (!std::isfinite(tau)) fail(ErrorKind::Parameter, "tau must be finite");
  const std::size_t n = d.rows();
  const Mat dt = d * tau;
  Mat term = Mat::identity(n);
  Mat sum = term;
  for (int k = 0; k < p; ++k) {
    term = term * dt;
    term *= 1.0 / static_cast<double>(k + 1);
    sum += term;
    if (!term.all_finite() || !sum.all_finite())
      fail(ErrorKind::Overflow, "Taylor term k=" + std::to_string(k + 1) + " is not finite");
  }
  return sum;
}

MatL mat_exp_oracle_ld(const MatL& d, long double tau) {
  if (!d.square()) fail(ErrorKind::Dimension, "mat_exp_oracle needs a square matrix, got " + d.shape());
  const std::size_t n = d.rows();
  MatL a = d * tau;
  long double fro = 0;
  for (std::size_t i = 0; i < a.size(); ++i) fro += a[i] * a[i];
  fro = std::sqrt(fro);
  if (!std::isfinite(static_cast<double>(fro))) fail(ErrorKind::Overflow, "mat_exp_oracle input not finite");
  int s = 0;
  while (fro > 0.5L) {
    fro *= 0.5L;
    ++s;
  }
  a *= std::ldexp(1.0L, -s);
  MatL term = MatL::identity(n);
  MatL sum = term;
  for (int k = 0; k < 30; ++k) {
    term = term * a;
    term *= 1.0L / static_cast<long double>(k + 1);
    sum += term;
  }
  for (int i = 0; i < s; ++i) {
    sum = sum * sum;
    if (!sum.all_finite())
      fail(ErrorKind::Overflow, "mat_exp_oracle squaring step " + std::to_string(i + 1) + " is not finite");
  }
  return sum;
}

Mat mat_exp_oracle(const Mat& d, double tau) {
  require_square(d, "mat_exp_oracle");
  Mat e = Mat::cast(mat_exp_oracle_ld(MatL::cast(d), tau));
  require_finite(e, "mat_exp_oracle result");
  return e;
}

double taylor_remainder_bound(const Mat& d, double tau, int p) {
  require_square(d, "taylor_remainder_bound");
  if (p < 0) fail(ErrorKind::Parameter, "Taylor degree must be >= 0");
  const double a = frobenius_norm(d) * std::abs(tau);
  if (a == 0.0) return 0.0;
  const double log_em1 = a < 30.0 ? std::log(std::expm1(a)) : a + std::log1p(-std::exp(-a));
  const double lg = static_cast<double>(p) * std::log(a) + log_em1 - std::lgamma(static_cast<double>(p) + 2.0);
  return std::exp(lg);
}

Spectrum eigenvalues(const Mat& m) {
  require_square(m, "eigenvalues");
  const std::size_t n = m.rows();
  Eigen::MatrixXd e(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e(i, j) = m(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(e, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigenvalue iteration did not converge");
  Spectrum s;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s.eigenvalues.push_back(es.eigenvalues()[i]);
  return s;
}

double frobenius_norm(const Mat& m) {
  double s = 0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * m[i];
  return std::sqrt(s);
}

double spectral_norm(const Mat& m) {
  if (m.empty()) return 0.0;
  const Mat g = m.transpose() * m;
  const std::size_t n = g.rows();
  Mat v(n, 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  v *= 1.0 / frobenius_norm(v);
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Mat w = g * v;
    const double nw = frobenius_norm(w);
    if (nw == 0.0) return 0.0;
    const bool done = std::abs(nw - lambda) <= 1e-10 * nw;
    lambda = nw;
    v = w * (1.0 / nw);
    if (done) break;
  }
  return std::sqrt(lambda);
}

Norms norms(const Mat& m) { return {spectral_norm(m), frobenius_norm(m)}; }

double matrix_norm(const Mat& m, NormKind kind) {
  return kind == NormKind::Frobenius ? frobenius_norm(m) : spectral_norm(m);
}

}  // namespace alq
