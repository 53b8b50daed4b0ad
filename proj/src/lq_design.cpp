#include "alq/lq_design.hpp"

#include <cmath>
#include <sstream>

namespace alq {

namespace {

std::size_t numeric_rank(Mat m) {
  const double tol = 1e-10 * std::max(1.0, m.max_abs());
  std::size_t rank = 0;
  std::vector<bool> used(m.cols(), false);
  for (std::size_t row = 0; row < m.rows() && rank < m.cols(); ++row) {
    // full pivot search over remaining rows/cols
    double best = 0;
    std::size_t pi = 0, pj = 0;
    for (std::size_t i = row; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!used[j] && std::abs(m(i, j)) > best) best = std::abs(m(i, j)), pi = i, pj = j;
    if (best <= tol) break;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(pi, j));
    used[pj] = true;
    ++rank;
    for (std::size_t i = row + 1; i < m.rows(); ++i) {
      const double f = m(i, pj) / m(row, pj);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
  }
  return rank;
}

Mat symmetrized(const Mat& p) { return (p + p.transpose()) * 0.5; }

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Mat r_inverse(const CostWeights& w) {
  if (!w.R.square()) fail(ErrorKind::Weight, "R must be square, got " + w.R.shape());
  Lu<double> lu(w.R);
  if (lu.singular) fail(ErrorKind::Weight, "R is singular");
  return lu.inverse();
}

}  // namespace

bool controllable(const Mat& A, const Mat& B) {
  const std::size_t n = A.rows();
  Mat ctrb = B;
  Mat blk = B;
  for (std::size_t k = 1; k < n; ++k) {
    blk = A * blk;
    ctrb = hstack(ctrb, blk);
  }
  return numeric_rank(ctrb) == n;
}

void validate_weights(const CostWeights& w, std::size_t n, std::size_t m) {
  if (w.Q.rows() != n || w.Q.cols() != n) fail(ErrorKind::Weight, "Q must be " + std::to_string(n) + "x" + std::to_string(n));
  if (w.R.rows() != m || w.R.cols() != m) fail(ErrorKind::Weight, "R must be " + std::to_string(m) + "x" + std::to_string(m));
  for (const Mat* q : {&w.Q, &w.R}) {
    if (!q->all_finite()) fail(ErrorKind::Weight, "weights must be finite");
    if (frobenius_norm(*q - q->transpose()) > 1e-12 * std::max(1.0, q->max_abs()))
      fail(ErrorKind::Weight, "weights must be symmetric");
    for (const auto& ev : eigenvalues(*q).eigenvalues)
      if (ev.real() <= 0) fail(ErrorKind::Weight, "weights must be positive definite");
  }
}

AugmentedSystem augment(const PlantModel& plant, double vartheta) {
  if (vartheta == 0.0 || !std::isfinite(vartheta)) fail(ErrorKind::Parameter, "vartheta must be nonzero and finite");
  const std::size_t np = plant.A_p.rows();
  const std::size_t m = plant.B_p.cols();
  if (np == 0 || m == 0) fail(ErrorKind::Dimension, "empty plant");
  if (!plant.A_p.square()) fail(ErrorKind::Dimension, "A_p must be square, got " + plant.A_p.shape());
  if (plant.B_p.rows() != np) fail(ErrorKind::Dimension, "B_p must have " + std::to_string(np) + " rows");
  if (plant.C_p.rows() != np || plant.C_p.cols() != m)
    fail(ErrorKind::Dimension, "C_p must be " + std::to_string(np) + "x" + std::to_string(m));
  if (!plant.x_p0.empty() && (plant.x_p0.rows() != np || plant.x_p0.cols() != 1))
    fail(ErrorKind::Dimension, "x_p0 must be a length-" + std::to_string(np) + " vector");
  if (!controllable(plant.A_p, plant.B_p)) fail(ErrorKind::Controllability, "(A_p, B_p) is not controllable");

  Mat blk(np + m, np + m);
  blk.set_block(0, 0, plant.A_p);
  blk.set_block(0, np, plant.B_p);
  blk.set_block(np, 0, plant.C_p.transpose());
  if (numeric_rank(blk) != np + m)
    fail(ErrorKind::Controllability, "[[A_p, B_p], [C_p^T, 0]] is singular; the integral augmentation is not controllable");

  AugmentedSystem s;
  s.n_p = np;
  s.m = m;
  s.n = np + m;
  s.vartheta = vartheta;
  s.A = Mat(s.n, s.n);
  s.A.set_block(0, 0, plant.A_p);
  s.A.set_block(np, 0, plant.C_p.transpose() * vartheta);
  s.B = Mat(s.n, m);
  s.B.set_block(0, 0, plant.B_p);
  s.B_r = Mat(s.n, m);
  s.B_r.set_block(np, 0, Mat::identity(m) * vartheta);
  s.C = Mat(s.n, m);
  s.C.set_block(0, 0, plant.C_p);
  return s;
}

Mat build_hamiltonian(const AugmentedSystem& sys, const CostWeights& w) {
  const Mat Ri = r_inverse(w);
  const std::size_t n = sys.n;
  if (w.Q.rows() != n || w.Q.cols() != n) fail(ErrorKind::Weight, "Q must be " + std::to_string(n) + "x" + std::to_string(n));
  Mat D(2 * n, 2 * n);
  D.set_block(0, 0, -sys.A);
  D.set_block(0, n, sys.B * Ri * sys.B.transpose());
  D.set_block(n, 0, w.Q);
  D.set_block(n, n, sys.A.transpose());
  return D;
}

Mat are_residual(const AugmentedSystem& sys, const CostWeights& w, const Mat& P) {
  const Mat S = sys.B * r_inverse(w) * sys.B.transpose();
  return sys.A.transpose() * P + P * sys.A - P * S * P + w.Q;
}

LqSolution gains_from_p(const AugmentedSystem& sys, const CostWeights& w, const Mat& P) {
  const Mat Ri = r_inverse(w);
  const Mat acl_t = sys.A.transpose() - P * sys.B * Ri * sys.B.transpose();
  LqSolution s;
  s.P = P;
  s.V = solve(acl_t, P * sys.B_r);
  s.K_x = -(Ri * sys.B.transpose() * P);
  s.K_r = -(Ri * sys.B.transpose() * s.V);
  s.theta = hstack(s.K_x, s.K_r).transpose();
  return s;
}

LqSolution solve_lq_analytical(const AugmentedSystem& sys, const CostWeights& w, double tau_inf,
                               double cond_limit) {
  if (!(tau_inf > 0.0) || !std::isfinite(tau_inf)) fail(ErrorKind::Parameter, "tau_inf must be positive and finite");
  const std::size_t n = sys.n;
  const Mat D = build_hamiltonian(sys, w);
  const MatL phi = mat_exp_oracle_ld(MatL::cast(D), tau_inf);
  const MatL phi11 = phi.block(0, 0, n, n);
  const MatL phi21 = phi.block(n, 0, n, n);

  const double c11 = condition_number(Mat::cast(phi11));
  if (!(c11 <= cond_limit))
    fail(ErrorKind::Singularity, "Phi_11(tau_inf=" + sci(tau_inf) + ") is numerically singular (cond ~" + sci(c11) +
                                     " > " + sci(cond_limit) +
                                     "); the Hamiltonian eigenvalues are too widely separated for this horizon, use a smaller tau_inf");
  Lu<long double> lu(phi11);
  const Mat P = symmetrized(Mat::cast(MatL(phi21 * lu.inverse())));
  require_finite(P, "Riccati solution P");

  const Mat acl_t = sys.A.transpose() - P * sys.B * r_inverse(w) * sys.B.transpose();
  const double c2 = condition_number(acl_t);
  if (!(c2 <= cond_limit))
    fail(ErrorKind::Singularity, "A^T - P B R^-1 B^T is numerically singular (cond ~" + sci(c2) + ")");

  LqSolution s = gains_from_p(sys, w, P);
  s.tau_inf = tau_inf;
  return s;
}

RiccatiTrajectory integrate_riccati_differential(const AugmentedSystem& sys, const CostWeights& w,
                                                 double horizon, double step, std::size_t sample_every) {
  if (!(horizon > 0.0) || !(step > 0.0) || step > horizon)
    fail(ErrorKind::Parameter, "need 0 < step <= horizon");
  if (sample_every == 0) sample_every = 1;
  const std::size_t n = sys.n, m = sys.m;
  const Mat S = sys.B * r_inverse(w) * sys.B.transpose();
  const Mat At = sys.A.transpose();

  auto dP = [&](const Mat& P) { return At * P + P * sys.A - P * S * P + w.Q; };
  auto dV = [&](const Mat& P, const Mat& V) { return (At - P * S) * V - P * sys.B_r; };

  RiccatiTrajectory tr;
  Mat P(n, n), V(n, m);
  double tau = 0.0;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  for (std::size_t k = 0;; ++k) {
    const Mat k1p = dP(P), k1v = dV(P, V);
    if (k % sample_every == 0) {
      tr.tau.push_back(tau);
      tr.P.push_back(P);
      tr.V.push_back(V);
    }
    if (frobenius_norm(k1p) <= 1e-10 && frobenius_norm(k1v) <= 1e-10) {
      tr.settled = true;
      break;
    }
    if (k >= steps) break;
    const double h = step;
    const Mat P2 = P + k1p * (h / 2), V2 = V + k1v * (h / 2);
    const Mat k2p = dP(P2), k2v = dV(P2, V2);
    const Mat P3 = P + k2p * (h / 2), V3 = V + k2v * (h / 2);
    const Mat k3p = dP(P3), k3v = dV(P3, V3);
    const Mat P4 = P + k3p * h, V4 = V + k3v * h;
    const Mat k4p = dP(P4), k4v = dV(P4, V4);
    P += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6);
    V += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6);
    tau += h;
    if (!P.all_finite() || !V.all_finite() || frobenius_norm(P) > 1e12)
      fail(ErrorKind::Instability, "differential Riccati solution diverged at tau=" + sci(tau));
  }
  if (tr.tau.empty() || tr.tau.back() != tau) {
    tr.tau.push_back(tau);
    tr.P.push_back(P);
    tr.V.push_back(V);
  }
  tr.tau_end = tau;
  tr.P_final = P;
  tr.V_final = V;
  return tr;
}

Mat reference_model_step(const LqSolution& sol, const AugmentedSystem& sys, const Mat& x_ref,
                         const Mat& r, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::Step, "dt must be positive");
  const Mat u = sol.theta.transpose() * vstack(x_ref, r);
  return x_ref + (sys.A * x_ref + sys.B * u - sys.B_r * r) * dt;
}

double evaluate_cost(const std::vector<Mat>& x, const std::vector<Mat>& u, const CostWeights& w,
                     double dt, const Mat* terminal_P) {
  if (x.size() != u.size())
    fail(ErrorKind::Trace, "state and control traces differ in length (" + std::to_string(x.size()) + " vs " +
                               std::to_string(u.size()) + ")");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Step, "cost step must be positive and finite");
  auto stage = [&](std::size_t k) {
    const double xq = (x[k].transpose() * w.Q * x[k])(0, 0);
    const double ur = (u[k].transpose() * w.R * u[k])(0, 0);
    return 0.5 * (xq + ur);
  };
  double J = 0.0;
  if (!x.empty()) {
    double prev = stage(0);
    for (std::size_t k = 1; k < x.size(); ++k) {
      const double cur = stage(k);
      J += 0.5 * dt * (prev + cur);
      prev = cur;
    }
    if (terminal_P) J += 0.5 * (x.back().transpose() * (*terminal_P) * x.back())(0, 0);
  }
  return J;
}

double cost_gap(const std::vector<Mat>& x_adaptive, const std::vector<Mat>& u_adaptive,
                const std::vector<Mat>& x_ideal, const std::vector<Mat>& u_ideal,
                const CostWeights& w, double dt) {
  if (x_adaptive.size() != x_ideal.size())
    fail(ErrorKind::Trace, "adaptive and ideal traces are on different grids");
  return evaluate_cost(x_adaptive, u_adaptive, w, dt) - evaluate_cost(x_ideal, u_ideal, w, dt);
}

}  // namespace alq
