#pragma once

#include <vector>

#include "alq/mat_core.hpp"

namespace alq {

struct PlantModel {
  Mat A_p;   // n_p x n_p
  Mat B_p;   // n_p x m
  Mat C_p;   // n_p x m, z = C_p^T x_p
  Mat x_p0;  // n_p x 1
  bool operator==(const PlantModel&) const = default;
};

struct AugmentedSystem {
  Mat A, B, B_r, C;
  double vartheta = 1.0;
  std::size_t n_p = 0, m = 0, n = 0;
};

struct CostWeights {
  Mat Q;
  Mat R;
  bool operator==(const CostWeights&) const = default;
};

struct LqSolution {
  Mat P, V, K_x, K_r;
  Mat theta;  // (n+m) x m, theta^T = [K_x K_r]
  double tau_inf = 0.0;
};

inline constexpr double kSingularityLimit = 1e15;

AugmentedSystem augment(const PlantModel& plant, double vartheta);
bool controllable(const Mat& A, const Mat& B);
void validate_weights(const CostWeights& w, std::size_t n, std::size_t m);

Mat build_hamiltonian(const AugmentedSystem& sys, const CostWeights& w);

LqSolution solve_lq_analytical(const AugmentedSystem& sys, const CostWeights& w, double tau_inf,
                               double cond_limit = kSingularityLimit);

// Gains implied by a given Riccati matrix P.
LqSolution gains_from_p(const AugmentedSystem& sys, const CostWeights& w, const Mat& P);

Mat are_residual(const AugmentedSystem& sys, const CostWeights& w, const Mat& P);

struct RiccatiTrajectory {
  std::vector<double> tau;
  std::vector<Mat> P;
  std::vector<Mat> V;
  bool settled = false;
  double tau_end = 0.0;
  Mat P_final, V_final;
};

// RK4 in the steady-state-seeking direction from P(0) = 0, V(0) = 0.
// Stops when |dP/dtau|_F and |dV/dtau|_F are both <= 1e-10 or at `horizon`.
RiccatiTrajectory integrate_riccati_differential(const AugmentedSystem& sys, const CostWeights& w,
                                                 double horizon, double step,
                                                 std::size_t sample_every = 100);

// Euler step of x_ref' = (A + B K_x) x_ref + (B K_r - B_r) r.
Mat reference_model_step(const LqSolution& sol, const AugmentedSystem& sys, const Mat& x_ref,
                         const Mat& r, double dt);

// Trapezoidal 1/2 int x'Qx + u'Ru dt, plus 1/2 x_f' P x_f when terminal_P is given.
double evaluate_cost(const std::vector<Mat>& x, const std::vector<Mat>& u, const CostWeights& w,
                     double dt, const Mat* terminal_P = nullptr);

double cost_gap(const std::vector<Mat>& x_adaptive, const std::vector<Mat>& u_adaptive,
                const std::vector<Mat>& x_ideal, const std::vector<Mat>& u_ideal,
                const CostWeights& w, double dt);

}  // namespace alq
