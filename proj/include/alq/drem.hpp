#pragma once

#include <vector>

#include "alq/lq_design.hpp"

namespace alq {

struct PipelineParams {
  double l = 2.5;
  double k0 = 10.0;
  double k1 = 1.8e35;
  double sigma = 5.0 / 7.0;
  int p = 35;
  double tau_inf = 7.0;
  double t_start = 0.0;
  // Optional (y_theta, Delta) -> (c y_theta, c Delta). Changes the units of Omega, so rho must follow by c^2.
  double pair_scale = 1.0;
  bool operator==(const PipelineParams&) const = default;
};

void validate(const PipelineParams& p);

struct FilterState {
  Mat psi_bar;      // (n+m) x 1
  Mat r_bar;        // m x 1
  double exp_term;  // e^{-l (t - t_start)} realized on the Euler grid
  Mat zbar_f;       // (n+m+1) x n
  Mat phibar_f;     // (n+m+1) x (n+m+1)
  double omega_acc = 0.0;
  Mat upsilon_acc;  // (n+m) x m
  Mat x0_snapshot;  // n x 1
  double t_start = 0.0;
  double t_now = 0.0;
};

FilterState make_filter_state(std::size_t n, std::size_t m, const Mat& x0, double t_start);

struct FilterOutput {
  Mat zbar;    // n x 1
  Mat phibar;  // (n+m+1) x 1
};

// Returns zbar, phibar for the current memories, then advances them by dt.
FilterOutput filter_step(FilterState& fs, const Mat& x, const Mat& u, const Mat& r,
                         const AugmentedSystem& sys, const PipelineParams& params, double dt);

struct MixOutput {
  double phi = 0.0;
  Mat z;  // (n+m+1) x n
};

MixOutput drem_mix(FilterState& fs, const FilterOutput& in, const PipelineParams& params, double dt);

struct ZaZb {
  Mat z_A;  // n x n
  Mat z_B;  // n x m
};
ZaZb extract_zA_zB(const Mat& z, std::size_t n, std::size_t m);

Mat build_zD(const Mat& z_A, const Mat& z_B, double phi, const CostWeights& w);

struct ZPhi {
  Mat z_Phi11;
  Mat z_Phi21;
};
ZPhi build_zPhi(const Mat& z_D, double phi, const PipelineParams& params);

struct ThetaRegression {
  double delta = 0.0;
  Mat y_theta;  // (n+m) x m
  double delta_Kx = 0.0;
  double delta_Kr = 0.0;
  double phi = 0.0;
};

ThetaRegression parameterize_theta(const Mat& z_A, const Mat& z_B, const Mat& z_Phi11, const Mat& z_Phi21,
                                   double phi, const AugmentedSystem& sys, const CostWeights& w,
                                   double pair_scale = 1.0);

void averaging_step(FilterState& fs, const ThetaRegression& reg, const PipelineParams& params, double dt);

double excitation_metric(const std::vector<double>& delta_history, double dt);

Mat residual_oracle(const ThetaRegression& reg, const Mat& theta_true);

void reset_filters(FilterState& fs, const Mat& x_now, double t_now);

// One full tick of the pipeline: filter, mix, Phi-chain, parameterization, averaging.
ThetaRegression pipeline_tick(FilterState& fs, const Mat& x, const Mat& u, const Mat& r,
                              const AugmentedSystem& sys, const CostWeights& w,
                              const PipelineParams& params, double dt);

}  // namespace alq
