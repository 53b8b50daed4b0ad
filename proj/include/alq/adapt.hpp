#pragma once

#include "alq/mat.hpp"

namespace alq {

struct ControllerState {
  Mat theta_hat;  // (n+m) x m
};

struct AdaptGains {
  double gamma0 = 1.0;
  double gamma1 = 1.0;
  double rho = 1e35;
  bool operator==(const AdaptGains&) const = default;
};

void validate(const AdaptGains& g);

// gamma0 |omega|^2 + gamma1 when Omega > rho, else 0.
double adaptation_rate(double omega_acc, const Mat& omega_vec, const AdaptGains& g);

// rate / Omega^2 (evaluated as rate / Omega / Omega; underflows to 0 for huge Omega).
double gain_schedule(double omega_acc, const Mat& omega_vec, const AdaptGains& g);

// Euler step of theta_hat' = -gamma Omega (Omega theta_hat - Upsilon).
ControllerState theta_update(const ControllerState& cs, double gamma, double omega_acc, const Mat& upsilon_acc,
                             double dt);

// Same law with gamma Omega^2 folded into `rate`: theta_hat' = -rate (theta_hat - Upsilon / Omega).
ControllerState theta_update_normalized(const ControllerState& cs, double rate, double omega_acc,
                                        const Mat& upsilon_acc, double dt);

Mat regressor_omega(const Mat& x, const Mat& r);
Mat control_output(const ControllerState& cs, const Mat& x, const Mat& r);

struct ErrorMetrics {
  double theta_err_norm = 0.0;
  double e_ref_norm = 0.0;
  double xi_norm = 0.0;
};
ErrorMetrics error_metrics(const ControllerState& cs, const Mat& theta_true, const Mat& x, const Mat& x_ref);

}  // namespace alq
