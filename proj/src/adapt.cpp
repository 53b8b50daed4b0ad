#include "alq/adapt.hpp"

#include <cmath>

#include "alq/mat_core.hpp"

namespace alq {

void validate(const AdaptGains& g) {
  if (!(g.gamma0 >= 1.0) || !std::isfinite(g.gamma0)) fail(ErrorKind::Parameter, "gamma0 must be >= 1");
  if (!(g.gamma1 >= 0.0) || !std::isfinite(g.gamma1)) fail(ErrorKind::Parameter, "gamma1 must be >= 0");
  if (!(g.rho > 0.0) || !std::isfinite(g.rho)) fail(ErrorKind::Parameter, "rho must be positive");
}

double adaptation_rate(double omega_acc, const Mat& omega_vec, const AdaptGains& g) {
  if (omega_acc <= g.rho) return 0.0;
  double w2 = 0.0;
  for (std::size_t i = 0; i < omega_vec.size(); ++i) w2 += omega_vec[i] * omega_vec[i];
  return g.gamma0 * w2 + g.gamma1;
}

double gain_schedule(double omega_acc, const Mat& omega_vec, const AdaptGains& g) {
  const double rate = adaptation_rate(omega_acc, omega_vec, g);
  if (rate == 0.0) return 0.0;
  return rate / omega_acc / omega_acc;
}

ControllerState theta_update(const ControllerState& cs, double gamma, double omega_acc, const Mat& upsilon_acc,
                             double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::Step, "dt must be positive");
  if (gamma == 0.0) return cs;
  ControllerState next = cs;
  next.theta_hat -= (cs.theta_hat * omega_acc - upsilon_acc) * (gamma * omega_acc * dt);
  require_finite(next.theta_hat, "theta_hat update");
  return next;
}

ControllerState theta_update_normalized(const ControllerState& cs, double rate, double omega_acc,
                                        const Mat& upsilon_acc, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::Step, "dt must be positive");
  if (rate == 0.0) return cs;
  ControllerState next = cs;
  next.theta_hat -= (cs.theta_hat - upsilon_acc / omega_acc) * (rate * dt);
  require_finite(next.theta_hat, "theta_hat update");
  return next;
}

Mat regressor_omega(const Mat& x, const Mat& r) { return vstack(x, r); }

Mat control_output(const ControllerState& cs, const Mat& x, const Mat& r) {
  const Mat w = regressor_omega(x, r);
  if (cs.theta_hat.rows() != w.rows())
    fail(ErrorKind::Dimension, "theta_hat has " + std::to_string(cs.theta_hat.rows()) + " rows, omega has " +
                                   std::to_string(w.rows()));
  return cs.theta_hat.transpose() * w;
}

ErrorMetrics error_metrics(const ControllerState& cs, const Mat& theta_true, const Mat& x, const Mat& x_ref) {
  ErrorMetrics e;
  e.theta_err_norm = frobenius_norm(cs.theta_hat - theta_true);
  e.e_ref_norm = frobenius_norm(x - x_ref);
  e.xi_norm = std::sqrt(e.e_ref_norm * e.e_ref_norm + e.theta_err_norm * e.theta_err_norm);
  return e;
}

}  // namespace alq
