#include "alq/drem.hpp"

#include <cmath>
#include <sstream>

namespace alq {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Step, "dt must be positive and finite");
}

double ipow(double b, std::size_t e) {
  double r = 1.0;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

[[noreturn]] void overflow_hint(const std::string& what, double magnitude) {
  fail(ErrorKind::Overflow, what + " is not finite (last magnitude " + sci(magnitude) +
                                "); lower k1 or enable pair rescaling so the regressor stays in range");
}

}  // namespace

void validate(const PipelineParams& p) {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::Parameter, std::string(name) + " must be positive");
  };
  pos(p.l, "l");
  pos(p.k0, "k0");
  pos(p.k1, "k1");
  pos(p.sigma, "sigma");
  pos(p.tau_inf, "tau_inf");
  pos(p.pair_scale, "pair_scale");
  if (p.p < 1 || p.p > 200) fail(ErrorKind::Parameter, "p must be in [1, 200]");
  if (!(p.t_start >= 0.0) || !std::isfinite(p.t_start)) fail(ErrorKind::Parameter, "t_start must be >= 0");
}

FilterState make_filter_state(std::size_t n, std::size_t m, const Mat& x0, double t_start) {
  FilterState fs;
  const std::size_t q = n + m + 1;
  fs.psi_bar = Mat(n + m, 1);
  fs.r_bar = Mat(m, 1);
  fs.exp_term = 1.0;
  fs.zbar_f = Mat(q, n);
  fs.phibar_f = Mat(q, q);
  fs.omega_acc = 0.0;
  fs.upsilon_acc = Mat(n + m, m);
  fs.x0_snapshot = x0;
  fs.t_start = t_start;
  fs.t_now = t_start;
  return fs;
}

FilterOutput filter_step(FilterState& fs, const Mat& x, const Mat& u, const Mat& r,
                         const AugmentedSystem& sys, const PipelineParams& params, double dt) {
  check_dt(dt);
  const std::size_t n = sys.n, m = sys.m;
  if (x.rows() != n || u.rows() != m || r.rows() != m)
    fail(ErrorKind::Dimension, "filter_step expects x, u, r of lengths " + std::to_string(n) + ", " +
                                   std::to_string(m) + ", " + std::to_string(m));
  const double l = params.l;

  FilterOutput out;
  const Mat x_bar = fs.psi_bar.block(0, 0, n, 1);
  out.zbar = x - x_bar * l + sys.B_r * fs.r_bar;
  out.phibar = Mat(n + m + 1, 1);
  out.phibar.set_block(0, 0, fs.psi_bar);
  out.phibar(n + m, 0) = fs.exp_term;

  const Mat psi = vstack(x, u);
  fs.psi_bar += (psi - fs.psi_bar * l) * dt;
  fs.r_bar += (r - fs.r_bar * l) * dt;
  fs.exp_term += -l * fs.exp_term * dt;
  fs.t_now += dt;
  return out;
}

MixOutput drem_mix(FilterState& fs, const FilterOutput& in, const PipelineParams& params, double dt) {
  check_dt(dt);
  const Mat& pb = in.phibar;
  fs.zbar_f += (pb * in.zbar.transpose() - fs.zbar_f * params.k0) * dt;
  fs.phibar_f += (pb * pb.transpose() - fs.phibar_f * params.k0) * dt;

  MixOutput out;
  out.z = Mat(fs.zbar_f.rows(), fs.zbar_f.cols());
  Lu<double> lu(fs.phibar_f);
  const double d = lu.det();
  if (!std::isfinite(d)) overflow_hint("det(phibar_f)", d);
  if (d <= 0.0 || lu.singular) return out;
  const double kd = params.k1 * d;
  if (!std::isfinite(kd)) overflow_hint("k1 * det(phibar_f)", d);
  out.phi = kd / (1.0 + kd);
  // k1 adj(phibar_f) zbar_f / (1 + k1 det) == phi * phibar_f^-1 zbar_f
  out.z = lu.solve(fs.zbar_f) * out.phi;
  if (!out.z.all_finite()) overflow_hint("DREM output z", out.phi);
  return out;
}

ZaZb extract_zA_zB(const Mat& z, std::size_t n, std::size_t m) {
  if (z.rows() != n + m + 1 || z.cols() != n)
    fail(ErrorKind::Dimension, "z must be " + std::to_string(n + m + 1) + "x" + std::to_string(n) + ", got " + z.shape());
  return {z.block(0, 0, n, n).transpose(), z.block(n, 0, m, n).transpose()};
}

Mat build_zD(const Mat& z_A, const Mat& z_B, double phi, const CostWeights& w) {
  const std::size_t n = z_A.rows();
  if (!z_A.square() || z_B.rows() != n || w.Q.rows() != n || w.R.rows() != z_B.cols())
    fail(ErrorKind::Dimension, "build_zD shape mismatch");
  Lu<double> lu(w.R);
  if (lu.singular) fail(ErrorKind::Weight, "R is singular");
  Mat zD(2 * n, 2 * n);
  zD.set_block(0, 0, z_A * (-phi));
  zD.set_block(0, n, z_B * lu.inverse() * z_B.transpose());
  zD.set_block(n, 0, w.Q * (phi * phi));
  zD.set_block(n, n, z_A.transpose() * phi);
  return zD;
}

ZPhi build_zPhi(const Mat& z_D, double phi, const PipelineParams& params) {
  if (!z_D.square() || z_D.rows() % 2 != 0) fail(ErrorKind::Dimension, "z_D must be 2n x 2n");
  if (params.p < 0) fail(ErrorKind::Parameter, "p must be >= 0");
  const std::size_t n2 = z_D.rows(), n = n2 / 2;
  const int p = params.p;
  const double phi2 = phi * phi;
  const Mat step = z_D * params.tau_inf;

  Mat M = Mat::identity(n2);
  Mat S = M * std::pow(phi2, p);
  for (int k = 0; k < p; ++k) {
    M = M * step;
    M *= 1.0 / static_cast<double>(k + 1);
    const double w = std::pow(phi2, p - k - 1);
    if (w != 0.0) S += M * w;
    if (!M.all_finite() || !S.all_finite())
      fail(ErrorKind::Overflow, "z_Phi Taylor term k=" + std::to_string(k + 1) + " is not finite");
  }
  return {S.block(0, 0, n, n), S.block(n, 0, n, n)};
}

ThetaRegression parameterize_theta(const Mat& z_A, const Mat& z_B, const Mat& z_Phi11, const Mat& z_Phi21,
                                   double phi, const AugmentedSystem& sys, const CostWeights& w,
                                   double pair_scale) {
  const std::size_t n = sys.n, m = sys.m;
  if (z_A.rows() != n || z_A.cols() != n || z_B.rows() != n || z_B.cols() != m || z_Phi11.rows() != n ||
      z_Phi11.cols() != n || z_Phi21.rows() != n || z_Phi21.cols() != n)
    fail(ErrorKind::Dimension, "parameterize_theta input shapes do not match the system");
  Lu<double> rlu(w.R);
  if (rlu.singular) fail(ErrorKind::Weight, "R is singular");
  const Mat Ri = rlu.inverse();

  ThetaRegression reg;
  reg.phi = phi;
  // W = z_Phi21 adj(z_Phi11)
  const Mat W = times_adj(z_Phi21, z_Phi11);
  const Mat y_Kx = -(Ri * z_B.transpose() * W);
  reg.delta_Kx = phi * det(z_Phi11);
  const Mat Mk = z_A.transpose() * reg.delta_Kx + y_Kx.transpose() * z_B.transpose();
  const Mat y_Kr = -(Ri * z_B.transpose() * adj_times(Mk, W * sys.B_r)) * phi;
  reg.delta_Kr = det(Mk);
  if (!std::isfinite(reg.delta_Kx) || !std::isfinite(reg.delta_Kr) || !y_Kx.all_finite() || !y_Kr.all_finite())
    overflow_hint("theta regressor product", std::max(std::abs(reg.delta_Kx), W.max_abs()));

  const double dx = reg.delta_Kx, dr = reg.delta_Kr;
  const double cx = ipow(dx, n - 1) * ipow(dr, m);
  const double cr = ipow(dx, n) * ipow(dr, m - 1);
  reg.y_theta = Mat(n + m, m);
  reg.y_theta.set_block(0, 0, y_Kx.transpose() * cx);
  reg.y_theta.set_block(n, 0, y_Kr.transpose() * cr);
  reg.delta = ipow(dx, n) * ipow(dr, m);
  if (pair_scale != 1.0) {
    reg.y_theta *= pair_scale;
    reg.delta *= pair_scale;
  }
  if (!std::isfinite(reg.delta) || !reg.y_theta.all_finite()) overflow_hint("scalar regressor Delta", dx);
  return reg;
}

void averaging_step(FilterState& fs, const ThetaRegression& reg, const PipelineParams& params, double dt) {
  check_dt(dt);
  fs.omega_acc += (reg.delta * reg.delta - params.sigma * fs.omega_acc) * dt;
  fs.upsilon_acc += (reg.y_theta * reg.delta - fs.upsilon_acc * params.sigma) * dt;
  if (!std::isfinite(fs.omega_acc) || !fs.upsilon_acc.all_finite()) overflow_hint("averaging filter Omega", reg.delta);
}

double excitation_metric(const std::vector<double>& delta_history, double dt) {
  if (delta_history.size() < 2) fail(ErrorKind::Window, "excitation window needs at least two samples");
  check_dt(dt);
  double s = 0.0;
  for (std::size_t k = 1; k < delta_history.size(); ++k) {
    const double a = delta_history[k - 1], b = delta_history[k];
    s += 0.5 * dt * (a * a + b * b);
  }
  return s;
}

Mat residual_oracle(const ThetaRegression& reg, const Mat& theta_true) {
  return reg.y_theta - theta_true * reg.delta;
}

void reset_filters(FilterState& fs, const Mat& x_now, double t_now) {
  const std::size_t m = fs.r_bar.rows();
  const std::size_t n = fs.x0_snapshot.rows();
  fs = make_filter_state(n, m, x_now, t_now);
}

ThetaRegression pipeline_tick(FilterState& fs, const Mat& x, const Mat& u, const Mat& r,
                              const AugmentedSystem& sys, const CostWeights& w,
                              const PipelineParams& params, double dt) {
  const FilterOutput f = filter_step(fs, x, u, r, sys, params, dt);
  const MixOutput mix = drem_mix(fs, f, params, dt);
  const ZaZb ab = extract_zA_zB(mix.z, sys.n, sys.m);
  const Mat zD = build_zD(ab.z_A, ab.z_B, mix.phi, w);
  const ZPhi zp = build_zPhi(zD, mix.phi, params);
  ThetaRegression reg = parameterize_theta(ab.z_A, ab.z_B, zp.z_Phi11, zp.z_Phi21, mix.phi, sys, w, params.pair_scale);
  averaging_step(fs, reg, params, dt);
  return reg;
}

}  // namespace alq
