#include <gtest/gtest.h>

#include <random>

#include "alq/io.hpp"
#include "oracles.hpp"

using namespace alq;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no alq::Error thrown";
  return ErrorKind::Numeric;
}

struct Tick {
  double t;
  FilterOutput f;
  MixOutput mix;
};

// Open-loop sec4_1 trajectory under the frozen initial law, with the filter and mixing stages
// run alongside so the regression identities can be checked against the true (A, B, x0).
struct Synthetic {
  AugmentedSystem sys;
  Scenario sc;
  LqSolution truth;
  Mat theta_bar;  // (n+m+1) x n, [A^T; B^T; x0^T]
  std::vector<Tick> ticks;
};

const Synthetic& synthetic_41() {
  static const Synthetic s = [] {
    Synthetic out;
    out.sc = preset("sec4_1");
    out.sys = augment(out.sc.plant, out.sc.vartheta);
    out.truth = solve_lq_analytical(out.sys, out.sc.weights, out.sc.pipeline.tau_inf);
    out.theta_bar = vstack(vstack(out.sys.A.transpose(), out.sys.B.transpose()), out.sc.x0.transpose());
    const double dt = out.sc.dt;
    FilterState fs = make_filter_state(3, 1, out.sc.x0, 0.0);
    Mat x = out.sc.x0;
    for (int k = 0; k < 25000; ++k) {
      const double t = k * dt;
      const Mat r = out.sc.reference.eval(t);
      const Mat u = out.sc.theta_hat0.transpose() * vstack(x, r);
      Tick tk{t, filter_step(fs, x, u, r, out.sys, out.sc.pipeline, dt), {}};
      tk.mix = drem_mix(fs, tk.f, out.sc.pipeline, dt);
      out.ticks.push_back(std::move(tk));
      x = x + (out.sys.A * x + out.sys.B * u - out.sys.B_r * r) * dt;
    }
    return out;
  }();
  return s;
}

ThetaRegression regress(const Mat& z_A, const Mat& z_B, double phi, const AugmentedSystem& sys, const CostWeights& w,
                        const PipelineParams& p) {
  const ZPhi zp = build_zPhi(build_zD(z_A, z_B, phi, w), phi, p);
  return parameterize_theta(z_A, z_B, zp.z_Phi11, zp.z_Phi21, phi, sys, w);
}

// phi^{2p} times the exact Phi blocks
ThetaRegression regress_exact(const AugmentedSystem& sys, const CostWeights& w, double phi, double tau, int p) {
  const std::size_t n = sys.n;
  const Mat Phi = mat_exp_oracle(build_hamiltonian(sys, w), tau);
  const double s = std::pow(phi * phi, p);
  return parameterize_theta(sys.A * phi, sys.B * phi, Phi.block(0, 0, n, n) * s, Phi.block(n, 0, n, n) * s, phi, sys, w);
}

double normalized_residual(const ThetaRegression& reg, const Mat& theta) {
  return frobenius_norm(residual_oracle(reg, theta)) / (std::abs(reg.delta) * frobenius_norm(theta));
}

AugmentedSystem random_controllable(std::mt19937_64& g, std::size_t np) {
  for (;;) {
    PlantModel p{oracle::random_mat(g, np, np), oracle::random_mat(g, np, 1), oracle::random_mat(g, np, 1), Mat(np, 1)};
    try {
      return augment(p, 1.0);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST(FilterStep, InitialOutput) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const Mat x0{{-1}, {1}, {0}};
  FilterState fs = make_filter_state(3, 1, x0, 0.0);
  const FilterOutput f = filter_step(fs, x0, Mat{{0.4}}, Mat{{1}}, sys, PipelineParams{}, 1e-4);
  EXPECT_EQ(f.zbar, x0);
  EXPECT_EQ(f.phibar, (Mat{{0}, {0}, {0}, {0}, {1}}));
}

TEST(FilterStep, ConstantInputsReachDcGain) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  PipelineParams p;
  const Mat x{{1}, {-2}, {0.5}}, u{{3}}, r{{0.7}};
  FilterState fs = make_filter_state(3, 1, x, 0.0);
  FilterOutput f;
  for (int k = 0; k < 20000; ++k) f = filter_step(fs, x, u, r, sys, p, 1e-3);
  const Mat psi = vstack(x, u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(f.phibar(i, 0), psi(i, 0) / p.l, 1e-9);
  EXPECT_LT(f.phibar(4, 0), 1e-20);
  EXPECT_NEAR(fs.r_bar(0, 0), r(0, 0) / p.l, 1e-9);
}

TEST(FilterStep, RegressionIdentityOnSec41Trajectory) {
  const Synthetic& s = synthetic_41();
  double worst = 0;
  for (const Tick& tk : s.ticks) {
    const Mat e = tk.f.zbar - s.theta_bar.transpose() * tk.f.phibar;
    worst = std::max(worst, e.max_abs() / std::max(1.0, tk.f.zbar.max_abs()));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(FilterStep, Errors) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  FilterState fs = make_filter_state(3, 1, Mat(3, 1), 0.0);
  EXPECT_EQ(kind_of([&] { filter_step(fs, Mat(3, 1), Mat(1, 1), Mat(1, 1), sys, PipelineParams{}, 0.0); }), ErrorKind::Step);
  EXPECT_EQ(kind_of([&] { filter_step(fs, Mat(2, 1), Mat(1, 1), Mat(1, 1), sys, PipelineParams{}, 1e-4); }),
            ErrorKind::Dimension);
}

TEST(DremMix, NoExcitationGivesZero) {
  FilterState fs = make_filter_state(3, 1, Mat(3, 1), 0.0);
  const MixOutput m = drem_mix(fs, {Mat(3, 1), Mat(5, 1)}, PipelineParams{}, 1e-4);
  EXPECT_EQ(m.phi, 0.0);
  EXPECT_EQ(m.z, Mat(5, 3));
}

TEST(DremMix, DeterminantAtReciprocalGainGivesHalf) {
  FilterState fs = make_filter_state(1, 1, Mat(1, 1), 0.0);
  fs.phibar_f = Mat::identity(3) * 0.01;
  PipelineParams p;
  const double dt = 1e-4;
  const double c = 0.01 * (1 - p.k0 * dt);
  p.k1 = 1.0 / (c * c * c);
  const MixOutput m = drem_mix(fs, {Mat(1, 1), Mat(3, 1)}, p, dt);
  EXPECT_NEAR(m.phi, 0.5, 1e-12);
}

TEST(DremMix, IdentityForArbitraryHistories) {
  std::mt19937_64 g(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2, m = 1, q = n + m + 1;
    const Mat theta_bar = oracle::random_mat(g, q, n);
    FilterState fs = make_filter_state(n, m, Mat(n, 1), 0.0);
    PipelineParams p;
    p.k1 = 1e6;
    double num = 0, den = 0;
    for (int k = 0; k < 2000; ++k) {
      const Mat pb = oracle::random_mat(g, q, 1);
      const MixOutput mix = drem_mix(fs, {theta_bar.transpose() * pb, pb}, p, 1e-3);
      const Mat ref = theta_bar * mix.phi;
      num = std::max(num, (mix.z - ref).max_abs());
      den = std::max(den, ref.max_abs());
      EXPECT_GE(mix.phi, 0.0);
      EXPECT_LT(mix.phi, 1.0);
    }
    ASSERT_GT(den, 0.0);
    EXPECT_LE(num, 1e-8 * den) << "trial " << trial;
  }
}

TEST(DremMix, IdentityOnSec41Trajectory) {
  const Synthetic& s = synthetic_41();
  double num = 0, den = 0;
  for (const Tick& tk : s.ticks) {
    num = std::max(num, (tk.mix.z - s.theta_bar * tk.mix.phi).max_abs());
    den = std::max(den, (s.theta_bar * tk.mix.phi).max_abs());
  }
  ASSERT_GT(den, 0.0);
  EXPECT_LE(num, 1e-8 * den);
}

TEST(DremMix, PhiStaysInUnitInterval) {
  for (const Tick& tk : synthetic_41().ticks) {
    ASSERT_GE(tk.mix.phi, 0.0);
    ASSERT_LE(tk.mix.phi, 1.0);  // 1 only through rounding of k1 det / (1 + k1 det)
  }
}

TEST(Extract, StackedRowsAreExact) {
  const Mat A{{0, 1, 0}, {-3, -2, 0}, {1, 0, 0}}, B{{0}, {1}, {0}}, x0{{-1}, {1}, {0}};
  const double phi = 0.375;
  const Mat z = vstack(vstack(A.transpose(), B.transpose()), x0.transpose()) * phi;
  const ZaZb ab = extract_zA_zB(z, 3, 1);
  EXPECT_EQ(ab.z_A, A * phi);
  EXPECT_EQ(ab.z_B, B * phi);
}

TEST(Extract, ZerosAndShapes) {
  const ZaZb ab = extract_zA_zB(Mat(5, 3), 3, 1);
  EXPECT_EQ(ab.z_A, Mat(3, 3));
  EXPECT_EQ(ab.z_B, Mat(3, 1));
  EXPECT_EQ(kind_of([] { extract_zA_zB(Mat(4, 3), 3, 1); }), ErrorKind::Dimension);
}

TEST(Extract, DivideBackRecoversAOnceExcited) {
  const Synthetic& s = synthetic_41();
  double worst = 0;
  for (const Tick& tk : s.ticks) {
    if (tk.mix.phi <= 0.1) continue;
    const ZaZb ab = extract_zA_zB(tk.mix.z, 3, 1);
    worst = std::max(worst, (ab.z_A * (1.0 / tk.mix.phi) - s.sys.A).max_abs());
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(BuildZD, ScalingIdentity) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const Mat D = build_hamiltonian(sys, w);
  EXPECT_EQ(build_zD(sys.A * 0.0, sys.B * 0.0, 0.0, w), Mat(6, 6));
  EXPECT_EQ(build_zD(sys.A, sys.B, 1.0, w), D);
  EXPECT_LE(oracle::max_abs_diff(build_zD(sys.A * 0.9, sys.B * 0.9, 0.9, w), D * 0.81), 1e-10);
  EXPECT_EQ(kind_of([&] { build_zD(sys.A, sys.B, 1.0, {w.Q, Mat{{0}}}); }), ErrorKind::Weight);
}

TEST(BuildZPhi, ZeroPhiGivesZeroBlocks) {
  const ZPhi zp = build_zPhi(Mat(6, 6), 0.0, PipelineParams{});
  EXPECT_EQ(zp.z_Phi11, Mat(3, 3));
  EXPECT_EQ(zp.z_Phi21, Mat(3, 3));
}

TEST(BuildZPhi, ZerothOrder) {
  PipelineParams p;
  p.p = 0;
  const ZPhi zp = build_zPhi(Mat::identity(6) * 3.0, 1.0, p);
  EXPECT_EQ(zp.z_Phi11, Mat::identity(3));
  EXPECT_EQ(zp.z_Phi21, Mat(3, 3));
}

TEST(BuildZPhi, UnitPhiMatchesTaylorAndOracle) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const Mat D = build_hamiltonian(sys, {Mat::identity(3), Mat::identity(1)});
  const ZPhi zp = build_zPhi(D, 1.0, PipelineParams{});
  const Mat T = mat_exp_taylor(D, 7.0, 35);
  EXPECT_LE(oracle::max_abs_diff(zp.z_Phi11, T.block(0, 0, 3, 3)), 1e-12 * T.max_abs());
  EXPECT_LE(oracle::max_abs_diff(zp.z_Phi21, T.block(3, 0, 3, 3)), 1e-12 * T.max_abs());
  const Mat O = mat_exp_oracle(D, 7.0);
  EXPECT_LE(frobenius_norm(zp.z_Phi11 - O.block(0, 0, 3, 3)), 2.5e-8);
}

TEST(BuildZPhi, ScaledRegressionEqualsScaledTaylor) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const double phi = 0.8;
  PipelineParams p;
  p.p = 20;
  p.tau_inf = 3.0;
  const ZPhi zp = build_zPhi(build_zD(sys.A * phi, sys.B * phi, phi, w), phi, p);
  const Mat T = mat_exp_taylor(build_hamiltonian(sys, w), 3.0, 20) * std::pow(phi, 40);
  EXPECT_LE(oracle::max_abs_diff(zp.z_Phi11, T.block(0, 0, 3, 3)), 1e-10 * T.max_abs());
}

TEST(ParameterizeTheta, ZeroInputs) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const ThetaRegression reg =
      parameterize_theta(Mat(3, 3), Mat(3, 1), Mat(3, 3), Mat(3, 3), 0.0, sys, {Mat::identity(3), Mat::identity(1)});
  EXPECT_EQ(reg.delta, 0.0);
  EXPECT_EQ(reg.y_theta, Mat(4, 1));
}

TEST(ParameterizeTheta, ExactPhiSec41) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const LqSolution sol = solve_lq_analytical(sys, w, 7.0);
  const ThetaRegression reg = regress_exact(sys, w, 1.0, 7.0, 0);
  EXPECT_LE(normalized_residual(reg, sol.theta), 1e-9);
}

TEST(ParameterizeTheta, ExactPhiRandomSystems) {
  std::mt19937_64 g(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const AugmentedSystem sys = random_controllable(g, 1 + trial % 2);  // augmented n = 2 or 3
    const CostWeights w{Mat::identity(sys.n), Mat::identity(1)};
    const LqSolution sol = solve_lq_analytical(sys, w, 2.0);
    for (double phi : {1.0, 0.7}) {
      const ThetaRegression reg = regress_exact(sys, w, phi, 2.0, 3);
      EXPECT_LE(normalized_residual(reg, sol.theta), 1e-9) << "trial " << trial << " phi " << phi;
    }
  }
}

TEST(ParameterizeTheta, DeltaIsProductOfBlockDeterminants) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const ThetaRegression reg = regress(sys.A * 0.9, sys.B * 0.9, 0.9, sys, w, PipelineParams{});
  Mat bd(4, 4);
  for (std::size_t i = 0; i < 3; ++i) bd(i, i) = reg.delta_Kx;
  bd(3, 3) = reg.delta_Kr;
  const double ref = oracle::laplace_det(bd);
  EXPECT_NEAR(reg.delta, ref, 1e-9 * std::abs(ref));
  EXPECT_NE(reg.delta, 0.0);
}

TEST(ParameterizeTheta, PairScaleScalesBoth) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const ZPhi zp = build_zPhi(build_zD(sys.A, sys.B, 1.0, w), 1.0, PipelineParams{});
  const ThetaRegression a = parameterize_theta(sys.A, sys.B, zp.z_Phi11, zp.z_Phi21, 1.0, sys, w);
  const ThetaRegression b = parameterize_theta(sys.A, sys.B, zp.z_Phi11, zp.z_Phi21, 1.0, sys, w, 0.25);
  EXPECT_EQ(b.delta, a.delta * 0.25);
  EXPECT_EQ(b.y_theta, a.y_theta * 0.25);
}

TEST(ParameterizeTheta, MidExcitationResidualOnSec41Trajectory) {
  const Synthetic& s = synthetic_41();
  // middle tick of the longest stretch with phi >= 0.5
  std::size_t best_lo = 0, best_len = 0;
  for (std::size_t i = 0; i < s.ticks.size();) {
    if (s.ticks[i].mix.phi < 0.5) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.ticks.size() && s.ticks[j].mix.phi >= 0.5) ++j;
    if (j - i > best_len) best_lo = i, best_len = j - i;
    i = j;
  }
  ASSERT_GT(best_len, 0u);
  const Tick& tk = s.ticks[best_lo + best_len / 2];
  const ZaZb ab = extract_zA_zB(tk.mix.z, 3, 1);
  const ThetaRegression reg = regress(ab.z_A, ab.z_B, tk.mix.phi, s.sys, s.sc.weights, s.sc.pipeline);
  ASSERT_NE(reg.delta, 0.0);
  EXPECT_LE(normalized_residual(reg, s.truth.theta), 1e-6) << "t=" << tk.t;
}

TEST(Averaging, ZeroDeltaKeepsZero) {
  FilterState fs = make_filter_state(3, 1, Mat(3, 1), 0.0);
  ThetaRegression reg;
  reg.y_theta = Mat{{1}, {2}, {3}, {4}};
  for (int k = 0; k < 100; ++k) averaging_step(fs, reg, PipelineParams{}, 1e-3);
  EXPECT_EQ(fs.omega_acc, 0.0);
  EXPECT_EQ(fs.upsilon_acc, Mat(4, 1));
}

TEST(Averaging, ConstantDeltaDcGain) {
  FilterState fs = make_filter_state(3, 1, Mat(3, 1), 0.0);
  PipelineParams p;
  ThetaRegression reg;
  reg.delta = 3.0;
  reg.y_theta = Mat{{1}, {2}, {3}, {4}};
  for (int k = 0; k < 60000; ++k) averaging_step(fs, reg, p, 1e-3);
  EXPECT_NEAR(fs.omega_acc, 9.0 / p.sigma, 1e-9);
  EXPECT_NEAR(fs.upsilon_acc(3, 0), 12.0 / p.sigma, 1e-9);
}

TEST(Excitation, Metric) {
  EXPECT_EQ(excitation_metric(std::vector<double>(11, 0.0), 0.1), 0.0);
  EXPECT_NEAR(excitation_metric(std::vector<double>(201, 1.0), 0.01), 2.0, 1e-12);
  EXPECT_EQ(kind_of([] { excitation_metric({}, 0.1); }), ErrorKind::Window);
  EXPECT_EQ(kind_of([] { excitation_metric({1.0}, 0.1); }), ErrorKind::Window);
}

TEST(ResidualOracle, Definitions) {
  ThetaRegression reg;
  reg.y_theta = Mat{{1}, {2}};
  reg.delta = 0.0;
  EXPECT_EQ(residual_oracle(reg, Mat{{5}, {6}}), reg.y_theta);
  reg.delta = 2.0;
  reg.y_theta = Mat{{10}, {12}};
  EXPECT_EQ(residual_oracle(reg, Mat{{5}, {6}}), Mat(2, 1));
}

TEST(ResidualOracle, NonincreasingInTaylorDegree) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const Mat theta = solve_lq_analytical(sys, w, 7.0).theta;
  double prev = std::numeric_limits<double>::infinity();
  for (int p : {20, 25, 30, 35}) {
    PipelineParams pp;
    pp.p = p;
    const double res = normalized_residual(regress(sys.A, sys.B, 1.0, sys, w, pp), theta);
    EXPECT_LE(res, prev) << "p=" << p;
    prev = res;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(Reset, ClearsMemoriesAndRestartsExponential) {
  const Synthetic& s = synthetic_41();
  FilterState fs = make_filter_state(3, 1, s.sc.x0, 0.0);
  Mat x = s.sc.x0;
  const Mat u{{0.2}}, r{{1}};
  for (int k = 0; k < 1000; ++k) pipeline_tick(fs, x, u, r, s.sys, s.sc.weights, s.sc.pipeline, 1e-4);
  const Mat x_now{{0.3}, {-0.2}, {0.1}};
  reset_filters(fs, x_now, 0.1);
  EXPECT_EQ(fs.omega_acc, 0.0);
  EXPECT_EQ(fs.upsilon_acc, Mat(4, 1));
  EXPECT_EQ(fs.phibar_f, Mat(5, 5));
  EXPECT_EQ(fs.t_start, 0.1);
  const FilterOutput f = filter_step(fs, x_now, u, r, s.sys, s.sc.pipeline, 1e-4);
  EXPECT_EQ(f.phibar, (Mat{{0}, {0}, {0}, {0}, {1}}));
  EXPECT_EQ(f.zbar, x_now);
}
