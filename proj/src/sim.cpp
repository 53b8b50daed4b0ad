#include "alq/sim.hpp"

#include <algorithm>
#include <cmath>

namespace alq {

Mat ReferenceSpec::eval(double t) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Exponential:
      return value * std::exp(-rate * t);
    case Kind::Piecewise: {
      Mat cur = schedule.front().second;
      for (const auto& [ts, v] : schedule) {
        if (ts <= t) cur = v;
        else break;
      }
      return cur;
    }
  }
  return value;
}

std::size_t ReferenceSpec::channels() const {
  return kind == Kind::Piecewise ? (schedule.empty() ? 0 : schedule.front().second.rows()) : value.rows();
}

bool ReferenceSpec::operator==(const ReferenceSpec& o) const {
  return kind == o.kind && value == o.value && rate == o.rate && schedule == o.schedule;
}

void validate(const Scenario& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) fail(ErrorKind::Parameter, "dt must be positive");
  if (!(s.duration >= s.dt) || !std::isfinite(s.duration)) fail(ErrorKind::Parameter, "duration must be >= dt");
  validate(s.pipeline);
  validate(s.gains);
  const std::size_t np = s.plant.A_p.rows(), m = s.plant.B_p.cols(), n = np + m;
  if (s.x0.rows() != n || s.x0.cols() != 1) fail(ErrorKind::Dimension, "x0 must have length " + std::to_string(n));
  if (s.theta_hat0.rows() != n + m || s.theta_hat0.cols() != m)
    fail(ErrorKind::Dimension, "theta_hat0 must be " + std::to_string(n + m) + "x" + std::to_string(m));
  const auto& ref = s.reference;
  if (ref.kind == ReferenceSpec::Kind::Piecewise) {
    if (ref.schedule.empty()) fail(ErrorKind::Parameter, "piecewise reference needs at least one level");
    for (std::size_t i = 0; i < ref.schedule.size(); ++i) {
      if (ref.schedule[i].second.rows() != m) fail(ErrorKind::Dimension, "reference level must have length " + std::to_string(m));
      if (i > 0 && !(ref.schedule[i].first > ref.schedule[i - 1].first))
        fail(ErrorKind::Parameter, "piecewise reference times must increase");
    }
  } else {
    if (ref.value.rows() != m || ref.value.cols() != 1) fail(ErrorKind::Dimension, "reference must have length " + std::to_string(m));
    if (ref.kind == ReferenceSpec::Kind::Exponential && !std::isfinite(ref.rate))
      fail(ErrorKind::Parameter, "reference rate must be finite");
  }
}

std::size_t Trace::channel(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(ErrorKind::Trace, "no channel named " + name);
  return static_cast<std::size_t>(it - names.begin());
}

namespace {

std::vector<std::string> vec_names(const std::string& base, std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(base + std::to_string(i + 1));
  return v;
}

struct Recorder {
  Trace& tr;
  std::vector<double> row;
  void start(std::size_t reserve) {
    tr.columns.assign(tr.names.size(), {});
    for (auto& c : tr.columns) c.reserve(reserve);
    tr.t.reserve(reserve);
  }
  void push(double t) {
    tr.t.push_back(t);
    for (std::size_t i = 0; i < row.size(); ++i) tr.columns[i].push_back(row[i]);
    row.clear();
  }
  void add(const Mat& m) {
    for (std::size_t i = 0; i < m.size(); ++i) row.push_back(m[i]);
  }
  void add(double v) { row.push_back(v); }
};

double stage_cost(const Mat& x, const Mat& u, const CostWeights& w) {
  return 0.5 * ((x.transpose() * w.Q * x)(0, 0) + (u.transpose() * w.R * u)(0, 0));
}

std::size_t tick_count(const Scenario& s) {
  return static_cast<std::size_t>(std::llround(s.duration / s.dt));
}

}  // namespace

RunResult run_closed_loop(const Scenario& s) {
  validate(s);
  const AugmentedSystem sys = augment(s.plant, s.vartheta);
  validate_weights(s.weights, sys.n, sys.m);
  const std::size_t n = sys.n, m = sys.m;

  RunResult res;
  res.truth = solve_lq_analytical(sys, s.weights, s.pipeline.tau_inf);
  const Mat& theta = res.truth.theta;

  Trace& tr = res.trace;
  for (const auto& v : {vec_names("x", n), vec_names("u", m), vec_names("r", m), vec_names("x_ref", n)})
    tr.names.insert(tr.names.end(), v.begin(), v.end());
  for (std::size_t i = 0; i < n + m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      tr.names.push_back(m == 1 ? "theta_hat" + std::to_string(i + 1)
                                : "theta_hat" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (const char* c : {"delta", "phi", "Omega", "rate", "theta_err", "e_ref", "xi", "J", "J_ideal"})
    tr.names.push_back(c);

  const std::size_t N = tick_count(s);
  Recorder rec{tr, {}};
  rec.start(N + 1);

  const double dt = s.dt;
  Mat x = s.x0, x_ref = s.x0;
  ControllerState cs{s.theta_hat0};
  FilterState fs = make_filter_state(n, m, x, s.pipeline.t_start);
  bool pipeline_live = false;
  Mat prev_r;

  RunSummary& sum = res.summary;
  double J = 0.0, J_ideal = 0.0, prev_stage = 0.0, prev_stage_ideal = 0.0;
  std::optional<std::size_t> k_act;
  std::size_t mono_good = 0, mono_total = 0;
  std::vector<double> xi_hist;
  xi_hist.reserve(N + 1);

  for (std::size_t k = 0; k <= N; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Mat r = s.reference.eval(t);
    if (!pipeline_live && t >= s.pipeline.t_start) {
      reset_filters(fs, x, t);
      pipeline_live = true;
    } else if (pipeline_live && s.reset_on_reference_change && !(r == prev_r)) {
      reset_filters(fs, x, t);
    }
    prev_r = r;

    const Mat u = control_output(cs, x, r);
    const Mat u_ref = theta.transpose() * vstack(x_ref, r);
    const ErrorMetrics em = error_metrics(cs, theta, x, x_ref);

    const double st = stage_cost(x, u, s.weights), st_i = stage_cost(x_ref, u_ref, s.weights);
    if (k > 0) {
      J += 0.5 * dt * (prev_stage + st);
      J_ideal += 0.5 * dt * (prev_stage_ideal + st_i);
    }
    prev_stage = st;
    prev_stage_ideal = st_i;

    ThetaRegression reg;
    ControllerState next = cs;
    double rate = 0.0;
    if (pipeline_live) {
      try {
        reg = pipeline_tick(fs, x, u, r, sys, s.weights, s.pipeline, dt);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Overflow) throw;
        sum.overflow_flag = true;
        sum.overflow_message = e.what();
        break;
      }
      rate = adaptation_rate(fs.omega_acc, regressor_omega(x, r), s.gains);
      next = theta_update_normalized(cs, rate, fs.omega_acc, fs.upsilon_acc, dt);
      if (rate > 0.0 && !k_act) {
        k_act = k;
        sum.activation_time = t;
        sum.activation_theta_err = em.theta_err_norm;
      }
    }

    rec.add(x);
    rec.add(u);
    rec.add(r);
    rec.add(x_ref);
    rec.add(cs.theta_hat);
    rec.add(reg.delta);
    rec.add(reg.phi);
    rec.add(fs.omega_acc);
    rec.add(rate);
    rec.add(em.theta_err_norm);
    rec.add(em.e_ref_norm);
    rec.add(em.xi_norm);
    rec.add(J);
    rec.add(J_ideal);
    rec.push(t);

    if (k == 0) sum.initial_theta_err = em.theta_err_norm;
    sum.omega_peak = std::max(sum.omega_peak, fs.omega_acc);
    sum.eref_max = std::max(sum.eref_max, em.e_ref_norm);
    sum.theta_err_max = std::max(sum.theta_err_max, em.theta_err_norm);
    sum.final_theta_err = em.theta_err_norm;
    sum.final_eref_err = em.e_ref_norm;
    xi_hist.push_back(em.xi_norm);
    sum.ticks = k + 1;

    if (k == N) break;

    if (k_act && k >= *k_act) {
      bool ok = true;
      for (std::size_t i = 0; i < theta.size(); ++i)
        if (std::abs(next.theta_hat[i] - theta[i]) > std::abs(cs.theta_hat[i] - theta[i]) + 1e-9) ok = false;
      mono_good += ok ? 1 : 0;
      ++mono_total;
    }

    x = x + (sys.A * x + sys.B * u - sys.B_r * r) * dt;
    x_ref = reference_model_step(res.truth, sys, x_ref, r, dt);
    cs = next;
    if (!x.all_finite()) {
      sum.overflow_flag = true;
      sum.overflow_message = "plant state became non-finite";
      break;
    }
  }

  sum.monotone_fraction = mono_total ? static_cast<double>(mono_good) / static_cast<double>(mono_total) : 0.0;
  sum.cost_adaptive = J;
  sum.cost_ideal = J_ideal;
  sum.cost_gap = J - J_ideal;
  if (!xi_hist.empty()) {
    sum.xi_peak = *std::max_element(xi_hist.begin(), xi_hist.end());
    const std::size_t tail = xi_hist.size() - std::max<std::size_t>(1, xi_hist.size() / 10);
    sum.xi_tail_max = *std::max_element(xi_hist.begin() + static_cast<std::ptrdiff_t>(tail), xi_hist.end());
  }
  return res;
}

std::vector<IdealRun> run_ideal_lq(const Scenario& s, const std::vector<double>& tau_inf_sweep) {
  validate(s);
  const AugmentedSystem sys = augment(s.plant, s.vartheta);
  validate_weights(s.weights, sys.n, sys.m);
  const std::size_t N = tick_count(s);
  std::vector<IdealRun> out;
  for (double tau : tau_inf_sweep) {
    IdealRun run;
    run.tau_inf = tau;
    LqSolution sol;
    try {
      sol = solve_lq_analytical(sys, s.weights, tau);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Singularity) throw;
      run.singular = true;
      run.message = e.what();
      out.push_back(std::move(run));
      continue;
    }
    Trace& tr = run.trace;
    for (const auto& v : {vec_names("x", sys.n), vec_names("u", sys.m), vec_names("r", sys.m)})
      tr.names.insert(tr.names.end(), v.begin(), v.end());
    tr.names.push_back("J");
    Recorder rec{tr, {}};
    rec.start(N + 1);
    Mat x = s.x0;
    double J = 0.0, prev = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
      const double t = static_cast<double>(k) * s.dt;
      const Mat r = s.reference.eval(t);
      const Mat u = sol.theta.transpose() * vstack(x, r);
      const double st = stage_cost(x, u, s.weights);
      if (k > 0) J += 0.5 * s.dt * (prev + st);
      prev = st;
      rec.add(x);
      rec.add(u);
      rec.add(r);
      rec.add(J);
      rec.push(t);
      x = x + (sys.A * x + sys.B * u - sys.B_r * r) * s.dt;
    }
    run.J = J;
    out.push_back(std::move(run));
  }
  return out;
}

PlantModel plant_sec4_1() {
  PlantModel p;
  p.A_p = Mat{{0, 1}, {-1, -1}};
  p.B_p = Mat{{0}, {1}};
  p.C_p = Mat{{1}, {0}};
  p.x_p0 = Mat{{-1}, {1}};
  return p;
}

PlantModel plant_sec4_2() {
  PlantModel p;
  p.A_p = Mat{{0, 1, 0}, {0, 0, 4.438}, {0, -12, -24}};
  p.B_p = Mat{{0}, {0}, {20}};
  p.C_p = Mat{{1}, {0}, {0}};
  p.x_p0 = Mat(3, 1);
  return p;
}

std::vector<Table1Cell> reproduce_table1(NormKind norm) {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  const CostWeights w{Mat::identity(3), Mat::identity(1)};
  const Mat D = build_hamiltonian(sys, w);
  std::vector<Table1Cell> cells;
  for (double tau : {1.5, 2.0, 2.5, 3.0, 7.0}) {
    const Mat ref = mat_exp_oracle(D, tau);
    for (int p : {20, 25, 30, 35})
      cells.push_back({tau, p, matrix_norm(ref - mat_exp_taylor(D, tau, p), norm)});
  }
  return cells;
}

std::vector<SpectrumReport> reproduce_spectra() {
  std::vector<SpectrumReport> out;
  auto add = [&](const std::string& label, const PlantModel& plant, double vt) {
    const AugmentedSystem sys = augment(plant, vt);
    const CostWeights w{Mat::identity(sys.n), Mat::identity(sys.m)};
    auto ev = eigenvalues(build_hamiltonian(sys, w)).eigenvalues;
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    out.push_back({label, vt, ev});
  };
  add("sec4_1", plant_sec4_1(), 1.0);
  add("sec4_2", plant_sec4_2(), 1.0);
  add("sec4_2", plant_sec4_2(), 100.0);
  return out;
}

}  // namespace alq
