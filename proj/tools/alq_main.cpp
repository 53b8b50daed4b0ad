// alq: command-line front end for the adaptive LQ simulator.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "alq/io.hpp"

namespace fs = std::filesystem;
using namespace alq;

namespace {

struct CommonOpts {
  std::string preset;
  std::string config;
  std::string out;
  std::size_t decimate = 0;
  double dt = 0.0;
  double duration = 0.0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--preset", o.preset, "Scenario preset (sec4_1, sec4_2)");
  sub->add_option("--config", o.config, "YAML configuration file");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--decimate", o.decimate, "Keep every k-th sample in the trace CSV (default 100)");
  sub->add_option("--dt", o.dt, "Integration step in seconds");
  sub->add_option("--duration", o.duration, "Simulated time in seconds");
}

Config resolve(const CommonOpts& o, const std::string& fallback_preset) {
  Config c;
  if (!o.config.empty()) {
    c = load_config(o.config);
    if (!o.preset.empty() && o.preset != c.preset) {
      // an explicit --preset replaces the scenario from the file
      c.preset = o.preset;
      c.scenario = preset(o.preset);
    }
  } else {
    c.preset = o.preset.empty() ? fallback_preset : o.preset;
    c.scenario = preset(c.preset);
  }
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.decimate) c.decimate = o.decimate;
  if (o.dt > 0) c.scenario.dt = o.dt;
  else if (o.dt < 0) fail(ErrorKind::Parameter, "--dt must be positive");
  if (o.duration > 0) c.scenario.duration = o.duration;
  else if (o.duration < 0) fail(ErrorKind::Parameter, "--duration must be positive");
  validate(c.scenario);
  return c;
}

std::string out_path(const Config& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return (fs::path(c.out_dir) / name).string();
}

int cmd_run(const CommonOpts& o) {
  const Config c = resolve(o, "sec4_1");
  const RunResult res = run_closed_loop(c.scenario);
  if (c.emit.trace) write_trace_csv(res.trace, out_path(c, "trace.csv"), c.decimate);
  if (c.emit.summary) write_summary(res.summary, out_path(c, "summary.txt"));
  std::cout << format_summary(res.summary);
  if (res.summary.overflow_flag) {
    std::cerr << "alq: run stopped early: " << res.summary.overflow_message << '\n';
    return 2;
  }
  return 0;
}

int cmd_table1(const CommonOpts& o, const std::string& norm) {
  NormKind kind = NormKind::Frobenius;
  if (norm == "spectral") kind = NormKind::Spectral;
  else if (norm != "frobenius") fail(ErrorKind::Parameter, "--norm must be frobenius or spectral");
  std::ostringstream csv;
  csv << "tau_inf,p,eps_norm\n";
  for (const auto& cell : reproduce_table1(kind))
    csv << format_double(cell.tau_inf) << ',' << cell.p << ',' << format_double(cell.eps_norm) << '\n';
  std::cout << csv.str();
  if (!o.out.empty()) {
    Config c;
    c.out_dir = o.out;
    std::ofstream(out_path(c, "table1.csv"), std::ios::binary) << csv.str();
  }
  return 0;
}

int cmd_spectra(const CommonOpts& o) {
  std::ostringstream rep;
  for (const auto& s : reproduce_spectra()) {
    rep << s.label << " vartheta=" << s.vartheta << ":";
    for (const auto& ev : s.eigenvalues) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %.4f%+.4fi", ev.real(), ev.imag());
      rep << buf;
    }
    rep << '\n';
  }
  std::cout << rep.str();
  if (!o.out.empty()) {
    Config c;
    c.out_dir = o.out;
    std::ofstream(out_path(c, "spectra.txt"), std::ios::binary) << rep.str();
  }
  return 0;
}

int cmd_riccati_check(const CommonOpts& o, double step, double horizon) {
  const Config c = resolve(o, "sec4_1");
  const Scenario& s = c.scenario;
  const AugmentedSystem sys = augment(s.plant, s.vartheta);
  const double tau = s.pipeline.tau_inf;
  const LqSolution an = solve_lq_analytical(sys, s.weights, tau);
  const RiccatiTrajectory at_tau = integrate_riccati_differential(sys, s.weights, tau, step);
  const RiccatiTrajectory steady = integrate_riccati_differential(sys, s.weights, horizon, step);
  const LqSolution st = gains_from_p(sys, s.weights, steady.P_final);
  auto rel = [](const Mat& a, const Mat& b) { return frobenius_norm(a - b) / frobenius_norm(b); };
  const double qn = frobenius_norm(s.weights.Q);
  std::cout << "tau_inf=" << format_double(tau) << '\n'
            << "rel_gap_P_vs_differential_at_tau_inf=" << format_double(rel(an.P, at_tau.P_final)) << '\n'
            << "rel_gap_P_vs_differential_steady=" << format_double(rel(an.P, steady.P_final)) << '\n'
            << "rel_gap_theta_vs_differential_steady=" << format_double(rel(an.theta, st.theta)) << '\n'
            << "are_residual_analytical=" << format_double(frobenius_norm(are_residual(sys, s.weights, an.P)) / qn) << '\n'
            << "are_residual_differential_steady=" << format_double(frobenius_norm(are_residual(sys, s.weights, steady.P_final)) / qn) << '\n'
            << "differential_settled=" << (steady.settled ? "true" : "false") << '\n'
            << "differential_tau_end=" << format_double(steady.tau_end) << '\n';
  return 0;
}

int cmd_ideal_sweep(const CommonOpts& o, const std::vector<double>& taus) {
  const Config c = resolve(o, "sec4_1");
  std::ostringstream csv;
  csv << "tau_inf,J,status\n";
  for (const auto& r : run_ideal_lq(c.scenario, taus)) {
    csv << format_double(r.tau_inf) << ',' << (r.singular ? std::string("nan") : format_double(r.J)) << ','
        << (r.singular ? "singular" : "ok") << '\n';
    if (!r.singular && !o.out.empty()) {
      std::ostringstream name;
      name << "ideal_tau_" << r.tau_inf << ".csv";
      write_trace_csv(r.trace, out_path(c, name.str()), c.decimate);
    }
  }
  std::cout << csv.str();
  if (!o.out.empty()) std::ofstream(out_path(c, "ideal_sweep.csv"), std::ios::binary) << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive LQ self-tuning regulator simulator"};
  app.require_subcommand(1);

  CommonOpts run_o, t1_o, sp_o, rc_o, is_o;
  auto* run = app.add_subcommand("run", "Simulate a scenario and write trace.csv / summary.txt");
  add_common(run, run_o);

  auto* t1 = app.add_subcommand("table1", "Taylor-vs-oracle matrix exponential error grid");
  add_common(t1, t1_o);
  std::string norm = "frobenius";
  t1->add_option("--norm", norm, "frobenius or spectral");

  auto* sp = app.add_subcommand("spectra", "Hamiltonian eigenvalues of the two experiments");
  add_common(sp, sp_o);

  auto* rc = app.add_subcommand("riccati-check", "Compare analytical and differential Riccati solutions");
  add_common(rc, rc_o);
  double step = 1e-3, horizon = 200.0;
  rc->add_option("--step", step, "RK4 step");
  rc->add_option("--horizon", horizon, "Integration cap for the steady-state run");

  auto* is = app.add_subcommand("ideal-sweep", "Fixed optimal law for a list of tau_inf values");
  add_common(is, is_o);
  std::vector<double> taus{0.5, 1.0, 3.0, 7.0};
  is->add_option("--taus", taus, "tau_inf values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*t1) return cmd_table1(t1_o, norm);
    if (*sp) return cmd_spectra(sp_o);
    if (*rc) return cmd_riccati_check(rc_o, step, horizon);
    if (*is) return cmd_ideal_sweep(is_o, taus);
  } catch (const Error& e) {
    std::cerr << "alq: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "alq: " << e.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 1;
}
