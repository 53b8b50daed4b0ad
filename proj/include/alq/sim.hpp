#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alq/adapt.hpp"
#include "alq/drem.hpp"
#include "alq/lq_design.hpp"

namespace alq {

struct ReferenceSpec {
  enum class Kind { Constant, Exponential, Piecewise };
  Kind kind = Kind::Constant;
  Mat value;        // m x 1 (constant level, or amplitude of the exponential)
  double rate = 0;  // r = value * exp(-rate t) for Exponential
  std::vector<std::pair<double, Mat>> schedule;  // (switch time, level), sorted by time

  Mat eval(double t) const;
  std::size_t channels() const;
  bool operator==(const ReferenceSpec& o) const;
};

struct Scenario {
  PlantModel plant;
  double vartheta = 1.0;
  CostWeights weights;
  PipelineParams pipeline;
  AdaptGains gains;
  Mat theta_hat0;  // (n+m) x m
  Mat x0;          // n x 1, augmented state
  ReferenceSpec reference;
  double duration = 10.0;
  double dt = 1e-4;
  bool reset_on_reference_change = false;
  bool operator==(const Scenario&) const = default;
};

void validate(const Scenario& s);

struct Trace {
  std::vector<std::string> names;            // channel names, without the leading t
  std::vector<double> t;
  std::vector<std::vector<double>> columns;  // one per channel, same length as t

  std::size_t channel(const std::string& name) const;
  const std::vector<double>& operator[](const std::string& name) const { return columns[channel(name)]; }
  std::size_t samples() const { return t.size(); }
};

struct RunSummary {
  double final_theta_err = 0.0;
  double final_eref_err = 0.0;
  double initial_theta_err = 0.0;
  double activation_theta_err = 0.0;
  double monotone_fraction = 0.0;
  double omega_peak = 0.0;
  std::optional<double> activation_time;
  double cost_adaptive = 0.0;
  double cost_ideal = 0.0;
  double cost_gap = 0.0;
  double xi_peak = 0.0;
  double xi_tail_max = 0.0;
  double eref_max = 0.0;
  double theta_err_max = 0.0;
  std::size_t ticks = 0;
  bool overflow_flag = false;
  std::string overflow_message;
};

struct RunResult {
  Trace trace;
  RunSummary summary;
  LqSolution truth;
};

RunResult run_closed_loop(const Scenario& s);

struct IdealRun {
  double tau_inf = 0.0;
  bool singular = false;
  std::string message;
  Trace trace;
  double J = 0.0;
};

std::vector<IdealRun> run_ideal_lq(const Scenario& s, const std::vector<double>& tau_inf_sweep);

struct Table1Cell {
  double tau_inf;
  int p;
  double eps_norm;
};
std::vector<Table1Cell> reproduce_table1(NormKind norm = NormKind::Frobenius);

struct SpectrumReport {
  std::string label;
  double vartheta;
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part, then imaginary part
};
std::vector<SpectrumReport> reproduce_spectra();

// Plants of the two experiments.
PlantModel plant_sec4_1();
PlantModel plant_sec4_2();

}  // namespace alq
