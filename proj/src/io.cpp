#include "alq/io.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace alq {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

Mat top_rows(const Mat& x, std::size_t n) { return x.block(0, 0, n, 1); }

Scenario base_sec4_1() {
  Scenario s;
  s.plant = plant_sec4_1();
  s.vartheta = 1.0;
  s.weights = {Mat::identity(3), Mat::identity(1)};
  s.pipeline.l = 2.5;
  s.pipeline.k0 = 10.0;
  s.pipeline.k1 = 1.8e35;
  s.pipeline.sigma = 5.0 / 7.0;
  s.pipeline.p = 35;
  s.pipeline.tau_inf = 7.0;
  s.gains = {1.0, 10.0, 1e35};
  s.theta_hat0 = Mat(4, 1, 0.1);
  s.x0 = Mat{{-1}, {1}, {0}};
  s.reference.kind = ReferenceSpec::Kind::Exponential;
  s.reference.value = Mat{{1}};
  s.reference.rate = 7.0;
  s.duration = 10.0;
  s.dt = 1e-4;
  s.plant.x_p0 = top_rows(s.x0, 2);
  return s;
}

Scenario base_sec4_2() {
  Scenario s;
  s.plant = plant_sec4_2();
  s.vartheta = 100.0;
  s.weights = {Mat::identity(4), Mat::identity(1)};
  s.pipeline.l = 10.0;
  s.pipeline.k0 = 10.0;
  s.pipeline.k1 = 1.8e35;
  s.pipeline.sigma = 5.0 / 7.0;
  s.pipeline.p = 85;
  s.pipeline.tau_inf = 1.0;
  s.gains = {1.0, 1.0, 1e35};
  s.theta_hat0 = Mat{{0}, {0}, {0}, {0}, {10}};
  s.x0 = Mat(4, 1);
  s.reference.kind = ReferenceSpec::Kind::Constant;
  s.reference.value = Mat{{1}};
  s.duration = 10.0;
  s.dt = 1e-4;
  s.plant.x_p0 = top_rows(s.x0, 3);
  return s;
}

// ---- parsing helpers -------------------------------------------------------

std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void bad(const std::string& key, const YAML::Node& n, const std::string& msg) {
  fail(ErrorKind::Config, key + ": " + msg + where(n));
}

void only_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
  if (!n.IsMap()) bad(path.empty() ? "<root>" : path, n, "expected a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.as<std::string>();
    if (!allowed.count(k)) bad(path.empty() ? k : path + "." + k, kv.first, "unknown key");
  }
}

double num(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) bad(key, n, "expected a number");
  double v = 0;
  try {
    v = n.as<double>();
  } catch (const YAML::Exception&) {
    bad(key, n, "expected a number, got '" + n.Scalar() + "'");
  }
  if (!std::isfinite(v)) bad(key, n, "must be finite");
  return v;
}

bool flag(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    bad(key, n, "expected true or false");
  }
}

long integer(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<long>();
  } catch (const YAML::Exception&) {
    bad(key, n, "expected an integer");
  }
}

// A flat list is read as a column vector; a list of lists as a row-major matrix.
Mat matrix(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) return Mat{{num(n, key)}};
  if (!n.IsSequence() || n.size() == 0) bad(key, n, "expected a non-empty list");
  if (!n[0].IsSequence()) {
    std::vector<double> v;
    for (std::size_t i = 0; i < n.size(); ++i) v.push_back(num(n[i], key + "[" + std::to_string(i) + "]"));
    return Mat::column(v);
  }
  const std::size_t rows = n.size(), cols = n[0].size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!n[i].IsSequence() || n[i].size() != cols) bad(key, n[i], "rows must all have " + std::to_string(cols) + " entries");
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = num(n[i][j], key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return m;
}

void positive(double v, const std::string& key, const YAML::Node& n) {
  if (!(v > 0.0)) bad(key, n, "must be positive");
}

ReferenceSpec reference(const YAML::Node& n, const std::string& key) {
  only_keys(n, key, {"kind", "value", "rate", "schedule"});
  ReferenceSpec r;
  if (!n["kind"]) bad(key + ".kind", n, "missing");
  const std::string kind = n["kind"].as<std::string>();
  if (kind == "constant") r.kind = ReferenceSpec::Kind::Constant;
  else if (kind == "exponential") r.kind = ReferenceSpec::Kind::Exponential;
  else if (kind == "piecewise") r.kind = ReferenceSpec::Kind::Piecewise;
  else bad(key + ".kind", n["kind"], "must be constant, exponential or piecewise");
  if (r.kind == ReferenceSpec::Kind::Piecewise) {
    if (!n["schedule"] || !n["schedule"].IsSequence()) bad(key + ".schedule", n, "piecewise reference needs a schedule list");
    for (std::size_t i = 0; i < n["schedule"].size(); ++i) {
      const YAML::Node e = n["schedule"][i];
      const std::string ek = key + ".schedule[" + std::to_string(i) + "]";
      only_keys(e, ek, {"t", "value"});
      if (!e["t"] || !e["value"]) bad(ek, e, "needs t and value");
      r.schedule.emplace_back(num(e["t"], ek + ".t"), matrix(e["value"], ek + ".value"));
    }
  } else {
    if (!n["value"]) bad(key + ".value", n, "missing");
    r.value = matrix(n["value"], key + ".value");
    if (r.kind == ReferenceSpec::Kind::Exponential) {
      if (!n["rate"]) bad(key + ".rate", n, "missing");
      r.rate = num(n["rate"], key + ".rate");
    }
  }
  return r;
}

void apply_scenario(const YAML::Node& n, Scenario& s, bool inline_only) {
  only_keys(n, "scenario", {"plant", "vartheta", "weights", "x0", "theta_hat0", "reference", "duration", "dt",
                            "reset_on_reference_change"});
  if (inline_only)
    for (const char* req : {"plant", "x0", "theta_hat0", "reference", "weights"})
      if (!n[req]) bad(std::string("scenario.") + req, n, "required when no preset is given");
  if (n["plant"]) {
    const YAML::Node p = n["plant"];
    only_keys(p, "scenario.plant", {"A_p", "B_p", "C_p"});
    for (const char* req : {"A_p", "B_p", "C_p"})
      if (!p[req]) bad(std::string("scenario.plant.") + req, p, "missing");
    s.plant.A_p = matrix(p["A_p"], "scenario.plant.A_p");
    s.plant.B_p = matrix(p["B_p"], "scenario.plant.B_p");
    s.plant.C_p = matrix(p["C_p"], "scenario.plant.C_p");
  }
  if (n["vartheta"]) {
    s.vartheta = num(n["vartheta"], "scenario.vartheta");
    if (s.vartheta == 0.0) bad("scenario.vartheta", n["vartheta"], "must be nonzero");
  }
  if (n["weights"]) {
    const YAML::Node w = n["weights"];
    only_keys(w, "scenario.weights", {"Q", "R"});
    if (w["Q"]) s.weights.Q = matrix(w["Q"], "scenario.weights.Q");
    if (w["R"]) s.weights.R = matrix(w["R"], "scenario.weights.R");
  }
  if (n["x0"]) s.x0 = matrix(n["x0"], "scenario.x0");
  if (n["theta_hat0"]) s.theta_hat0 = matrix(n["theta_hat0"], "scenario.theta_hat0");
  if (n["reference"]) s.reference = reference(n["reference"], "scenario.reference");
  if (n["duration"]) {
    s.duration = num(n["duration"], "scenario.duration");
    positive(s.duration, "scenario.duration", n["duration"]);
  }
  if (n["dt"]) {
    s.dt = num(n["dt"], "scenario.dt");
    positive(s.dt, "scenario.dt", n["dt"]);
  }
  if (n["reset_on_reference_change"])
    s.reset_on_reference_change = flag(n["reset_on_reference_change"], "scenario.reset_on_reference_change");
}

void apply_pipeline(const YAML::Node& n, PipelineParams& p) {
  only_keys(n, "pipeline", {"l", "k0", "k1", "sigma", "p", "tau_inf", "t_start", "pair_scale"});
  auto pos = [&](const char* k, double& dst) {
    if (!n[k]) return;
    dst = num(n[k], std::string("pipeline.") + k);
    positive(dst, std::string("pipeline.") + k, n[k]);
  };
  pos("l", p.l);
  pos("k0", p.k0);
  pos("k1", p.k1);
  pos("sigma", p.sigma);
  pos("tau_inf", p.tau_inf);
  pos("pair_scale", p.pair_scale);
  if (n["t_start"]) {
    p.t_start = num(n["t_start"], "pipeline.t_start");
    if (p.t_start < 0) bad("pipeline.t_start", n["t_start"], "must be >= 0");
  }
  if (n["p"]) {
    const long v = integer(n["p"], "pipeline.p");
    if (v < 1 || v > 200) bad("pipeline.p", n["p"], "must be in [1, 200]");
    p.p = static_cast<int>(v);
  }
}

void apply_gains(const YAML::Node& n, AdaptGains& g) {
  only_keys(n, "gains", {"gamma0", "gamma1", "rho"});
  if (n["gamma0"]) {
    g.gamma0 = num(n["gamma0"], "gains.gamma0");
    if (g.gamma0 < 1.0) bad("gains.gamma0", n["gamma0"], "must be >= 1");
  }
  if (n["gamma1"]) {
    g.gamma1 = num(n["gamma1"], "gains.gamma1");
    if (g.gamma1 < 0.0) bad("gains.gamma1", n["gamma1"], "must be >= 0");
  }
  if (n["rho"]) {
    g.rho = num(n["rho"], "gains.rho");
    positive(g.rho, "gains.rho", n["rho"]);
  }
}

// ---- emission --------------------------------------------------------------

void emit_matrix(YAML::Emitter& e, const Mat& m) {
  e << YAML::Flow << YAML::BeginSeq;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    e << YAML::Flow << YAML::BeginSeq;
    for (std::size_t j = 0; j < m.cols(); ++j) e << m(i, j);
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
}

const char* kind_name(ReferenceSpec::Kind k) {
  switch (k) {
    case ReferenceSpec::Kind::Constant: return "constant";
    case ReferenceSpec::Kind::Exponential: return "exponential";
    case ReferenceSpec::Kind::Piecewise: return "piecewise";
  }
  return "constant";
}

}  // namespace

std::map<std::string, Scenario> preset_scenarios() {
  return {{"sec4_1", base_sec4_1()}, {"sec4_2", base_sec4_2()}};
}

Scenario preset(const std::string& name) {
  auto all = preset_scenarios();
  auto it = all.find(name);
  if (it == all.end()) fail(ErrorKind::Config, "unknown preset '" + name + "' (known: sec4_1, sec4_2)");
  return it->second;
}

Config parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorKind::Config, "parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                                std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  Config c;
  if (root.IsNull()) fail(ErrorKind::Config, "empty configuration");
  only_keys(root, "", {"preset", "out", "decimate", "emit", "scenario", "pipeline", "gains"});
  if (root["preset"]) {
    c.preset = root["preset"].as<std::string>();
    try {
      c.scenario = preset(c.preset);
    } catch (const Error&) {
      bad("preset", root["preset"], "unknown preset '" + c.preset + "'");
    }
  } else {
    // pipeline and gain defaults come from PipelineParams / AdaptGains
    c.scenario = Scenario{};
  }
  if (root["scenario"]) apply_scenario(root["scenario"], c.scenario, c.preset.empty());
  else if (c.preset.empty()) fail(ErrorKind::Config, "scenario: required when no preset is given");
  if (root["pipeline"]) apply_pipeline(root["pipeline"], c.scenario.pipeline);
  if (root["gains"]) apply_gains(root["gains"], c.scenario.gains);
  if (root["out"]) c.out_dir = root["out"].as<std::string>();
  if (root["decimate"]) {
    const long d = integer(root["decimate"], "decimate");
    if (d < 1) bad("decimate", root["decimate"], "must be >= 1");
    c.decimate = static_cast<std::size_t>(d);
  }
  if (root["emit"]) {
    const YAML::Node e = root["emit"];
    only_keys(e, "emit", {"trace", "summary", "table1", "spectra"});
    if (e["trace"]) c.emit.trace = flag(e["trace"], "emit.trace");
    if (e["summary"]) c.emit.summary = flag(e["summary"], "emit.summary");
    if (e["table1"]) c.emit.table1 = flag(e["table1"], "emit.table1");
    if (e["spectra"]) c.emit.spectra = flag(e["spectra"], "emit.spectra");
  }
  Scenario& s = c.scenario;
  if (s.x0.rows() >= s.plant.A_p.rows() && s.x0.cols() == 1) s.plant.x_p0 = top_rows(s.x0, s.plant.A_p.rows());
  try {
    validate(s);
    augment(s.plant, s.vartheta);
    validate_weights(s.weights, s.plant.A_p.rows() + s.plant.B_p.cols(), s.plant.B_p.cols());
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("scenario: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const Config& c) {
  const Scenario& s = c.scenario;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  if (!c.preset.empty()) e << YAML::Key << "preset" << YAML::Value << c.preset;
  e << YAML::Key << "out" << YAML::Value << c.out_dir;
  e << YAML::Key << "decimate" << YAML::Value << static_cast<unsigned long>(c.decimate);
  e << YAML::Key << "emit" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "trace" << YAML::Value << c.emit.trace;
  e << YAML::Key << "summary" << YAML::Value << c.emit.summary;
  e << YAML::Key << "table1" << YAML::Value << c.emit.table1;
  e << YAML::Key << "spectra" << YAML::Value << c.emit.spectra;
  e << YAML::EndMap;

  e << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "A_p" << YAML::Value;
  emit_matrix(e, s.plant.A_p);
  e << YAML::Key << "B_p" << YAML::Value;
  emit_matrix(e, s.plant.B_p);
  e << YAML::Key << "C_p" << YAML::Value;
  emit_matrix(e, s.plant.C_p);
  e << YAML::EndMap;
  e << YAML::Key << "vartheta" << YAML::Value << s.vartheta;
  e << YAML::Key << "weights" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "Q" << YAML::Value;
  emit_matrix(e, s.weights.Q);
  e << YAML::Key << "R" << YAML::Value;
  emit_matrix(e, s.weights.R);
  e << YAML::EndMap;
  e << YAML::Key << "x0" << YAML::Value;
  emit_matrix(e, s.x0);
  e << YAML::Key << "theta_hat0" << YAML::Value;
  emit_matrix(e, s.theta_hat0);
  e << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << kind_name(s.reference.kind);
  if (s.reference.kind == ReferenceSpec::Kind::Piecewise) {
    e << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
    for (const auto& [t, v] : s.reference.schedule) {
      e << YAML::BeginMap << YAML::Key << "t" << YAML::Value << t << YAML::Key << "value" << YAML::Value;
      emit_matrix(e, v);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  } else {
    e << YAML::Key << "value" << YAML::Value;
    emit_matrix(e, s.reference.value);
    if (s.reference.kind == ReferenceSpec::Kind::Exponential)
      e << YAML::Key << "rate" << YAML::Value << s.reference.rate;
  }
  e << YAML::EndMap;
  e << YAML::Key << "duration" << YAML::Value << s.duration;
  e << YAML::Key << "dt" << YAML::Value << s.dt;
  e << YAML::Key << "reset_on_reference_change" << YAML::Value << s.reset_on_reference_change;
  e << YAML::EndMap;

  const PipelineParams& p = s.pipeline;
  e << YAML::Key << "pipeline" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "l" << YAML::Value << p.l;
  e << YAML::Key << "k0" << YAML::Value << p.k0;
  e << YAML::Key << "k1" << YAML::Value << p.k1;
  e << YAML::Key << "sigma" << YAML::Value << p.sigma;
  e << YAML::Key << "p" << YAML::Value << p.p;
  e << YAML::Key << "tau_inf" << YAML::Value << p.tau_inf;
  e << YAML::Key << "t_start" << YAML::Value << p.t_start;
  e << YAML::Key << "pair_scale" << YAML::Value << p.pair_scale;
  e << YAML::EndMap;

  e << YAML::Key << "gains" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "gamma0" << YAML::Value << s.gains.gamma0;
  e << YAML::Key << "gamma1" << YAML::Value << s.gains.gamma1;
  e << YAML::Key << "rho" << YAML::Value << s.gains.rho;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void write_trace_csv(const Trace& trace, const std::string& path, std::size_t decimate) {
  if (decimate == 0) fail(ErrorKind::Parameter, "decimation must be >= 1");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write trace to " + path);
  out << "t";
  for (const auto& n : trace.names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < trace.t.size(); k += decimate) {
    out << format_double(trace.t[k]);
    for (const auto& c : trace.columns) out << ',' << format_double(c[k]);
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "error while writing " + path);
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read trace " + path);
  Trace tr;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Trace, "trace file " + path + " has no header");
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "t") fail(ErrorKind::Trace, "trace header must start with t");
    while (std::getline(ss, cell, ',')) tr.names.push_back(cell);
  }
  tr.columns.assign(tr.names.size(), {});
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (vals.size() != tr.names.size() + 1)
      fail(ErrorKind::Trace, path + " row " + std::to_string(row) + " has " + std::to_string(vals.size()) + " fields");
    tr.t.push_back(vals[0]);
    for (std::size_t i = 0; i < tr.names.size(); ++i) tr.columns[i].push_back(vals[i + 1]);
  }
  return tr;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream o;
  o << "final_theta_err=" << format_double(s.final_theta_err) << '\n'
    << "final_eref_err=" << format_double(s.final_eref_err) << '\n'
    << "initial_theta_err=" << format_double(s.initial_theta_err) << '\n'
    << "activation_theta_err=" << format_double(s.activation_theta_err) << '\n'
    << "monotone_fraction=" << format_double(s.monotone_fraction) << '\n'
    << "omega_peak=" << format_double(s.omega_peak) << '\n'
    << "activation_time=" << (s.activation_time ? format_double(*s.activation_time) : std::string("none")) << '\n'
    << "cost_adaptive=" << format_double(s.cost_adaptive) << '\n'
    << "cost_ideal=" << format_double(s.cost_ideal) << '\n'
    << "cost_gap=" << format_double(s.cost_gap) << '\n'
    << "xi_peak=" << format_double(s.xi_peak) << '\n'
    << "xi_tail_max=" << format_double(s.xi_tail_max) << '\n'
    << "eref_max=" << format_double(s.eref_max) << '\n'
    << "theta_err_max=" << format_double(s.theta_err_max) << '\n'
    << "ticks=" << s.ticks << '\n'
    << "overflow_flag=" << (s.overflow_flag ? "true" : "false") << '\n';
  return o.str();
}

void write_summary(const RunSummary& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write summary to " + path);
  out << format_summary(s);
}

}  // namespace alq
