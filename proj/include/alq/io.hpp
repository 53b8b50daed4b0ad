#pragma once

#include <map>
#include <string>

#include "alq/sim.hpp"

namespace alq {

struct EmitFlags {
  bool trace = true;
  bool summary = true;
  bool table1 = false;
  bool spectra = false;
  bool operator==(const EmitFlags&) const = default;
};

struct Config {
  std::string preset;  // empty for a fully inline scenario
  Scenario scenario;
  std::string out_dir = ".";
  EmitFlags emit;
  std::size_t decimate = 100;
  bool operator==(const Config&) const = default;
};

std::map<std::string, Scenario> preset_scenarios();
Scenario preset(const std::string& name);

// YAML. Unknown keys are rejected; errors carry line/column or the offending key.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string emit_config(const Config& c);

// Header row `t,<channels>`, every `decimate`-th sample, %.17g, LF endings.
void write_trace_csv(const Trace& trace, const std::string& path, std::size_t decimate = 100);
Trace read_trace_csv(const std::string& path);

std::string format_summary(const RunSummary& s);
void write_summary(const RunSummary& s, const std::string& path);

std::string format_double(double v);

}  // namespace alq
