#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "drrp/scenario.hpp"
#include "drrp/spar.hpp"

namespace drrp {

/// Minimal INI reader: [section] headers, key = value pairs, '#' or ';'
/// comments, blank lines ignored. Keys are unique per section.
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  long get_int(const std::string& section, const std::string& key,
               long fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
};

/// Throws std::invalid_argument on malformed lines or duplicate keys.
IniFile parse_ini(std::istream& in);

/// Everything an experiment suite needs: benchmark family, methods,
/// evaluation protocol, and solver limits.
struct SuiteConfig {
  GridGenParams grid;            // [grid]
  std::vector<Method> methods;   // [methods] list = na, m1, ...
  int instances = 10;            // [eval]
  std::uint64_t base_seed = 1;
  int eval_scenarios = 100;
  int iters = 0;                 // [limits]; 0 = method default (50; m3: 200)
  StepRule step_rule = StepRule::kHarmonic2040;
  double step_c = 0.5;
  double rel_gap = 5e-3;
  double stage1_time_limit_s = 60.0;
  double final_time_limit_s = 1200.0;
  double wall_limit_s = 0.0;
  int snapshot_every = 0;
};

/// Builds a SuiteConfig from a parsed file; unknown keys are rejected so
/// typos fail loudly. Throws std::invalid_argument.
SuiteConfig suite_config_from_ini(const IniFile& ini);

/// A complete, commented example configuration.
std::string example_config();

/// Per-method SPAR settings derived from the suite config.
SparConfig spar_config_for(const SuiteConfig& cfg, Method method,
                           std::uint64_t seed);

}  // namespace drrp
