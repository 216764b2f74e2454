#include "drrp/config.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace drrp {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

StepRule step_rule_from_string(const std::string& name) {
  if (name == "harmonic_20_40") return StepRule::kHarmonic2040;
  if (name == "constant") return StepRule::kConstant;
  if (name == "capped_harmonic") return StepRule::kCappedHarmonic;
  throw std::invalid_argument("unknown step rule '" + name + "'");
}

}  // namespace

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string IniFile::get_string(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

long IniFile::get_int(const std::string& section, const std::string& key,
                      long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  std::size_t pos = 0;
  long out = std::stol(v, &pos);
  if (pos != v.size())
    throw std::invalid_argument("bad integer for " + section + "." + key +
                                ": '" + v + "'");
  return out;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key, "");
  std::size_t pos = 0;
  double out = std::stod(v, &pos);
  if (pos != v.size())
    throw std::invalid_argument("bad number for " + section + "." + key +
                                ": '" + v + "'");
  return out;
}

IniFile parse_ini(std::istream& in) {
  IniFile ini;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      ini.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": empty key");
    if (!ini.sections[section].emplace(key, val).second)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
  }
  return ini;
}

SuiteConfig suite_config_from_ini(const IniFile& ini) {
  static const std::set<std::string> known_sections = {"", "grid", "methods",
                                                       "eval", "limits"};
  static const std::map<std::string, std::set<std::string>> known_keys = {
      {"", {}},
      {"grid",
       {"side", "origin_clusters", "dest_clusters", "brackets", "bracket_len",
        "max_duration", "rv_count", "trip_mean_frac", "trip_sd_frac",
        "sv_speed", "station_cap", "rv_capacity", "max_load_action",
        "move_cost", "load_cost", "penalty", "value_low", "value_high"}},
      {"methods", {"list"}},
      {"eval", {"instances", "base_seed", "scenarios"}},
      {"limits",
       {"iters", "step_rule", "step_c", "rel_gap", "stage1_time_limit_s",
        "final_time_limit_s", "wall_limit_s", "snapshot_every"}},
  };
  for (const auto& [name, keys] : ini.sections) {
    if (!known_sections.count(name))
      throw std::invalid_argument("unknown config section [" + name + "]");
    for (const auto& [k, v] : keys)
      if (!known_keys.at(name).count(k))
        throw std::invalid_argument("unknown key '" + k + "' in [" + name +
                                    "]");
  }

  SuiteConfig cfg;
  GridGenParams& g = cfg.grid;
  g.grid_side = static_cast<int>(ini.get_int("grid", "side", g.grid_side));
  g.origin_clusters = static_cast<int>(
      ini.get_int("grid", "origin_clusters", g.origin_clusters));
  g.dest_clusters =
      static_cast<int>(ini.get_int("grid", "dest_clusters", g.dest_clusters));
  g.brackets = static_cast<int>(ini.get_int("grid", "brackets", g.brackets));
  g.bracket_len =
      static_cast<int>(ini.get_int("grid", "bracket_len", g.bracket_len));
  g.max_duration =
      static_cast<int>(ini.get_int("grid", "max_duration", g.max_duration));
  g.rv_count = static_cast<int>(ini.get_int("grid", "rv_count", g.rv_count));
  g.trip_mean_frac =
      ini.get_double("grid", "trip_mean_frac", g.trip_mean_frac);
  g.trip_sd_frac = ini.get_double("grid", "trip_sd_frac", g.trip_sd_frac);
  g.sv_speed = ini.get_double("grid", "sv_speed", g.sv_speed);
  g.station_cap =
      static_cast<int>(ini.get_int("grid", "station_cap", g.station_cap));
  g.rv_capacity =
      static_cast<int>(ini.get_int("grid", "rv_capacity", g.rv_capacity));
  g.max_load_action = static_cast<int>(
      ini.get_int("grid", "max_load_action", g.max_load_action));
  g.move_cost = Money::from_dollars(
      ini.get_double("grid", "move_cost", g.move_cost.dollars()));
  g.load_cost = Money::from_dollars(
      ini.get_double("grid", "load_cost", g.load_cost.dollars()));
  g.penalty = Money::from_dollars(
      ini.get_double("grid", "penalty", g.penalty.dollars()));
  g.value_low = Money::from_dollars(
      ini.get_double("grid", "value_low", g.value_low.dollars()));
  g.value_high = Money::from_dollars(
      ini.get_double("grid", "value_high", g.value_high.dollars()));

  std::string list = ini.get_string("methods", "list", "na, m2-i");
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) cfg.methods.push_back(method_from_string(item));
  }
  if (cfg.methods.empty())
    throw std::invalid_argument("[methods] list is empty");

  cfg.instances =
      static_cast<int>(ini.get_int("eval", "instances", cfg.instances));
  cfg.base_seed = static_cast<std::uint64_t>(
      ini.get_int("eval", "base_seed", static_cast<long>(cfg.base_seed)));
  cfg.eval_scenarios = static_cast<int>(
      ini.get_int("eval", "scenarios", cfg.eval_scenarios));

  cfg.iters = static_cast<int>(ini.get_int("limits", "iters", cfg.iters));
  cfg.step_rule = step_rule_from_string(
      ini.get_string("limits", "step_rule", "harmonic_20_40"));
  cfg.step_c = ini.get_double("limits", "step_c", cfg.step_c);
  cfg.rel_gap = ini.get_double("limits", "rel_gap", cfg.rel_gap);
  cfg.stage1_time_limit_s = ini.get_double("limits", "stage1_time_limit_s",
                                           cfg.stage1_time_limit_s);
  cfg.final_time_limit_s =
      ini.get_double("limits", "final_time_limit_s", cfg.final_time_limit_s);
  cfg.wall_limit_s =
      ini.get_double("limits", "wall_limit_s", cfg.wall_limit_s);
  cfg.snapshot_every = static_cast<int>(
      ini.get_int("limits", "snapshot_every", cfg.snapshot_every));

  if (cfg.instances < 1 || cfg.eval_scenarios < 0 || cfg.iters < 0)
    throw std::invalid_argument("instances/scenarios/iters out of range");
  return cfg;
}

SparConfig spar_config_for(const SuiteConfig& cfg, Method method,
                           std::uint64_t seed) {
  SparConfig sc;
  sc.method = method;
  sc.n_max = cfg.iters > 0 ? cfg.iters : (method == Method::kM3 ? 200 : 50);
  sc.step_rule = cfg.step_rule;
  sc.step_c = cfg.step_c;
  sc.seed = seed;
  sc.rel_gap = cfg.rel_gap;
  sc.stage1_time_limit_s = cfg.stage1_time_limit_s;
  sc.final_time_limit_s = cfg.final_time_limit_s;
  sc.wall_limit_s = cfg.wall_limit_s;
  sc.snapshot_every = cfg.snapshot_every;
  return sc;
}

std::string example_config() {
  return R"(# Experiment suite configuration.
# Square-grid benchmark family; distances live on [0,100]^2.

[grid]
side = 3              # stations = side^2
origin_clusters = 3
dest_clusters = 5
brackets = 6          # demand brackets; horizon = brackets * bracket_len
bracket_len = 2
max_duration = 2      # longest journey, in steps
rv_count = 1          # repositioning vehicles
trip_mean_frac = 0.15 # per-step trips ~ Normal(frac*N, sd_frac*N)
trip_sd_frac = 0.075
sv_speed = 0          # 0 = default 125/sqrt(fleet)
station_cap = 10      # per-station capacity; fill starts at half
rv_capacity = 5
max_load_action = 10  # clamped to rv_capacity * rv_count
move_cost = 0.001     # dollars per RV move (self-loops are free)
load_cost = 0.001     # dollars per SV loaded or unloaded
penalty = 20          # dollars per phantom SV in the recourse
value_low = 0.5       # journey value ~ Uniform(value_low, value_high)
value_high = 1.5

[methods]
list = na, m1, m2-i   # any of: na, m1, m2-r, m2-hi, m2-i, m3

[eval]
instances = 10        # random instances; seeds base_seed, base_seed+1, ...
base_seed = 1
scenarios = 100       # Monte-Carlo evaluation scenarios per plan

[limits]
iters = 0             # 0 = per-method default (50; 200 for m3)
step_rule = harmonic_20_40   # or: constant, capped_harmonic
step_c = 0.5          # step size for the constant rule
rel_gap = 0.005
stage1_time_limit_s = 60
final_time_limit_s = 1200
wall_limit_s = 0      # 0 = unlimited
snapshot_every = 0    # 0 = no slope snapshots
)";
}

}  // namespace drrp
