#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "fcbench/control/loop.hpp"
#include "fcbench/rt/policy.hpp"
#include "fcbench/stress/profile.hpp"

namespace fcbench::tool {

// Flat key=value configuration file ('#' comments, blank lines ignored).
// CLI flags override file values; file values override built-in defaults.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig load(const std::filesystem::path& path);  // throws on I/O error

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::optional<long> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<control::Vec3> get_vec3(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Fully resolved configuration of one measurement run.
struct RunSettings {
  rt::TaskSpec task;
  bool stress_on{false};
  stress::StressProfile stress = [] {
    stress::StressProfile p;
    p.allowed_cores.clear();  // resolved against the measurement core at run time
    return p;
  }();
  control::VehicleParams vehicle;
  control::ControllerGains gains;
  int outer_divisor{5};
  std::size_t warmup{0};
  std::string label;
  std::filesystem::path output_dir;  // empty: derived from output root + label
  double cooldown_s{5.0};
  std::optional<std::uint64_t> shuffle_seed;

  // echo of every resolved knob, embedded into stats.json
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// Applies the config-file keys onto defaults. Vehicle/gain keys are shared by
// every subcommand that instantiates the control payload.
void apply_config(const KeyValueConfig& cfg, RunSettings& settings);

// Output root: --output beats the config, which beats $FCBENCH_OUT, which
// beats ./fcbench-out.
std::filesystem::path resolve_output_root(const KeyValueConfig& cfg,
                                          const std::string& cli_output);

std::string default_label(const rt::SchedPolicy& policy, bool stress_on);

}  // namespace fcbench::tool
