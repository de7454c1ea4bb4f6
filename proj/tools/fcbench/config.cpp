#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fcbench::tool {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  KeyValueConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);  // '#' starts a comment anywhere on the line
    }
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected key=value");
    }
    cfg.values_[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }
  return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<long> KeyValueConfig::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  try {
    return std::stol(*v);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' is not an integer: " + *v);
  }
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' is not a number: " + *v);
  }
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::string low = *v;
  std::transform(low.begin(), low.end(), low.begin(), ::tolower);
  if (low == "1" || low == "true" || low == "on" || low == "yes") return true;
  if (low == "0" || low == "false" || low == "off" || low == "no") return false;
  throw std::runtime_error("config key '" + key + "' is not a boolean: " + *v);
}

std::optional<control::Vec3> KeyValueConfig::get_vec3(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::istringstream ss(*v);
  std::string part;
  control::Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(ss, part, ',')) {
      throw std::runtime_error("config key '" + key + "' needs three comma-separated values");
    }
    try {
      out[i] = std::stod(trim(part));
    } catch (const std::exception&) {
      throw std::runtime_error("config key '" + key + "' has a non-numeric component: " + part);
    }
  }
  return out;
}

void apply_config(const KeyValueConfig& cfg, RunSettings& s) {
  if (const auto v = cfg.get("policy")) {
    const std::string& p = *v;
    if (p == "other") {
      s.task.policy = rt::OtherPolicy{static_cast<int>(cfg.get_int("nice").value_or(0))};
    } else if (p == "fifo") {
      s.task.policy = rt::FifoPolicy{static_cast<int>(cfg.get_int("prio").value_or(50))};
    } else if (p == "rr") {
      s.task.policy = rt::RoundRobinPolicy{static_cast<int>(cfg.get_int("prio").value_or(50))};
    } else if (p == "deadline") {
      rt::DeadlinePolicy dl;
      dl.runtime_us = static_cast<std::uint64_t>(cfg.get_int("runtime_us").value_or(400));
      dl.deadline_us = static_cast<std::uint64_t>(
          cfg.get_int("deadline_us").value_or(cfg.get_int("period_us").value_or(4000)));
      dl.period_us = static_cast<std::uint64_t>(cfg.get_int("period_us").value_or(4000));
      s.task.policy = dl;
    } else {
      throw std::runtime_error("config: unknown policy '" + p + "'");
    }
  }
  if (const auto v = cfg.get_int("period_us")) s.task.period_us = *v;
  if (const auto v = cfg.get_int("deadline_us")) s.task.deadline_us = *v;
  if (const auto v = cfg.get_int("iterations")) s.task.iterations = static_cast<std::uint64_t>(*v);
  if (const auto v = cfg.get_int("core")) s.task.core = static_cast<int>(*v);
  if (const auto v = cfg.get("memlock")) {
    if (*v == "auto") {
      s.task.memlock = rt::Memlock::attempt;
    } else if (const auto b = cfg.get_bool("memlock")) {
      s.task.memlock = *b ? rt::Memlock::require : rt::Memlock::off;
    }
  }
  if (const auto v = cfg.get_int("warmup")) s.warmup = static_cast<std::size_t>(*v);
  if (const auto v = cfg.get("label")) s.label = *v;
  if (const auto v = cfg.get_int("outer_divisor")) s.outer_divisor = static_cast<int>(*v);
  if (const auto v = cfg.get("output_dir")) s.output_dir = *v;
  if (const auto v = cfg.get_double("matrix.cooldown_s")) s.cooldown_s = *v;
  if (const auto v = cfg.get_int("matrix.shuffle_seed")) {
    s.shuffle_seed = static_cast<std::uint64_t>(*v);
  }

  if (const auto v = cfg.get("stress")) {
    if (*v == "off") {
      s.stress_on = false;
    } else if (*v == "paper" || *v == "on") {
      s.stress_on = true;
    } else {
      throw std::runtime_error("config: stress must be off|paper");
    }
  }
  if (const auto v = cfg.get_int("stress.cpu_workers")) s.stress.cpu_workers = static_cast<int>(*v);
  if (const auto v = cfg.get_int("stress.vm_workers")) s.stress.vm_workers = static_cast<int>(*v);
  if (const auto v = cfg.get_double("stress.vm_fraction")) s.stress.vm_fraction = *v;
  if (const auto v = cfg.get_int("stress.switch_pairs")) s.stress.switch_pairs = static_cast<int>(*v);
  if (const auto v = cfg.get_int("stress.fork_workers")) s.stress.fork_workers = static_cast<int>(*v);
  if (const auto v = cfg.get_int("stress.duration_s")) {
    s.stress.duration = std::chrono::seconds(*v);
  }

  if (const auto v = cfg.get_double("vehicle.mass")) s.vehicle.mass = *v;
  if (const auto v = cfg.get_double("vehicle.gravity")) s.vehicle.gravity = *v;
  if (const auto v = cfg.get_vec3("vehicle.inertia")) s.vehicle.inertia = *v;
  if (const auto v = cfg.get_double("vehicle.arm_length")) s.vehicle.arm_length = *v;
  if (const auto v = cfg.get_double("vehicle.thrust_coeff")) s.vehicle.thrust_coeff = *v;
  if (const auto v = cfg.get_double("vehicle.drag_torque_coeff")) {
    s.vehicle.drag_torque_coeff = *v;
  }
  if (const auto v = cfg.get_double("vehicle.rotor_speed_max")) s.vehicle.rotor_speed_max = *v;
  if (const auto v = cfg.get_vec3("gains.kp_pos")) s.gains.kp_pos = *v;
  if (const auto v = cfg.get_vec3("gains.kd_pos")) s.gains.kd_pos = *v;
  if (const auto v = cfg.get_vec3("gains.kp_att")) s.gains.kp_att = *v;
  if (const auto v = cfg.get_vec3("gains.kd_att")) s.gains.kd_att = *v;
  if (const auto v = cfg.get_vec3("gains.tau_max")) s.gains.tau_max = *v;
}

std::filesystem::path resolve_output_root(const KeyValueConfig& cfg,
                                          const std::string& cli_output) {
  if (!cli_output.empty()) return cli_output;
  if (const auto v = cfg.get("output_dir")) return *v;
  if (const char* env = std::getenv("FCBENCH_OUT"); env && *env) return env;
  return "fcbench-out";
}

std::string default_label(const rt::SchedPolicy& policy, bool stress_on) {
  std::string label = rt::policy_name(policy) + "-";
  std::string param = rt::parameter_label(policy);  // "nice -19" -> "nice-19"
  std::string compact;
  for (char c : param) {
    if (c == ' ') continue;
    compact.push_back(c);
  }
  label += compact;
  label += stress_on ? "-stress" : "-idle";
  return label;
}

std::vector<std::pair<std::string, std::string>> RunSettings::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("policy", rt::policy_name(task.policy));
  kv.emplace_back("parameters", rt::parameter_label(task.policy));
  kv.emplace_back("period_us", std::to_string(task.period_us));
  kv.emplace_back("deadline_us", std::to_string(task.deadline_us));
  kv.emplace_back("iterations", std::to_string(task.iterations));
  kv.emplace_back("core", std::to_string(task.core));
  kv.emplace_back("memlock", task.memlock == rt::Memlock::off
                                 ? "off"
                                 : (task.memlock == rt::Memlock::require ? "on" : "auto"));
  kv.emplace_back("warmup", std::to_string(warmup));
  kv.emplace_back("outer_divisor", std::to_string(outer_divisor));
  kv.emplace_back("stress", stress_on ? "paper" : "off");
  if (stress_on) {
    kv.emplace_back("stress.cpu_workers", std::to_string(stress.cpu_workers));
    kv.emplace_back("stress.vm_workers", std::to_string(stress.vm_workers));
    kv.emplace_back("stress.vm_fraction", std::to_string(stress.vm_fraction));
    kv.emplace_back("stress.switch_pairs", std::to_string(stress.switch_pairs));
    kv.emplace_back("stress.fork_workers", std::to_string(stress.fork_workers));
  }
  kv.emplace_back("vehicle.mass", std::to_string(vehicle.mass));
  kv.emplace_back("vehicle.gravity", std::to_string(vehicle.gravity));
  kv.emplace_back("label", label);
  return kv;
}

}  // namespace fcbench::tool
