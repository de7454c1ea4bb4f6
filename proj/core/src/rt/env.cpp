#include "fcbench/rt/env.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <sys/utsname.h>

#include "fcbench/rt/policy.hpp"

namespace fcbench::rt {

namespace {

std::optional<std::string> read_first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  std::getline(in, line);
  if (!in && line.empty()) return std::nullopt;
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) {
    line.pop_back();
  }
  return line;
}

// "2-3,5" -> {2,3,5}
std::vector<int> parse_cpu_list(const std::string& text) {
  std::vector<int> cpus;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        cpus.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, dash));
        const int hi = std::stoi(part.substr(dash + 1));
        for (int c = lo; c <= hi; ++c) cpus.push_back(c);
      }
    } catch (const std::exception&) {
      // unreadable chunk: skip, never fatal
    }
  }
  return cpus;
}

bool contains(const std::string& haystack, const char* needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

EnvReport detect_environment() {
  EnvReport env;

  utsname uts{};
  if (::uname(&uts) == 0) env.kernel_release = uts.release;

  if (auto rt = read_first_line("/sys/kernel/realtime"); rt && *rt == "1") {
    env.realtime_kernel = true;
  } else if (auto ver = read_first_line("/proc/version");
             ver && (contains(*ver, "PREEMPT_RT") || contains(*ver, "PREEMPT RT"))) {
    env.realtime_kernel = true;
  } else if (contains(env.kernel_release, "-rt") || contains(env.kernel_release, "realtime")) {
    env.realtime_kernel = true;
  }

  env.online_cpus = online_cpu_count();
  env.governors.reserve(static_cast<std::size_t>(env.online_cpus));
  for (int cpu = 0; cpu < env.online_cpus; ++cpu) {
    const std::string path = "/sys/devices/system/cpu/cpu" + std::to_string(cpu) +
                             "/cpufreq/scaling_governor";
    env.governors.push_back(read_first_line(path).value_or("unknown"));
  }

  if (auto iso = read_first_line("/sys/devices/system/cpu/isolated"); iso && !iso->empty()) {
    env.isolated_cpus = parse_cpu_list(*iso);
  }

  if (auto thr = read_first_line("/proc/sys/kernel/sched_rt_runtime_us")) {
    env.rt_throttle = (*thr == "-1") ? "disabled" : (*thr + " us");
  } else {
    env.rt_throttle = "unknown";
  }
  return env;
}

std::string describe(const EnvReport& env) {
  std::ostringstream os;
  os << "kernel:        " << (env.kernel_release.empty() ? "unknown" : env.kernel_release)
     << "\n"
     << "realtime:      " << (env.realtime_kernel ? "yes (PREEMPT_RT)" : "no") << "\n"
     << "online cpus:   " << env.online_cpus << "\n";
  os << "governors:     ";
  if (env.governors.empty()) {
    os << "unknown";
  } else {
    for (std::size_t i = 0; i < env.governors.size(); ++i) {
      if (i) os << ", ";
      os << "cpu" << i << "=" << env.governors[i];
    }
  }
  os << "\nisolated cpus: ";
  if (env.isolated_cpus.empty()) {
    os << "none";
  } else {
    for (std::size_t i = 0; i < env.isolated_cpus.size(); ++i) {
      if (i) os << ",";
      os << env.isolated_cpus[i];
    }
  }
  os << "\nrt throttling: " << env.rt_throttle << "\n";
  return os.str();
}

}  // namespace fcbench::rt
