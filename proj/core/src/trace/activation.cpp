#include "fcbench/trace/activation.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fcbench::trace {

namespace {

constexpr std::array<const char*, 3> kHousekeepingPrefixes{"ktimers", "ksoftirqd", "kworker"};

bool is_housekeeping(const std::string& comm) {
  for (const char* prefix : kHousekeepingPrefixes) {
    if (comm.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

void add_unique(std::vector<std::string>& list, const std::string& name) {
  if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
}

// Classifies the chain events[begin..end) that starts at an irq_handler_entry.
ActivationRecord classify_chain(std::span<const TraceEvent> chain,
                                const std::string& task_name) {
  ActivationRecord rec;
  rec.cpu = chain.front().cpu;
  rec.irq_time_ns = chain.front().timestamp_ns;

  std::string softirq_vec;
  bool softirq_raised = false;

  for (const TraceEvent& ev : chain.subspan(1)) {
    switch (ev.kind) {
      case EventKind::softirq_raise:
        if (rec.exec_begin_ns < 0) {
          softirq_raised = true;
          if (softirq_vec.empty()) {
            softirq_vec = !ev.attr("action").empty() ? ev.attr("action") : ev.attr("vec");
          }
        }
        break;
      case EventKind::sched_wakeup:
        if (ev.attr("comm") == task_name && rec.wakeup_time_ns < 0) {
          rec.wakeup_time_ns = ev.timestamp_ns;
        } else if (rec.exec_begin_ns < 0 && is_housekeeping(ev.attr("comm"))) {
          add_unique(rec.intermediaries, ev.attr("comm"));
        }
        break;
      case EventKind::sched_switch: {
        const std::string& next = ev.attr("next_comm");
        if (rec.switch_in_time_ns < 0) {
          ++rec.context_switches;  // switches between the IRQ and the task running
          if (next == task_name) {
            rec.switch_in_time_ns = ev.timestamp_ns;
          } else if (is_housekeeping(next)) {
            add_unique(rec.intermediaries, next);
          }
        } else if (!rec.exec_end_ns && ev.attr("prev_comm") == task_name &&
                   ev.timestamp_ns > rec.switch_in_time_ns) {
          rec.exec_end_ns = ev.timestamp_ns;
        }
        break;
      }
      default:
        break;
    }
    // the first event the task itself emits marks execution begin
    if (rec.exec_begin_ns < 0 && ev.emitter == task_name &&
        (rec.switch_in_time_ns >= 0 || rec.wakeup_time_ns >= 0)) {
      rec.exec_begin_ns = ev.timestamp_ns;
    }
  }

  const bool activated = rec.wakeup_time_ns >= 0 || rec.switch_in_time_ns >= 0;
  if (!activated) {
    rec.path = ActivationPath::incomplete;
    return rec;
  }
  if (rec.exec_begin_ns < 0) {
    if (rec.switch_in_time_ns < 0) {
      rec.path = ActivationPath::incomplete;  // woken but never ran inside this chain
      return rec;
    }
    rec.exec_begin_ns = rec.switch_in_time_ns;
  }

  if (rec.intermediaries.empty() && softirq_raised) {
    // softirq handled without a visible helper thread still defers the wake
    add_unique(rec.intermediaries,
               "softirq:" + (softirq_vec.empty() ? std::string("?") : softirq_vec));
  }
  rec.path = rec.intermediaries.empty() ? ActivationPath::direct : ActivationPath::deferred;
  return rec;
}

double median_span(std::span<const ActivationRecord> records) {
  std::vector<double> spans;
  for (const auto& r : records) {
    if (auto s = r.exec_span_us()) spans.push_back(*s);
  }
  if (spans.empty()) {
    throw std::invalid_argument("exec_dilation: side carries no execution spans");
  }
  std::sort(spans.begin(), spans.end());
  return spans[(spans.size() + 1) / 2 - 1];  // nearest-rank median
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

}  // namespace

const char* to_string(ActivationPath p) {
  switch (p) {
    case ActivationPath::direct: return "direct";
    case ActivationPath::deferred: return "deferred";
    case ActivationPath::incomplete: return "incomplete";
  }
  return "?";
}

std::vector<ActivationRecord> classify_activations(std::span<const TraceEvent> events,
                                                   const std::string& task_name) {
  // split by cpu, preserving order
  std::map<int, std::vector<TraceEvent>> per_cpu;
  for (const TraceEvent& ev : events) per_cpu[ev.cpu].push_back(ev);

  std::vector<ActivationRecord> records;
  for (auto& [cpu, stream] : per_cpu) {
    (void)cpu;
    std::vector<std::size_t> irq_starts;
    for (std::size_t i = 0; i < stream.size(); ++i) {
      if (stream[i].kind == EventKind::irq_handler_entry) irq_starts.push_back(i);
    }
    for (std::size_t i = 0; i < irq_starts.size(); ++i) {
      const std::size_t begin = irq_starts[i];
      const std::size_t end = i + 1 < irq_starts.size() ? irq_starts[i + 1] : stream.size();
      records.push_back(classify_chain(
          std::span<const TraceEvent>(stream.data() + begin, end - begin), task_name));
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const ActivationRecord& a, const ActivationRecord& b) {
                     return a.irq_time_ns < b.irq_time_ns;
                   });
  return records;
}

DilationReport exec_dilation(std::span<const ActivationRecord> side_a,
                             std::span<const ActivationRecord> side_b) {
  DilationReport rep;
  rep.exec_time_a_us = median_span(side_a);
  rep.exec_time_b_us = median_span(side_b);
  if (!(rep.exec_time_a_us > 0.0)) {
    throw std::invalid_argument("exec_dilation: zero-length reference span");
  }
  rep.ratio = rep.exec_time_b_us / rep.exec_time_a_us;
  return rep;
}

void write_activations_csv(const std::filesystem::path& path,
                           std::span<const ActivationRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "index,cpu,path,irq_time_ns,wakeup_time_ns,switch_in_ns,exec_begin_ns,"
         "wakeup_latency_us,exec_span_us,context_switches,intermediaries\n";
  std::size_t idx = 0;
  for (const auto& r : records) {
    out << idx++ << ',' << r.cpu << ',' << to_string(r.path) << ',' << r.irq_time_ns << ','
        << r.wakeup_time_ns << ',' << r.switch_in_time_ns << ',' << r.exec_begin_ns << ',';
    if (r.complete()) out << r.wakeup_latency_us();
    out << ',';
    if (auto s = r.exec_span_us()) out << *s;
    out << ',' << r.context_switches << ',' << join(r.intermediaries, ';') << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_activations_json(const std::filesystem::path& path,
                            std::span<const ActivationRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"cpu", r.cpu},
                     {"path", to_string(r.path)},
                     {"irq_time_ns", r.irq_time_ns},
                     {"wakeup_time_ns", r.wakeup_time_ns},
                     {"switch_in_ns", r.switch_in_time_ns},
                     {"exec_begin_ns", r.exec_begin_ns},
                     {"context_switches", r.context_switches},
                     {"intermediaries", r.intermediaries}};
    if (r.complete()) j["wakeup_latency_us"] = r.wakeup_latency_us();
    if (auto s = r.exec_span_us()) j["exec_span_us"] = *s;
    arr.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << arr.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fcbench::trace
