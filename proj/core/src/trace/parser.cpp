#include "fcbench/trace/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace fcbench::trace {

namespace {

const std::string kEmpty;

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

// "[002]" -> 2
std::optional<int> parse_cpu_token(const std::string& tok) {
  if (tok.size() < 3 || tok.front() != '[' || tok.back() != ']') return std::nullopt;
  int cpu = 0;
  const auto* first = tok.data() + 1;
  const auto* last = tok.data() + tok.size() - 1;
  auto [ptr, ec] = std::from_chars(first, last, cpu);
  if (ec != std::errc{} || ptr != last || cpu < 0) return std::nullopt;
  return cpu;
}

// "123.456789:" -> nanoseconds
std::optional<std::int64_t> parse_timestamp_token(const std::string& tok) {
  if (tok.size() < 2 || tok.back() != ':') return std::nullopt;
  double seconds = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size() - 1;
  auto [ptr, ec] = std::from_chars(first, last, seconds);
  if (ec != std::errc{} || ptr != last || !(seconds >= 0.0)) return std::nullopt;
  return std::llround(seconds * 1e9);
}

EventKind classify(const std::string& name) {
  if (name == "irq_handler_entry") return EventKind::irq_handler_entry;
  if (name.find("softirq_raise") != std::string::npos) return EventKind::softirq_raise;
  if (name == "sched_wakeup" || name == "sched_wakeup_new") return EventKind::sched_wakeup;
  if (name == "sched_switch") return EventKind::sched_switch;
  if (name.rfind("timer_expire", 0) == 0 || name.rfind("hrtimer_expire", 0) == 0) {
    return EventKind::timer_expire;
  }
  return EventKind::other;
}

std::optional<TraceEvent> parse_line(const std::string& line) {
  const auto tokens = split_ws(line);
  if (tokens.size() < 3) return std::nullopt;

  // locate [cpu]
  std::size_t cpu_idx = tokens.size();
  int cpu = -1;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (auto c = parse_cpu_token(tokens[i])) {
      cpu_idx = i;
      cpu = *c;
      break;
    }
  }
  if (cpu_idx == 0 || cpu_idx == tokens.size()) return std::nullopt;

  // everything before [cpu] is "comm-pid"; comms may contain spaces or dashes,
  // so rejoin and split at the last dash
  std::string task;
  for (std::size_t i = 0; i < cpu_idx; ++i) {
    if (i) task += ' ';
    task += tokens[i];
  }
  const auto dash = task.rfind('-');
  std::string emitter = dash == std::string::npos ? task : task.substr(0, dash);

  // first token after [cpu] that ends in ':' and parses as seconds is the
  // timestamp; tokens between (ftrace flag fields like "d.h.") are skipped
  std::size_t ts_idx = tokens.size();
  std::int64_t ts = 0;
  for (std::size_t i = cpu_idx + 1; i < tokens.size(); ++i) {
    if (auto t = parse_timestamp_token(tokens[i])) {
      ts_idx = i;
      ts = *t;
      break;
    }
  }
  if (ts_idx + 1 >= tokens.size()) return std::nullopt;

  std::string name = tokens[ts_idx + 1];
  if (name.empty() || name.back() != ':') return std::nullopt;
  name.pop_back();
  if (const auto colon = name.rfind(':'); colon != std::string::npos) {
    name = name.substr(colon + 1);  // strip "sched:" style subsystem prefix
  }
  if (name.empty()) return std::nullopt;

  TraceEvent ev;
  ev.timestamp_ns = ts;
  ev.cpu = cpu;
  ev.name = name;
  ev.kind = classify(name);
  ev.emitter = std::move(emitter);

  std::string message;
  for (std::size_t i = ts_idx + 2; i < tokens.size(); ++i) {
    std::string tok = tokens[i];
    if (tok == "==>") continue;
    if (tok.size() > 2 && tok.front() == '[' && tok.back() == ']') {
      tok = tok.substr(1, tok.size() - 2);  // "[action=HRTIMER]"
    }
    const auto eq = tok.find('=');
    if (eq != std::string::npos && eq > 0) {
      ev.attrs[tok.substr(0, eq)] = tok.substr(eq + 1);
    } else {
      if (!message.empty()) message += ' ';
      message += tok;
    }
  }
  if (!message.empty()) ev.attrs["msg"] = std::move(message);
  return ev;
}

}  // namespace

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::irq_handler_entry: return "irq_handler_entry";
    case EventKind::softirq_raise: return "softirq_raise";
    case EventKind::sched_wakeup: return "sched_wakeup";
    case EventKind::sched_switch: return "sched_switch";
    case EventKind::timer_expire: return "timer_expire";
    case EventKind::other: return "other";
  }
  return "?";
}

const std::string& TraceEvent::attr(const std::string& key) const {
  const auto it = attrs.find(key);
  return it == attrs.end() ? kEmpty : it->second;
}

ParsedTrace parse_trace(std::istream& in) {
  ParsedTrace out;
  std::string line;
  while (std::getline(in, line)) {
    const auto non_ws = line.find_first_not_of(" \t\r");
    if (non_ws == std::string::npos) continue;  // blank
    if (line[non_ws] == '#') continue;          // tracer commentary
    try {
      if (auto ev = parse_line(line)) {
        out.events.push_back(std::move(*ev));
      } else {
        ++out.skipped_lines;
      }
    } catch (const std::exception&) {
      ++out.skipped_lines;
    }
  }
  if (in.bad()) throw std::runtime_error("trace stream read error");
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) {
                     return a.timestamp_ns < b.timestamp_ns;
                   });
  return out;
}

ParsedTrace parse_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace file " + path.string());
  return parse_trace(in);
}

}  // namespace fcbench::trace
