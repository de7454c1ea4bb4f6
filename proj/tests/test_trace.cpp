#include <doctest.h>

#include <random>
#include <sstream>

#include "fcbench/trace/activation.hpp"
#include "fcbench/trace/parser.hpp"

using namespace fcbench::trace;

namespace {

const std::filesystem::path kFixtures{FCBENCH_FIXTURE_DIR};

std::vector<ActivationRecord> complete_only(const std::vector<ActivationRecord>& records) {
  std::vector<ActivationRecord> out;
  for (const auto& r : records) {
    if (r.complete()) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("parser: single sched_wakeup line") {
  std::istringstream in(
      "          <idle>-0     [002]  100.000002: sched_wakeup: comm=fcs pid=812 prio=1 "
      "target_cpu=002\n");
  const auto parsed = parse_trace(in);
  REQUIRE(parsed.events.size() == 1);
  const TraceEvent& ev = parsed.events[0];
  CHECK(ev.kind == EventKind::sched_wakeup);
  CHECK(ev.attr("comm") == "fcs");
  CHECK(ev.cpu == 2);
  CHECK(ev.timestamp_ns == 100'000'002'000);
  CHECK(ev.emitter == "<idle>");
  CHECK(parsed.skipped_lines == 0);
}

TEST_CASE("parser: perf-style subsystem prefix and flag fields") {
  std::istringstream in(
      "  fcs  812 [002] d.h1.  56.001200: sched:sched_switch: prev_comm=fcs prev_pid=812 "
      "prev_prio=1 prev_state=S ==> next_comm=swapper/2 next_pid=0 next_prio=120\n");
  const auto parsed = parse_trace(in);
  REQUIRE(parsed.events.size() == 1);
  CHECK(parsed.events[0].kind == EventKind::sched_switch);
  CHECK(parsed.events[0].attr("next_comm") == "swapper/2");
  CHECK(parsed.events[0].attr("prev_comm") == "fcs");
}

TEST_CASE("parser: empty input yields an empty list") {
  std::istringstream in("");
  const auto parsed = parse_trace(in);
  CHECK(parsed.events.empty());
  CHECK(parsed.skipped_lines == 0);
}

TEST_CASE("parser: garbage lines are counted and skipped, never fatal") {
  std::istringstream in(
      "not a trace line\n"
      "          <idle>-0     [002]  1.000000: irq_handler_entry: irq=161 name=arch_timer\n"
      "%%%%\n"
      "          <idle>-0     [002]  1.000002: sched_wakeup: comm=fcs pid=1 prio=1\n"
      "          <idle>-0     [002]  1.000004: sched_switch: prev_comm=swapper/2 "
      "prev_pid=0 prev_prio=120 prev_state=R ==> next_comm=fcs next_pid=1 next_prio=1\n");
  const auto parsed = parse_trace(in);
  CHECK(parsed.events.size() == 3);
  CHECK(parsed.skipped_lines == 2);
}

TEST_CASE("parser: comments and blank lines are ignored without counting") {
  std::istringstream in(
      "# tracer: nop\n"
      "#\n"
      "\n"
      "          <idle>-0     [001]  2.000000: irq_handler_entry: irq=30 name=timer\n");
  const auto parsed = parse_trace(in);
  CHECK(parsed.events.size() == 1);
  CHECK(parsed.skipped_lines == 0);
}

TEST_CASE("parser: output is non-decreasing in timestamp") {
  std::istringstream in(
      "          a-1     [000]  5.000002: sched_wakeup: comm=x pid=2 prio=1\n"
      "          b-2     [000]  5.000001: irq_handler_entry: irq=1 name=t\n");
  const auto parsed = parse_trace(in);
  REQUIRE(parsed.events.size() == 2);
  CHECK(parsed.events[0].timestamp_ns <= parsed.events[1].timestamp_ns);
}

TEST_CASE("parser totality: arbitrary byte soup never throws") {
  std::mt19937_64 rng(0xbadc0de);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> len(0, 200);
  for (int trial = 0; trial < 200; ++trial) {
    std::string blob;
    const int lines = 1 + static_cast<int>(rng() % 8);
    for (int l = 0; l < lines; ++l) {
      const int n = len(rng);
      for (int i = 0; i < n; ++i) {
        char c = static_cast<char>(byte(rng));
        if (c == '\n') c = ' ';
        blob.push_back(c);
      }
      blob.push_back('\n');
    }
    std::istringstream in(blob);
    ParsedTrace parsed;
    CHECK_NOTHROW(parsed = parse_trace(in));
    for (std::size_t i = 1; i < parsed.events.size(); ++i) {
      CHECK(parsed.events[i - 1].timestamp_ns <= parsed.events[i].timestamp_ns);
    }
  }
}

TEST_CASE("direct fixture: one direct record at 7 us") {
  const auto parsed = parse_trace_file(kFixtures / "trace_direct_rt.txt");
  CHECK(parsed.skipped_lines == 0);
  const auto records = classify_activations(parsed.events, "fcs");
  REQUIRE(records.size() == 1);
  const ActivationRecord& r = records[0];
  CHECK(r.path == ActivationPath::direct);
  CHECK(r.intermediaries.empty());
  CHECK(r.wakeup_latency_us() == 7.0);
  CHECK(r.context_switches == 1);
  REQUIRE(r.exec_span_us().has_value());
  CHECK(*r.exec_span_us() == doctest::Approx(3.8));
}

TEST_CASE("deferred fixture: one deferred record at 117 us through ktimers") {
  const auto parsed = parse_trace_file(kFixtures / "trace_deferred_std.txt");
  CHECK(parsed.skipped_lines == 0);
  const auto records = classify_activations(parsed.events, "fcs");
  REQUIRE(records.size() == 1);
  const ActivationRecord& r = records[0];
  CHECK(r.path == ActivationPath::deferred);
  REQUIRE(r.intermediaries.size() == 1);
  CHECK(r.intermediaries[0] == "ktimers");
  CHECK(r.wakeup_latency_us() == 117.0);
  CHECK(r.context_switches >= 2);
  REQUIRE(r.exec_span_us().has_value());
  CHECK(*r.exec_span_us() == doctest::Approx(51.0));
}

TEST_CASE("latency additivity: the chain deltas sum to the wakeup latency") {
  const auto parsed = parse_trace_file(kFixtures / "trace_deferred_std.txt");
  const auto records = classify_activations(parsed.events, "fcs");
  REQUIRE(records.size() == 1);
  // sum of inter-event deltas from the IRQ to exec begin telescopes
  std::int64_t prev = -1, sum = 0;
  for (const auto& ev : parsed.events) {
    if (ev.timestamp_ns < records[0].irq_time_ns) continue;
    if (ev.timestamp_ns > records[0].exec_begin_ns) break;
    if (prev >= 0) sum += ev.timestamp_ns - prev;
    prev = ev.timestamp_ns;
  }
  CHECK(std::abs(static_cast<double>(sum) / 1000.0 - records[0].wakeup_latency_us()) <= 1.0);
}

TEST_CASE("irq with no task activation yields one incomplete record") {
  std::istringstream in(
      "          <idle>-0     [002]  9.000000: irq_handler_entry: irq=161 name=arch_timer\n"
      "          <idle>-0     [002]  9.000003: sched_wakeup: comm=someone pid=7 prio=20\n");
  const auto parsed = parse_trace(in);
  const auto records = classify_activations(parsed.events, "fcs");
  REQUIRE(records.size() == 1);
  CHECK(records[0].path == ActivationPath::incomplete);
  CHECK_FALSE(records[0].complete());
}

TEST_CASE("classification soundness: deferred exactly when intermediaries non-empty") {
  const auto parsed = parse_trace_file(kFixtures / "trace_mixed.txt");
  const auto records = classify_activations(parsed.events, "fcs");
  for (const auto& r : complete_only(records)) {
    CHECK((r.path == ActivationPath::deferred) == !r.intermediaries.empty());
  }
}

TEST_CASE("mixed fixture matches its hand-labeled classification") {
  const auto parsed = parse_trace_file(kFixtures / "trace_mixed.txt");
  CHECK(parsed.skipped_lines == 2);
  const auto records = classify_activations(parsed.events, "fcs");

  std::vector<double> direct_lat, deferred_lat;
  std::size_t incomplete = 0;
  for (const auto& r : records) {
    switch (r.path) {
      case ActivationPath::direct: direct_lat.push_back(r.wakeup_latency_us()); break;
      case ActivationPath::deferred: deferred_lat.push_back(r.wakeup_latency_us()); break;
      case ActivationPath::incomplete: ++incomplete; break;
    }
  }
  CHECK(direct_lat.size() == 6);
  CHECK(deferred_lat.size() == 4);
  CHECK(incomplete == 1);

  std::sort(direct_lat.begin(), direct_lat.end());
  std::sort(deferred_lat.begin(), deferred_lat.end());
  CHECK(direct_lat.front() == 6.0);
  CHECK(direct_lat.back() == 11.0);
  CHECK(deferred_lat[1] == 117.0);  // nearest-rank median of 4
}

TEST_CASE("exec_dilation: fixture spans give the 13x-scale ratio") {
  const auto direct = classify_activations(
      parse_trace_file(kFixtures / "trace_direct_rt.txt").events, "fcs");
  const auto deferred = classify_activations(
      parse_trace_file(kFixtures / "trace_deferred_std.txt").events, "fcs");
  const DilationReport rep = exec_dilation(direct, deferred);
  CHECK(rep.exec_time_a_us == doctest::Approx(3.8));
  CHECK(rep.exec_time_b_us == doctest::Approx(51.0));
  CHECK(rep.ratio == doctest::Approx(13.42).epsilon(0.01));
}

TEST_CASE("exec_dilation: identical sides give ratio 1") {
  const auto records = classify_activations(
      parse_trace_file(kFixtures / "trace_direct_rt.txt").events, "fcs");
  const DilationReport rep = exec_dilation(records, records);
  CHECK(rep.ratio == doctest::Approx(1.0));
}

TEST_CASE("exec_dilation: randomized spans equal the brute-force median quotient") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> span_us(1.0, 80.0);

  const auto make_side = [&](std::size_t count) {
    std::vector<ActivationRecord> side;
    std::vector<double> spans;
    for (std::size_t i = 0; i < count; ++i) {
      ActivationRecord r;
      r.path = ActivationPath::direct;
      r.irq_time_ns = static_cast<std::int64_t>(i) * 1'000'000;
      r.switch_in_time_ns = r.irq_time_ns + 4000;
      r.exec_begin_ns = r.switch_in_time_ns + 2000;
      const double s = span_us(rng);
      r.exec_end_ns = r.switch_in_time_ns + static_cast<std::int64_t>(s * 1000.0);
      side.push_back(r);
      spans.push_back(*side.back().exec_span_us());
    }
    std::sort(spans.begin(), spans.end());
    const double median = spans[(spans.size() + 1) / 2 - 1];
    return std::pair(side, median);
  };

  for (int trial = 0; trial < 50; ++trial) {
    const auto [a, ma] = make_side(1 + rng() % 40);
    const auto [b, mb] = make_side(1 + rng() % 40);
    const DilationReport rep = exec_dilation(a, b);
    CHECK(rep.exec_time_a_us == ma);
    CHECK(rep.exec_time_b_us == mb);
    CHECK(rep.ratio == mb / ma);
  }
}

TEST_CASE("exec_dilation: a side without spans is an error") {
  ActivationRecord bare;
  bare.path = ActivationPath::direct;  // no exec_end -> no span
  const std::vector<ActivationRecord> empty_side{bare};
  const auto full = classify_activations(
      parse_trace_file(kFixtures / "trace_direct_rt.txt").events, "fcs");
  CHECK_THROWS_AS(exec_dilation(empty_side, full), std::invalid_argument);
}

TEST_CASE("activation csv/json writers") {
  const auto records = classify_activations(
      parse_trace_file(kFixtures / "trace_mixed.txt").events, "fcs");
  const auto dir = std::filesystem::temp_directory_path() / "fcbench-trace-test";
  std::filesystem::create_directories(dir);
  write_activations_csv(dir / "activations.csv", records);
  write_activations_json(dir / "activations.json", records);
  CHECK(std::filesystem::file_size(dir / "activations.csv") > 0);
  CHECK(std::filesystem::file_size(dir / "activations.json") > 0);
  std::filesystem::remove_all(dir);
}
