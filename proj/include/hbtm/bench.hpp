#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbtm/config.hpp"
#include "hbtm/events.hpp"
#include "hbtm/monitor.hpp"
#include "hbtm/table.hpp"
#include "hbtm/workloads.hpp"

namespace hbtm {

/// One experiment: a workload swept over heart-rate targets, with baseline
/// (uninstrumented) and instrumented repetitions interleaved.
struct ExperimentConfig {
    WorkloadSpec workload;
    Mode mode = Mode::Centralized;
    std::vector<double> rate_targets{1000.0};  // beats/s
    int repetitions = 3;
    std::vector<InjectionSpec> injections;
    std::string out_dir;  // empty: report files are not written
    uint64_t seed = 1;    // fixes the per-repetition injection schedules

    /// Throws ConfigError: timing experiments need >= 3 repetitions, at
    /// least one positive rate target, and a valid workload.
    void validate() const;
};

struct LatencySample {
    BehaviorState behavior = BehaviorState::BusyWaiting;
    int target_thread = 0;
    bool detected = false;     // false = NotDetected
    double latency_ms = -1.0;  // valid when detected

    friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

struct QueryCount {
    int detector_id = 0;  // kCentralMonitorId for the central monitor
    uint64_t count = 0;

    friend bool operator==(const QueryCount&, const QueryCount&) = default;
};

struct QueryStats {
    std::vector<QueryCount> per_detector;  // sorted by detector_id
    uint64_t total = 0;
    uint64_t max_per_detector = 0;
};

/// Metrics for one heart-rate target.
struct RateMetrics {
    double target_rate = 0.0;
    double achieved_rate = 0.0;  // median measured beats/s per thread
    double e_alpha_s = 0.0;      // median instrumented wall time
    double overhead = 0.0;       // (e_alpha - e_beta) / e_beta, bit-exact
    std::vector<LatencySample> latencies;  // one per injection per repetition
    std::vector<QueryCount> queries;       // per detector, first repetition

    friend bool operator==(const RateMetrics&, const RateMetrics&) = default;
};

struct MetricsReport {
    std::string workload;
    Mode mode = Mode::Centralized;
    int thread_count = 0;
    int repetitions = 0;
    uint64_t seed = 0;
    double e_beta_s = 0.0;  // median baseline wall time
    std::vector<RateMetrics> rows;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Eq.-style relative slowdown. Throws ZeroBaseline when e_beta_s <= 0.
double compute_overhead(double e_alpha_s, double e_beta_s);

/// Per-injection detection latency: the first event reporting the injected
/// state on the target thread at or after the actual trigger instant, minus
/// that instant. Injections that never fired or were never detected come
/// back with detected = false.
std::vector<LatencySample> measure_latency(const std::vector<DetectionEvent>& events,
                                           const std::vector<InjectionOutcome>& injections);

/// Queries grouped by detector (a detector's query count equals its event
/// count by construction).
QueryStats count_queries(const std::vector<DetectionEvent>& events);

/// Median; empty input -> 0. Sorted copy, midpoint average for even sizes.
double median(std::vector<double> values);

/// Deterministic frozen-trace detection: replays monitor ticks over a loaded
/// table on the detection-period grid, spanning the trace's first heartbeat
/// to its last (ticks never extend past the evidence, so healthy traces
/// yield exact per-period query counts; a behavior episode inside a trace is
/// covered as long as some thread kept beating past it). Every tick
/// classifies through the same code path as live monitors. `liveness`
/// defaults to everyone-alive (a log cannot distinguish a blocked thread
/// from a crashed one; ring walks treat both as not-alive either way).
struct ReplayResult {
    std::vector<DetectionEvent> events;
    QueryStats queries;
    int64_t periods = 0;  // ticks replayed
};
ReplayResult replay_detection(const HeartbeatTable& table, const MonitorConfig& config,
                              const LivenessOracle& liveness = {});

/// Run the full experiment: interleaved baseline/instrumented repetitions,
/// median times, per-target metrics; verifies uninjected kernel results
/// against the sequential reference (WorkloadFailure). Writes report.json,
/// report.csv, overhead_vs_rate.csv, latency_vs_rate.csv and queries.csv
/// into config.out_dir when set.
MetricsReport run_experiment(const ExperimentConfig& config);

/// Report persistence. JSON round-trips the full report; the CSV carries the
/// scalar fields (one row per rate target) and round-trips those.
void write_report_files(const MetricsReport& report, const std::string& out_dir);
std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& json_text);
std::string report_to_csv(const MetricsReport& report);
MetricsReport report_from_csv(const std::string& csv_text);

/// Detection period used for a given heart-rate target: a few beats per
/// period (4000/rate ms), clamped to [1, 100] ms. Faster beating thus gets
/// faster polling, trading overhead for latency, without waking the monitor
/// for every single beat.
int64_t detection_period_for_rate(double rate);

}  // namespace hbtm
