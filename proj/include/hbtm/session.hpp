#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "hbtm/config.hpp"
#include "hbtm/events.hpp"
#include "hbtm/monitor.hpp"
#include "hbtm/pacing.hpp"
#include "hbtm/table.hpp"

namespace hbtm {

enum class SessionStatus { Initialized, Running, Finished };

struct SessionOptions {
    MonitorConfig config;
    int thread_count = 1;
    uint64_t beats_every = 1;          // initial iterations-between-beats, all threads
    std::string log_path;              // empty: nothing is persisted on finish
    std::string label = "pthread";     // free-form tag recorded in the log header
    double rate_threshold_ratio = 0.05;  // tolerance band as a fraction of the target
    int64_t window_iteration = 100;    // heartbeats per rate-adjustment window
    bool spawn_monitors = true;        // false: tests drive detection via detect_once
};

/// One instrumented application run: the heartbeat table, per-thread pacing,
/// the liveness registry, the monitor threads and the event sink, with a
/// three-state lifecycle (Initialized -> Running -> Finished, Finished is
/// terminal).
///
/// Threading contract: start/finished/heart_rate_adjust from the main thread;
/// generate and mark_thread_exit from each worker's own thread; everything
/// else only reads.
class Session {
public:
    explicit Session(SessionOptions options);
    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    SessionStatus status() const { return status_.load(std::memory_order_acquire); }
    const SessionOptions& options() const { return options_; }
    const MonitorConfig& config() const { return options_.config; }
    int thread_count() const { return options_.thread_count; }

    HeartbeatTable& table() { return table_; }
    const HeartbeatTable& table() const { return table_; }
    BeatPacing& pacing() { return pacing_; }
    EventLog& events() { return events_; }
    ThreadLivenessRegistry& liveness() { return liveness_; }

    /// Register thread ids 0..thread_count-1, move to Running, and (unless
    /// disabled) spawn the mode-appropriate monitor threads.
    void start();

    /// Worker-side heartbeat emission, gated by the thread's current
    /// iterations-between-beats: a beat is emitted once the iteration counter
    /// has advanced a full interval past the previous beat, so call sites may
    /// invoke this every iteration or only every few. Iteration values must
    /// be non-decreasing per thread. Silently dropped unless Running.
    void generate(int thread_id, int64_t loop_id, int64_t iteration);

    /// Worker-side orderly exit marker.
    void mark_thread_exit(int thread_id);

    /// Finish the run: stop heartbeat production, retire monitors, persist
    /// the log. Idempotent; repeat calls return the first outcome. False
    /// means persistence failed.
    bool finished();

    /// One rate-control round: measure the team average, adjust, apply.
    /// Returns the rate the team is paced at afterwards: the target when an
    /// adjustment was applied, the measured average when it was already in
    /// band or the target was rejected, 0 when no thread is alive.
    double heart_rate_adjust(double expected_rate);

    /// Block until every monitor thread has retired (all workers exited, or
    /// finished() was called from elsewhere).
    void wait_monitors();

    /// Deterministic detection pass at an explicit instant: one centralized
    /// tick, or one self-gated tick per worker in decentralized mode.
    /// Detector state (baseline, query counts) persists across calls. Only
    /// meaningful when monitors were not spawned.
    void detect_once(int64_t at_ns);

private:
    void join_monitors();
    std::vector<std::pair<BehaviorState, double>> observe_all(int64_t at_ns) const;

    SessionOptions options_;
    HeartbeatTable table_;
    BeatPacing pacing_;
    ThreadLivenessRegistry liveness_;
    EventLog events_;
    std::vector<int64_t> last_beat_;  // per-thread iteration of the previous beat
    std::atomic<SessionStatus> status_{SessionStatus::Initialized};
    std::atomic<bool> stop_{false};
    bool finish_ok_ = true;
    std::vector<std::thread> monitors_;
    std::mutex join_mutex_;
    std::vector<std::unique_ptr<MonitorState>> detectors_;  // detect_once drivers
};

}  // namespace hbtm
