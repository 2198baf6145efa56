#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "hbtm/classify.hpp"
#include "hbtm/config.hpp"
#include "hbtm/events.hpp"
#include "hbtm/table.hpp"

namespace hbtm {

/// Classifier callback used during ring walks: classify thread `id` as of
/// `now_ns` and also report the heart rate it observed.
using SubjectClassifier =
    std::function<std::pair<BehaviorState, double>(int thread_id, int64_t now_ns)>;

struct RingWalkResult {
    int found_id = 0;                    // first alive thread, or self when none
    std::vector<int> visited;            // ids in visit order
    std::vector<BehaviorState> states;   // state of each visited thread
    std::vector<double> observed_rates;  // rate seen for each visited thread
};

/// Walk clockwise from the successor of `self_id`, classifying each thread
/// until one is alive (Running or BusyWaiting). Dead neighbors are still
/// reported. A full lap with no live thread returns self_id with the lap's
/// states. Throws SingletonRing for rings smaller than two.
RingWalkResult next_alive_neighbor(const HeartbeatTable& table, int self_id,
                                   const SubjectClassifier& classifier, int64_t now_ns);

/// One detector's reusable per-tick state: table wiring, query counter and
/// the trailing comparison reference. Live monitor threads and the
/// deterministic replay driver both advance through the tick functions, so
/// scripted timelines and live runs share one code path.
///
/// The busy-wait reference differs by mode. The centralized monitor sees the
/// whole roster every tick, so it keeps per-subject peer baselines (see
/// BaselineTracker). A ring walker cannot: its walks stop at the first alive
/// neighbor, so it rarely co-observes two healthy threads, and mid-episode
/// the only nonzero rate in sight may be the degraded subject itself. Its
/// one pollution-proof reference is its own trailing rate from when it was
/// last Running, held while it is blocked.
///
/// Every query (a classification of some subject that produces an event)
/// bumps query_count; a detector's query count therefore always equals its
/// event count.
class MonitorState {
public:
    MonitorState(const HeartbeatTable& table, MonitorConfig config, LivenessOracle liveness)
        : table_(&table), config_(std::move(config)), liveness_(std::move(liveness)) {}

    const MonitorConfig& config() const { return config_; }
    double baseline_for(int thread_id) const { return baseline_.baseline_for(thread_id); }
    double self_reference() const { return self_reference_; }
    uint64_t query_count() const { return query_count_; }

    /// Classify one subject as of now_ns without counting it as a query,
    /// using the centralized per-subject baseline.
    std::pair<BehaviorState, double> observe(int thread_id, int64_t now_ns) const;

    /// Centralized tick: one query per registered worker, one event each.
    void tick_centralized(int64_t now_ns, EventLog& sink);

    /// Decentralized tick on behalf of worker `self_id`. The worker first
    /// assesses itself (uncounted: no event, no query), then walks the ring
    /// unless it has exited, failed, or not started; a merely blocked worker
    /// keeps patrolling so a stalled stage cannot blind the ring. Returns
    /// the self state so drivers can retire finished monitors.
    BehaviorState tick_decentralized(int self_id, int64_t now_ns, EventLog& sink);

private:
    std::pair<BehaviorState, double> observe_with(int thread_id, int64_t now_ns,
                                                  double baseline_rate) const;
    std::pair<BehaviorState, double> query(int thread_id, int64_t now_ns);

    const HeartbeatTable* table_;
    MonitorConfig config_;
    LivenessOracle liveness_;
    BaselineTracker baseline_;
    double self_reference_ = 0.0;
    uint64_t query_count_ = 0;
};

/// Blocking centralized monitor loop: every detection period, classify every
/// worker and emit one event per worker. Returns once `stop` is set, the
/// application has exited, or every worker carries an exit marker (the tick
/// that saw the last exit still reports it). Runs on its own thread.
void run_centralized_monitor(const HeartbeatTable& table, const MonitorConfig& config,
                             const LivenessOracle& liveness, EventLog& sink,
                             const std::atomic<bool>& stop);

/// Blocking decentralized monitor loop acting for worker `self_id`: every
/// detection period, one self-gated ring tick. The worker's own heartbeat
/// generation is never touched; detection only reads table snapshots.
/// Returns on stop/application exit like the centralized loop, and also
/// retires as soon as its own worker exits or fails.
void run_decentralized_monitor(const HeartbeatTable& table, const MonitorConfig& config,
                               const LivenessOracle& liveness, int self_id, EventLog& sink,
                               const std::atomic<bool>& stop);

/// Join-state registry backing the default liveness oracle: worker threads
/// hold a Guard for their whole run, so a thread is "alive" exactly while its
/// thread function is on the stack.
class ThreadLivenessRegistry {
public:
    explicit ThreadLivenessRegistry(size_t thread_count) : alive_(thread_count) {
        for (auto& a : alive_) a.store(false, std::memory_order_relaxed);
    }

    class Guard {
    public:
        Guard(ThreadLivenessRegistry& reg, int thread_id) : reg_(reg), thread_id_(thread_id) {
            reg_.set_alive(thread_id_, true);
        }
        ~Guard() { reg_.set_alive(thread_id_, false); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        ThreadLivenessRegistry& reg_;
        int thread_id_;
    };

    void set_alive(int thread_id, bool alive) {
        alive_[static_cast<size_t>(thread_id)].store(alive, std::memory_order_release);
    }

    bool is_alive(int thread_id) const {
        return alive_[static_cast<size_t>(thread_id)].load(std::memory_order_acquire);
    }

    LivenessOracle oracle() const {
        return [this](int thread_id) { return is_alive(thread_id); };
    }

private:
    std::vector<std::atomic<bool>> alive_;
};

}  // namespace hbtm
