#pragma once

#include <functional>
#include <unordered_map>

#include "hbtm/behavior.hpp"
#include "hbtm/config.hpp"
#include "hbtm/sequence.hpp"

namespace hbtm {

/// Answers "is this thread's underlying OS thread still alive?". Needed to
/// split Failure from ConditionalWaiting: both present identical heartbeat
/// evidence (a sustained zero rate). Must return false for joined or crashed
/// threads and true for scheduled-or-blocked ones.
using LivenessOracle = std::function<bool(int thread_id)>;

/// Decide a thread's behavior from its heartbeat evidence. First match wins:
///
///   1. exit marker set                                  -> Exit
///   2. never started                                    -> NotStarted
///   3. silent >= stall_periods detection periods, dead  -> Failure
///   4. same silence, still alive                        -> ConditionalWaiting
///   5. reduced (<= busywait_ratio x baseline) but smooth
///      (interval CV <= busywait_cv_max) nonzero rate    -> BusyWaiting
///   6. anything else                                    -> Running
///
/// `baseline_rate` <= 0 means no baseline is known yet and skips rule 5.
/// Total and deterministic: every input maps to exactly one state.
BehaviorState classify(const SequenceSnapshot& seq, const LivenessOracle& liveness,
                       double baseline_rate, const MonitorConfig& config, int64_t now_ns);

/// One tick's observation of one thread.
struct RateObservation {
    int thread_id = 0;
    BehaviorState state = BehaviorState::NotStarted;
    double rate = 0.0;
};

/// Trailing per-thread comparison baselines for the centralized monitor,
/// which observes the whole roster every tick. A thread's baseline is the
/// mean rate of the OTHER threads most recently classified Running: busy
/// waiting is a reduced rate relative to the rest of the team, so a degraded
/// thread must never anchor its own comparison (with a shared baseline, a
/// spinner whose teammates are barrier-blocked would drag the reference down
/// with itself and stay invisible). Each entry bootstraps from the first
/// qualifying peers and holds its last value while none qualify. Ring
/// walkers cannot maintain such baselines (their walks stop at the first
/// alive neighbor, so healthy co-observations are rare) and compare against
/// their own trailing rate instead.
class BaselineTracker {
public:
    /// Baseline for classifying `thread_id`; 0 while no peer has qualified.
    double baseline_for(int thread_id) const {
        const auto it = baselines_.find(thread_id);
        return it == baselines_.end() ? 0.0 : it->second;
    }

    /// Fold in one detection period's observations.
    void update(const std::vector<RateObservation>& observations) {
        double sum = 0.0;
        size_t n = 0;
        for (const RateObservation& obs : observations) {
            if (obs.state == BehaviorState::Running && obs.rate > 0.0) {
                sum += obs.rate;
                ++n;
            }
        }
        for (const RateObservation& obs : observations) {
            double peer_sum = sum;
            size_t peers = n;
            if (obs.state == BehaviorState::Running && obs.rate > 0.0) {
                peer_sum -= obs.rate;
                --peers;
            }
            if (peers > 0) baselines_[obs.thread_id] = peer_sum / static_cast<double>(peers);
        }
    }

private:
    std::unordered_map<int, double> baselines_;
};

}  // namespace hbtm
