#include "hbtm/classify.hpp"

namespace hbtm {

BehaviorState classify(const SequenceSnapshot& seq, const LivenessOracle& liveness,
                       double baseline_rate, const MonitorConfig& config, int64_t now_ns) {
    if (seq.exited) return BehaviorState::Exit;
    if (!seq.started || seq.empty()) return BehaviorState::NotStarted;

    // Silence is measured from the newest heartbeat; once it spans
    // stall_periods detection periods the observed rate has been zero in
    // every one of them.
    const int64_t silent_ns = now_ns - seq.newest().timestamp_ns;
    if (silent_ns >= config.stall_ns()) {
        const bool alive = liveness ? liveness(seq.thread_id) : true;
        return alive ? BehaviorState::ConditionalWaiting : BehaviorState::Failure;
    }

    const double rate = compute_heart_rate(seq, now_ns, config.rate_window_ms);
    if (rate > 0.0 && baseline_rate > 0.0 && rate <= config.busywait_ratio * baseline_rate &&
        interval_cv(seq, now_ns, config.rate_window_ms) <= config.busywait_cv_max) {
        return BehaviorState::BusyWaiting;
    }
    return BehaviorState::Running;
}

bool behavior_from_string(std::string_view name, BehaviorState& out) {
    for (BehaviorState s :
         {BehaviorState::NotStarted, BehaviorState::Running, BehaviorState::BusyWaiting,
          BehaviorState::ConditionalWaiting, BehaviorState::Exit, BehaviorState::Failure}) {
        if (to_string(s) == name) {
            out = s;
            return true;
        }
    }
    return false;
}

}  // namespace hbtm
