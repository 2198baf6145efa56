#include "hbtm/monitor.hpp"

#include "hbtm/clock.hpp"
#include "hbtm/errors.hpp"
#include "hbtm/sequence.hpp"

namespace hbtm {

RingWalkResult next_alive_neighbor(const HeartbeatTable& table, int self_id,
                                   const SubjectClassifier& classifier, int64_t now_ns) {
    if (table.size() < 2) throw SingletonRing();

    RingWalkResult result;
    int candidate = table.ring_next(self_id);
    while (candidate != self_id) {
        auto [state, rate] = classifier(candidate, now_ns);
        result.visited.push_back(candidate);
        result.states.push_back(state);
        result.observed_rates.push_back(rate);
        if (is_alive_state(state)) {
            result.found_id = candidate;
            return result;
        }
        candidate = table.ring_next(candidate);
    }
    // Full lap, nobody alive: the walker is its own next neighbor.
    result.found_id = self_id;
    return result;
}

std::pair<BehaviorState, double> MonitorState::observe_with(int thread_id, int64_t now_ns,
                                                            double baseline_rate) const {
    // The as-of view makes frozen-trace replay (where the table already
    // holds the whole run) see exactly what a live monitor saw at now_ns.
    SequenceSnapshot snap = snapshot_as_of(table_->read_sequence(thread_id), now_ns);
    BehaviorState state = classify(snap, liveness_, baseline_rate, config_, now_ns);
    return {state, compute_heart_rate(snap, now_ns, config_.rate_window_ms)};
}

std::pair<BehaviorState, double> MonitorState::observe(int thread_id, int64_t now_ns) const {
    return observe_with(thread_id, now_ns, baseline_.baseline_for(thread_id));
}

std::pair<BehaviorState, double> MonitorState::query(int thread_id, int64_t now_ns) {
    ++query_count_;
    return observe(thread_id, now_ns);
}

void MonitorState::tick_centralized(int64_t now_ns, EventLog& sink) {
    std::vector<RateObservation> observations;
    observations.reserve(table_->size());
    for (int id : table_->ring_order()) {
        auto [state, rate] = query(id, now_ns);
        observations.push_back({id, state, rate});
        sink.append({now_ns, kCentralMonitorId, id, state, rate});
    }
    baseline_.update(observations);
}

BehaviorState MonitorState::tick_decentralized(int self_id, int64_t now_ns, EventLog& sink) {
    const auto [self_state, self_rate] = observe_with(self_id, now_ns, self_reference_);
    if (self_state == BehaviorState::Running && self_rate > 0.0) self_reference_ = self_rate;
    // Exit and Failure end this monitor's patrol (its subject is gone);
    // NotStarted means there is nothing to patrol for yet. A merely blocked
    // subject keeps its monitor walking: threads parked on a barrier or
    // condition still watch their neighbors, otherwise one stalled stage
    // would blind the whole ring to a misbehaving peer.
    if (self_state == BehaviorState::Exit || self_state == BehaviorState::Failure ||
        self_state == BehaviorState::NotStarted)
        return self_state;

    SubjectClassifier classifier = [this](int id, int64_t t) {
        ++query_count_;
        return observe_with(id, t, self_reference_);
    };
    RingWalkResult walk = next_alive_neighbor(*table_, self_id, classifier, now_ns);
    for (size_t i = 0; i < walk.visited.size(); ++i)
        sink.append({now_ns, self_id, walk.visited[i], walk.states[i], walk.observed_rates[i]});
    return self_state;
}

namespace {

bool should_stop(const HeartbeatTable& table, const std::atomic<bool>& stop) {
    return stop.load(std::memory_order_acquire) || table.application_exited();
}

}  // namespace

void run_centralized_monitor(const HeartbeatTable& table, const MonitorConfig& config,
                             const LivenessOracle& liveness, EventLog& sink,
                             const std::atomic<bool>& stop) {
    MonitorState state(table, config, liveness);
    const int64_t period_ns = ms_to_ns(config.detection_period_ms);
    int64_t next_tick = now_ns() + period_ns;
    while (!should_stop(table, stop)) {
        sleep_until_ns(next_tick);
        next_tick += period_ns;
        if (should_stop(table, stop)) break;
        state.tick_centralized(now_ns(), sink);
        if (table.all_exited()) break;
    }
}

void run_decentralized_monitor(const HeartbeatTable& table, const MonitorConfig& config,
                               const LivenessOracle& liveness, int self_id, EventLog& sink,
                               const std::atomic<bool>& stop) {
    MonitorState state(table, config, liveness);
    const int64_t period_ns = ms_to_ns(config.detection_period_ms);
    int64_t next_tick = now_ns() + period_ns;
    while (!should_stop(table, stop)) {
        sleep_until_ns(next_tick);
        next_tick += period_ns;
        if (should_stop(table, stop)) break;
        const BehaviorState self_state = state.tick_decentralized(self_id, now_ns(), sink);
        if (self_state == BehaviorState::Exit || self_state == BehaviorState::Failure) break;
        if (table.all_exited()) break;
    }
}

}  // namespace hbtm
