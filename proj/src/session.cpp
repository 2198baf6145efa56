#include "hbtm/session.hpp"

#include "hbtm/clock.hpp"
#include "hbtm/errors.hpp"
#include "hbtm/log_io.hpp"
#include "hbtm/rate_control.hpp"

namespace hbtm {

namespace {

SessionOptions validated(SessionOptions options) {
    options.config.validate();
    if (options.thread_count < 1) throw ConfigError("thread_count must be >= 1");
    if (options.config.mode == Mode::Decentralized && options.thread_count < 2)
        throw ConfigError("decentralized mode needs at least 2 threads");
    if (options.beats_every < 1) throw ConfigError("beats_every must be >= 1");
    if (options.window_iteration < 1) throw ConfigError("window_iteration must be >= 1");
    if (options.rate_threshold_ratio < 0.0)
        throw ConfigError("rate_threshold_ratio must be >= 0");
    return options;
}

}  // namespace

Session::Session(SessionOptions options)
    : options_(validated(std::move(options))),
      table_(options_.config.window_capacity),
      pacing_(static_cast<size_t>(options_.thread_count), options_.beats_every),
      liveness_(static_cast<size_t>(options_.thread_count)),
      last_beat_(static_cast<size_t>(options_.thread_count), -1) {
    table_.set_session_label(options_.label);
}

Session::~Session() {
    try {
        finished();
    } catch (...) {
        // Destruction must not throw; a failed final persist is dropped here,
        // callers who care invoke finished() themselves.
    }
}

void Session::start() {
    if (status_.load(std::memory_order_acquire) != SessionStatus::Initialized)
        throw ConfigError("session already started");
    for (int id = 0; id < options_.thread_count; ++id) table_.register_thread(id);
    status_.store(SessionStatus::Running, std::memory_order_release);
    if (!options_.spawn_monitors) return;
    if (config().mode == Mode::Centralized) {
        monitors_.emplace_back([this] {
            run_centralized_monitor(table_, config(), liveness_.oracle(), events_, stop_);
        });
    } else {
        for (int id = 0; id < options_.thread_count; ++id) {
            monitors_.emplace_back([this, id] {
                run_decentralized_monitor(table_, config(), liveness_.oracle(), id, events_,
                                          stop_);
            });
        }
    }
}

void Session::generate(int thread_id, int64_t loop_id, int64_t iteration) {
    if (status_.load(std::memory_order_acquire) != SessionStatus::Running) return;
    if (thread_id < 0 || thread_id >= options_.thread_count) throw UnknownThreadId(thread_id);
    const auto interval = static_cast<int64_t>(pacing_.interval(static_cast<size_t>(thread_id)));
    int64_t& last = last_beat_[static_cast<size_t>(thread_id)];
    // Beat whenever the iteration counter reaches a new multiple of the
    // interval; sparse call sites then emit on the first call past each
    // multiple instead of waiting to hit one exactly.
    if (iteration / interval > last / interval) {
        table_.sequence(thread_id).record(loop_id, iteration, now_ns());
        last = iteration;
    }
}

void Session::mark_thread_exit(int thread_id) {
    if (thread_id < 0 || thread_id >= options_.thread_count) throw UnknownThreadId(thread_id);
    table_.sequence(thread_id).mark_exit();
}

bool Session::finished() {
    if (status_.exchange(SessionStatus::Finished, std::memory_order_acq_rel) ==
        SessionStatus::Finished)
        return finish_ok_;
    stop_.store(true, std::memory_order_release);
    table_.set_application_exited();
    join_monitors();
    finish_ok_ = true;
    if (!options_.log_path.empty()) {
        try {
            persist_log(table_, options_.log_path);
        } catch (const IoError&) {
            finish_ok_ = false;
        }
    }
    return finish_ok_;
}

double Session::heart_rate_adjust(double expected_rate) {
    if (status_.load(std::memory_order_acquire) != SessionStatus::Running) return 0.0;
    auto avg = average_heart_rate(observe_all(now_ns()));
    if (!(expected_rate > 0.0)) return avg.value_or(0.0);  // rejected, pacing untouched
    if (!avg) return 0.0;
    RateAdjustment adj =
        adjust_heart_rate(*avg, expected_rate, options_.rate_threshold_ratio * expected_rate,
                          options_.window_iteration);
    if (adj.unchanged) return *avg;
    apply_adjustment(pacing_, adj.iteration);
    return expected_rate;
}

void Session::wait_monitors() { join_monitors(); }

void Session::detect_once(int64_t at_ns) {
    if (detectors_.empty()) {
        const size_t n = config().mode == Mode::Centralized
                             ? 1
                             : static_cast<size_t>(options_.thread_count);
        for (size_t i = 0; i < n; ++i)
            detectors_.push_back(
                std::make_unique<MonitorState>(table_, config(), liveness_.oracle()));
    }
    if (config().mode == Mode::Centralized) {
        detectors_[0]->tick_centralized(at_ns, events_);
    } else {
        for (int id = 0; id < options_.thread_count; ++id)
            detectors_[static_cast<size_t>(id)]->tick_decentralized(id, at_ns, events_);
    }
}

void Session::join_monitors() {
    std::lock_guard<std::mutex> lock(join_mutex_);
    for (auto& t : monitors_)
        if (t.joinable()) t.join();
}

std::vector<std::pair<BehaviorState, double>> Session::observe_all(int64_t at_ns) const {
    std::vector<std::pair<BehaviorState, double>> out;
    out.reserve(table_.size());
    MonitorState probe(table_, options_.config, liveness_.oracle());
    for (int id : table_.ring_order()) out.push_back(probe.observe(id, at_ns));
    return out;
}

}  // namespace hbtm
