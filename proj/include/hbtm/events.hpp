#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "hbtm/behavior.hpp"

namespace hbtm {

/// Detector id used by the single centralized monitor thread.
inline constexpr int kCentralMonitorId = -1;

/// One classification report: detector looked at subject and saw `state`.
struct DetectionEvent {
    int64_t detected_at_ns = 0;  // same monotonic clock as heartbeats
    int detector_id = 0;
    int subject_id = 0;
    BehaviorState state = BehaviorState::NotStarted;
    double observed_rate = 0.0;  // beats/s over the configured rate window

    friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

std::string to_csv_line(const DetectionEvent& ev);

/// Concurrent event sink; monitors append, analysis snapshots.
class EventLog {
public:
    void append(const DetectionEvent& ev) {
        std::lock_guard<std::mutex> lock(mutex_);
        events_.push_back(ev);
    }

    std::vector<DetectionEvent> snapshot() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return events_;
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return events_.size();
    }

private:
    mutable std::mutex mutex_;
    std::vector<DetectionEvent> events_;
};

}  // namespace hbtm
