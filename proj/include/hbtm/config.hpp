#pragma once

#include <cstdint>
#include <string_view>

#include "hbtm/errors.hpp"

namespace hbtm {

enum class Mode {
    Centralized = 0,
    Decentralized = 1,
};

constexpr const char* to_string(Mode mode) {
    return mode == Mode::Decentralized ? "decentralized" : "centralized";
}

inline bool mode_from_string(std::string_view name, Mode& out) {
    if (name == "centralized") {
        out = Mode::Centralized;
        return true;
    }
    if (name == "decentralized") {
        out = Mode::Decentralized;
        return true;
    }
    return false;
}

/// Tuning knobs shared by every monitor.
///
/// A thread is treated as silent once it has emitted nothing for
/// `stall_periods` consecutive detection periods; a silent-but-alive thread
/// classifies as conditional waiting, a silent-and-dead one as failure.
/// Busy waiting is a nonzero rate at or below `busywait_ratio` of the team
/// baseline whose inter-beat intervals are smooth (coefficient of variation
/// at most `busywait_cv_max`).
struct MonitorConfig {
    Mode mode = Mode::Centralized;
    int64_t detection_period_ms = 10;
    uint32_t window_capacity = 1024;   // heartbeats retained per thread
    int64_t rate_window_ms = 200;      // sliding window for heart-rate measurement
    double busywait_ratio = 0.5;       // must be in (0, 1)
    double busywait_cv_max = 0.25;
    uint32_t stall_periods = 3;

    void validate() const {
        if (detection_period_ms <= 0) throw ConfigError("detection_period_ms must be > 0");
        if (window_capacity < 2) throw ConfigError("window_capacity must be >= 2");
        if (rate_window_ms <= 0) throw ConfigError("rate_window_ms must be > 0");
        if (!(busywait_ratio > 0.0 && busywait_ratio < 1.0))
            throw ConfigError("busywait_ratio must be in (0, 1)");
        if (busywait_cv_max < 0.0) throw ConfigError("busywait_cv_max must be >= 0");
        if (stall_periods < 1) throw ConfigError("stall_periods must be >= 1");
    }

    /// Silence threshold: a started thread whose newest heartbeat is older
    /// than this has a zero observed rate in every one of the last
    /// `stall_periods` detection periods.
    int64_t stall_ns() const { return ms_to_ns_(detection_period_ms) * stall_periods; }

private:
    static constexpr int64_t ms_to_ns_(int64_t ms) { return ms * 1'000'000; }
};

}  // namespace hbtm
