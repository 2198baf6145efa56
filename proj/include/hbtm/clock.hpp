#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace hbtm {

/// All timestamps in the toolkit come from this one monotonic clock.
/// Wall-clock time is never used; values are only comparable within a process
/// (and within one persisted log, where all entries share an epoch).
inline int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

inline void sleep_until_ns(int64_t deadline_ns) {
    std::this_thread::sleep_until(
        std::chrono::steady_clock::time_point(std::chrono::nanoseconds(deadline_ns)));
}

constexpr int64_t ms_to_ns(int64_t ms) { return ms * 1'000'000; }
constexpr double ns_to_ms(int64_t ns) { return static_cast<double>(ns) / 1e6; }
constexpr double ns_to_s(int64_t ns) { return static_cast<double>(ns) / 1e9; }

}  // namespace hbtm
