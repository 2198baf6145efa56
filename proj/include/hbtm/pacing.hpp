#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

namespace hbtm {

/// Per-thread iterations-per-heartbeat intervals. Written by the rate
/// controller, read by each worker's generate path; plain acquire/release
/// atomics, same visibility contract as heartbeats.
class BeatPacing {
public:
    BeatPacing(size_t thread_count, uint64_t initial_interval)
        : intervals_(thread_count) {
        for (auto& v : intervals_) v.store(initial_interval, std::memory_order_relaxed);
    }

    size_t thread_count() const { return intervals_.size(); }

    uint64_t interval(size_t thread) const {
        return intervals_[thread].load(std::memory_order_acquire);
    }

    void set_interval(size_t thread, uint64_t interval) {
        intervals_[thread].store(interval < 1 ? 1 : interval, std::memory_order_release);
    }

    void set_all(uint64_t interval) {
        for (size_t t = 0; t < intervals_.size(); ++t) set_interval(t, interval);
    }

private:
    std::vector<std::atomic<uint64_t>> intervals_;
};

}  // namespace hbtm
