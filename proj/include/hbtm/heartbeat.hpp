#pragma once

#include <cstdint>

namespace hbtm {

/// One heartbeat emission. `seq_no` starts at 1 and increases by exactly one
/// per emission of the owning thread; `timestamp_ns` is non-decreasing within
/// a thread's sequence.
struct Heartbeat {
    int thread_id = 0;
    uint64_t seq_no = 0;
    int64_t timestamp_ns = 0;
    int64_t loop_id = 0;
    int64_t iteration = 0;

    friend bool operator==(const Heartbeat&, const Heartbeat&) = default;
};

}  // namespace hbtm
