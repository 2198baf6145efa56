#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "hbtm/errors.hpp"
#include "hbtm/heartbeat.hpp"

namespace hbtm {

/// Point-in-time copy of one thread's retained heartbeat window.
/// `records` is sorted by seq_no and forms a contiguous suffix of
/// 1..last_seq_no (window eviction only ever drops the oldest entries).
struct SequenceSnapshot {
    int thread_id = 0;
    bool started = false;
    bool exited = false;
    uint64_t last_seq_no = 0;
    std::vector<Heartbeat> records;

    bool empty() const { return records.empty(); }
    const Heartbeat& newest() const { return records.back(); }
};

/// Bounded per-thread heartbeat window with single-writer / many-reader
/// semantics. The owning thread appends; monitors snapshot concurrently.
///
/// Writes are wait-free. Each ring slot is published through a per-slot
/// sequence stamp (the heartbeat's own seq_no, 0 while a write is in flight),
/// so a reader either observes a slot's five fields from the same emission or
/// rejects the slot; it never blocks the writer and never sees a torn record.
class HeartbeatSequence {
public:
    HeartbeatSequence(int thread_id, uint32_t window_capacity);

    HeartbeatSequence(const HeartbeatSequence&) = delete;
    HeartbeatSequence& operator=(const HeartbeatSequence&) = delete;

    int thread_id() const { return thread_id_; }
    uint32_t capacity() const { return capacity_; }

    /// Append one heartbeat (owning thread only). Returns the assigned
    /// seq_no. Sets the start marker on the first call. Timestamps are
    /// clamped to be non-decreasing. Throws AfterExit once the exit marker
    /// is set.
    uint64_t record(int64_t loop_id, int64_t iteration, int64_t timestamp_ns);

    /// Set the exit marker. Idempotent; subsequent record() calls throw.
    void mark_exit();

    /// Loader-side reconstruction: append a record carrying an explicit
    /// seq_no. The first restored record may start anywhere (a persisted
    /// window can begin past seq 1); after that seq_no must advance by 1.
    void restore(const Heartbeat& hb);

    /// Loader-side start marker.
    void restore_started() { started_.store(true, std::memory_order_release); }

    bool started() const { return started_.load(std::memory_order_acquire); }
    bool exited() const { return exited_.load(std::memory_order_acquire); }
    uint64_t last_seq_no() const { return last_seq_no_.load(std::memory_order_acquire); }

    /// Consistent point-in-time copy; safe against a concurrent writer.
    SequenceSnapshot snapshot() const;

private:
    struct Slot {
        std::atomic<uint64_t> stamp{0};  // seq_no of the slot's record; 0 = empty/in-flight
        std::atomic<int64_t> timestamp_ns{0};
        std::atomic<int64_t> loop_id{0};
        std::atomic<int64_t> iteration{0};
    };

    int thread_id_;
    uint32_t capacity_;
    std::unique_ptr<Slot[]> slots_;
    std::atomic<uint64_t> last_seq_no_{0};
    std::atomic<bool> started_{false};
    std::atomic<bool> exited_{false};
    int64_t prev_timestamp_ns_ = 0;  // writer-local, backs the monotonic clamp
};

/// The snapshot as it would have appeared at `now_ns`: records after now_ns
/// are dropped. The start marker is taken to be visible from the first
/// retained record, the exit marker from the final one (markers carry no
/// timestamp of their own). On a live snapshot taken at now_ns this is the
/// identity; on a frozen trace it rewinds the clock, which is what lets
/// replayed detection share the live code path.
SequenceSnapshot snapshot_as_of(const SequenceSnapshot& full, int64_t now_ns);

/// Heart rate over the trailing window: count of records with timestamp in
/// (now_ns - window, now_ns], divided by the window length in seconds.
/// Returns 0.0 when the window is empty.
double compute_heart_rate(const SequenceSnapshot& seq, int64_t now_ns, int64_t rate_window_ms);

/// Coefficient of variation (stddev / mean) of the inter-beat intervals of
/// records inside the trailing window. Needs at least two intervals (three
/// in-window beats); returns +inf otherwise, which no smoothness threshold
/// accepts.
double interval_cv(const SequenceSnapshot& seq, int64_t now_ns, int64_t rate_window_ms);

}  // namespace hbtm
