#pragma once

#include <atomic>
#include <string>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hbtm/sequence.hpp"

namespace hbtm {

/// Shared registry of every worker's heartbeat sequence plus the ring order
/// used by decentralized detection.
///
/// Registration happens on the main thread before workers start; after that
/// the set of entries is fixed and the table is safe to share: each sequence
/// has one designated writer (its owning thread) and any number of readers.
class HeartbeatTable {
public:
    explicit HeartbeatTable(uint32_t window_capacity = 1024)
        : window_capacity_(window_capacity) {}

    HeartbeatTable(const HeartbeatTable&) = delete;
    HeartbeatTable& operator=(const HeartbeatTable&) = delete;

    // Moving is only done while building or loading a table, never while
    // workers or monitors hold a reference.
    HeartbeatTable(HeartbeatTable&& other) noexcept
        : window_capacity_(other.window_capacity_),
          entries_(std::move(other.entries_)),
          index_(std::move(other.index_)),
          ring_order_(std::move(other.ring_order_)),
          session_label_(std::move(other.session_label_)) {
        application_exited_.store(other.application_exited_.load(std::memory_order_relaxed),
                                  std::memory_order_relaxed);
    }

    /// Add a thread to the table and to the back of the ring.
    HeartbeatSequence& register_thread(int thread_id);

    bool contains(int thread_id) const { return index_.count(thread_id) != 0; }

    HeartbeatSequence& sequence(int thread_id);
    const HeartbeatSequence& sequence(int thread_id) const;

    /// Immutable point-in-time copy of one thread's window.
    SequenceSnapshot read_sequence(int thread_id) const { return sequence(thread_id).snapshot(); }

    const std::vector<int>& ring_order() const { return ring_order_; }
    size_t size() const { return ring_order_.size(); }

    /// Clockwise successor in the ring.
    int ring_next(int thread_id) const;

    bool application_exited() const { return application_exited_.load(std::memory_order_acquire); }
    void set_application_exited() { application_exited_.store(true, std::memory_order_release); }

    /// Every registered thread carries an exit marker (false for an empty
    /// table). Monitors use this to retire once nothing is left to watch.
    bool all_exited() const {
        if (entries_.empty()) return false;
        for (const auto& seq : entries_)
            if (!seq->exited()) return false;
        return true;
    }

    uint32_t window_capacity() const { return window_capacity_; }

    /// Free-form label recorded in the persisted log ("pthread", "openmp", ...).
    const std::string& session_label() const { return session_label_; }
    void set_session_label(std::string label) { session_label_ = std::move(label); }

private:
    uint32_t window_capacity_;
    std::vector<std::unique_ptr<HeartbeatSequence>> entries_;
    std::unordered_map<int, size_t> index_;
    std::vector<int> ring_order_;
    std::string session_label_;
    std::atomic<bool> application_exited_{false};
};

}  // namespace hbtm
