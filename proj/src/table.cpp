#include "hbtm/table.hpp"

#include <algorithm>

namespace hbtm {

HeartbeatSequence& HeartbeatTable::register_thread(int thread_id) {
    if (application_exited()) throw AlreadyFinished();
    if (thread_id < 0) throw ConfigError("thread_id must be non-negative");
    if (contains(thread_id)) throw DuplicateThreadId(thread_id);
    entries_.push_back(std::make_unique<HeartbeatSequence>(thread_id, window_capacity_));
    index_[thread_id] = entries_.size() - 1;
    ring_order_.push_back(thread_id);
    return *entries_.back();
}

HeartbeatSequence& HeartbeatTable::sequence(int thread_id) {
    auto it = index_.find(thread_id);
    if (it == index_.end()) throw UnknownThreadId(thread_id);
    return *entries_[it->second];
}

const HeartbeatSequence& HeartbeatTable::sequence(int thread_id) const {
    auto it = index_.find(thread_id);
    if (it == index_.end()) throw UnknownThreadId(thread_id);
    return *entries_[it->second];
}

int HeartbeatTable::ring_next(int thread_id) const {
    auto pos = std::find(ring_order_.begin(), ring_order_.end(), thread_id);
    if (pos == ring_order_.end()) throw UnknownThreadId(thread_id);
    ++pos;
    return pos == ring_order_.end() ? ring_order_.front() : *pos;
}

}  // namespace hbtm
