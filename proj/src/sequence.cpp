#include "hbtm/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hbtm {

HeartbeatSequence::HeartbeatSequence(int thread_id, uint32_t window_capacity)
    : thread_id_(thread_id),
      capacity_(window_capacity),
      slots_(new Slot[window_capacity]) {}

uint64_t HeartbeatSequence::record(int64_t loop_id, int64_t iteration, int64_t timestamp_ns) {
    if (exited_.load(std::memory_order_relaxed)) throw AfterExit(thread_id_);

    const uint64_t seq = last_seq_no_.load(std::memory_order_relaxed) + 1;
    timestamp_ns = std::max(timestamp_ns, prev_timestamp_ns_);
    prev_timestamp_ns_ = timestamp_ns;

    // Seqlock write: invalidate, fill, publish. Readers that observe
    // stamp == 0 or a stamp change across their copy discard the slot.
    Slot& slot = slots_[(seq - 1) % capacity_];
    slot.stamp.store(0, std::memory_order_relaxed);
    std::atomic_thread_fence(std::memory_order_release);
    slot.timestamp_ns.store(timestamp_ns, std::memory_order_relaxed);
    slot.loop_id.store(loop_id, std::memory_order_relaxed);
    slot.iteration.store(iteration, std::memory_order_relaxed);
    slot.stamp.store(seq, std::memory_order_release);

    last_seq_no_.store(seq, std::memory_order_release);
    if (seq == 1) started_.store(true, std::memory_order_release);
    return seq;
}

void HeartbeatSequence::mark_exit() {
    exited_.store(true, std::memory_order_release);
}

void HeartbeatSequence::restore(const Heartbeat& hb) {
    if (hb.seq_no == 0) throw ConfigError("seq_no must be >= 1");
    const uint64_t last = last_seq_no_.load(std::memory_order_relaxed);
    if (last != 0 && hb.seq_no != last + 1)
        throw ConfigError("restored seq_no must be contiguous");

    prev_timestamp_ns_ = std::max(prev_timestamp_ns_, hb.timestamp_ns);
    Slot& slot = slots_[(hb.seq_no - 1) % capacity_];
    slot.timestamp_ns.store(prev_timestamp_ns_, std::memory_order_relaxed);
    slot.loop_id.store(hb.loop_id, std::memory_order_relaxed);
    slot.iteration.store(hb.iteration, std::memory_order_relaxed);
    slot.stamp.store(hb.seq_no, std::memory_order_release);
    last_seq_no_.store(hb.seq_no, std::memory_order_release);
    started_.store(true, std::memory_order_release);
}

SequenceSnapshot HeartbeatSequence::snapshot() const {
    SequenceSnapshot snap;
    snap.thread_id = thread_id_;
    snap.started = started();
    snap.exited = exited();

    const uint64_t last = last_seq_no_.load(std::memory_order_acquire);
    if (last == 0) {
        snap.last_seq_no = 0;
        return snap;
    }

    const uint64_t lo = last > capacity_ ? last - capacity_ + 1 : 1;
    snap.records.reserve(static_cast<size_t>(last - lo + 1));
    for (uint64_t seq = lo; seq <= last; ++seq) {
        const Slot& slot = slots_[(seq - 1) % capacity_];
        const uint64_t s1 = slot.stamp.load(std::memory_order_acquire);
        if (s1 != seq) continue;  // evicted by a concurrent writer, or in flight
        Heartbeat hb;
        hb.thread_id = thread_id_;
        hb.seq_no = seq;
        hb.timestamp_ns = slot.timestamp_ns.load(std::memory_order_relaxed);
        hb.loop_id = slot.loop_id.load(std::memory_order_relaxed);
        hb.iteration = slot.iteration.load(std::memory_order_relaxed);
        std::atomic_thread_fence(std::memory_order_acquire);
        const uint64_t s2 = slot.stamp.load(std::memory_order_relaxed);
        if (s1 != s2) continue;
        snap.records.push_back(hb);
    }

    // A writer racing ahead of the scan can knock out interior slots; keep
    // the contiguous run that ends at the newest record so the snapshot is
    // always a suffix of 1..last_seq_no.
    if (!snap.records.empty()) {
        const size_t n = snap.records.size();
        size_t keep = 1;
        while (keep < n &&
               snap.records[n - keep].seq_no == snap.records[n - keep - 1].seq_no + 1)
            ++keep;
        if (keep < n) snap.records.erase(snap.records.begin(), snap.records.end() - keep);
    }

    // A published record proves the thread started even when the started
    // flag itself is still in flight.
    snap.started = snap.started || !snap.records.empty();
    snap.last_seq_no = snap.records.empty() ? 0 : snap.records.back().seq_no;
    return snap;
}

SequenceSnapshot snapshot_as_of(const SequenceSnapshot& full, int64_t now_ns) {
    SequenceSnapshot snap;
    snap.thread_id = full.thread_id;
    for (const Heartbeat& hb : full.records) {
        if (hb.timestamp_ns > now_ns) break;  // records are time-ordered
        snap.records.push_back(hb);
    }
    const bool all_visible = snap.records.size() == full.records.size();
    snap.started = full.started && (full.records.empty() || !snap.records.empty());
    snap.exited = full.exited && all_visible;
    snap.last_seq_no = snap.records.empty() ? 0 : snap.records.back().seq_no;
    return snap;
}

double compute_heart_rate(const SequenceSnapshot& seq, int64_t now_ns, int64_t rate_window_ms) {
    if (rate_window_ms <= 0) throw ConfigError("rate_window_ms must be > 0");
    const int64_t window_ns = rate_window_ms * 1'000'000;
    const int64_t lo = now_ns - window_ns;
    size_t count = 0;
    for (const Heartbeat& hb : seq.records) {
        if (hb.timestamp_ns > lo && hb.timestamp_ns <= now_ns) ++count;
    }
    return static_cast<double>(count) / (static_cast<double>(rate_window_ms) / 1e3);
}

double interval_cv(const SequenceSnapshot& seq, int64_t now_ns, int64_t rate_window_ms) {
    const int64_t window_ns = rate_window_ms * 1'000'000;
    const int64_t lo = now_ns - window_ns;
    std::vector<double> intervals;
    const Heartbeat* prev = nullptr;
    for (const Heartbeat& hb : seq.records) {
        if (hb.timestamp_ns <= lo || hb.timestamp_ns > now_ns) continue;
        if (prev) intervals.push_back(static_cast<double>(hb.timestamp_ns - prev->timestamp_ns));
        prev = &hb;
    }
    if (intervals.size() < 2) return std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (double v : intervals) mean += v;
    mean /= static_cast<double>(intervals.size());
    if (mean <= 0.0) return std::numeric_limits<double>::infinity();
    double var = 0.0;
    for (double v : intervals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(intervals.size());
    return std::sqrt(var) / mean;
}

}  // namespace hbtm
