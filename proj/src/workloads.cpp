#include "hbtm/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>

#include "hbtm/clock.hpp"
#include "hbtm/errors.hpp"
#include "hbtm/sequence.hpp"

namespace hbtm {

bool workload_from_string(std::string_view name, WorkloadKind& out) {
    for (WorkloadKind k : {WorkloadKind::Pi, WorkloadKind::Jacobi, WorkloadKind::MatMul}) {
        if (name == to_string(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

void WorkloadSpec::validate() const {
    if (thread_count < 1 || thread_count > 8)
        throw InvalidSpec("thread_count must be in 1..8");
    switch (kind) {
        case WorkloadKind::Pi:
            if (pi_iterations_per_thread < 1)
                throw InvalidSpec("pi_iterations_per_thread must be >= 1");
            break;
        case WorkloadKind::Jacobi:
            if (jacobi_grid < 3) throw InvalidSpec("jacobi_grid must be >= 3");
            if (jacobi_cycles < 0) throw InvalidSpec("jacobi_cycles must be >= 0");
            if (jacobi_grid - 2 < thread_count)
                throw InvalidSpec("jacobi needs at least one interior row per thread");
            break;
        case WorkloadKind::MatMul:
            if (matmul_dim < 1) throw InvalidSpec("matmul_dim must be >= 1");
            if (matmul_chunk < 1) throw InvalidSpec("matmul_chunk must be >= 1");
            if (matmul_dim < thread_count)
                throw InvalidSpec("matmul needs at least one row per thread");
            break;
    }
}

uint64_t WorkloadSpec::default_beats_every() const {
    switch (kind) {
        case WorkloadKind::Pi: return 1'000'000;  // iterations
        case WorkloadKind::Jacobi: return 1'000;  // row-updates
        case WorkloadKind::MatMul: return static_cast<uint64_t>(matmul_chunk);
    }
    return 1;
}

int64_t WorkloadSpec::iterations_per_thread() const {
    switch (kind) {
        case WorkloadKind::Pi: return pi_iterations_per_thread;
        case WorkloadKind::Jacobi: {
            const int64_t rows = (jacobi_grid - 2 + thread_count - 1) / thread_count;
            return rows * jacobi_cycles;
        }
        case WorkloadKind::MatMul: {
            const int64_t rows = (matmul_dim + thread_count - 1) / thread_count;
            return rows * matmul_dim;
        }
    }
    return 0;
}

void InjectionSpec::validate(int thread_count) const {
    if (target_thread < 0 || target_thread >= thread_count)
        throw InvalidSpec("injection target_thread out of range");
    const bool time_trigger = start_ms >= 0;
    const bool iter_trigger = start_iteration >= 0;
    if (time_trigger == iter_trigger)
        throw InvalidSpec("injection needs exactly one of start_ms / start_iteration");
    switch (behavior) {
        case BehaviorState::BusyWaiting:
        case BehaviorState::ConditionalWaiting:
            if (duration_ms <= 0) throw InvalidSpec("injection duration_ms must be > 0");
            break;
        case BehaviorState::Exit:
        case BehaviorState::Failure:
            break;
        default:
            throw InvalidSpec("injectable behaviors: BusyWaiting, ConditionalWaiting, Exit, Failure");
    }
}

void DropoutBarrier::arrive_and_wait() {
    std::unique_lock<std::mutex> lock(mutex_);
    if (++arrived_ == participants_) {
        arrived_ = 0;
        ++generation_;
        cv_.notify_all();
        return;
    }
    const uint64_t gen = generation_;
    cv_.wait(lock, [&] { return generation_ != gen; });
}

void DropoutBarrier::arrive_and_drop() {
    std::lock_guard<std::mutex> lock(mutex_);
    --participants_;
    if (participants_ > 0 && arrived_ == participants_) {
        arrived_ = 0;
        ++generation_;
        cv_.notify_all();
    }
}

int DropoutBarrier::participants() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return participants_;
}

namespace {

/// Order-fixed compensated accumulator (Kahan). Both the references and the
/// threaded kernels sum through this, keeping their results equal to well
/// below the comparison tolerances regardless of partitioning.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

constexpr int64_t kLoopId = 1;  // all kernels instrument their one main loop

struct InjectionRuntime {
    explicit InjectionRuntime(const InjectionSpec& s) : spec(s) {}
    InjectionSpec spec;
    std::atomic<bool> time_armed{false};
    std::atomic<bool> fired{false};
    std::atomic<int64_t> triggered_at_ns{-1};
};

enum class Directive { Continue, ExitNow, FailNow };

/// Runs the scripted behavior episodes. Time triggers are armed by a
/// controller thread on the shared clock; iteration triggers fire straight
/// from the worker's counter. The target worker enacts the behavior inside
/// poll(), so blocking and exiting happen on the right thread.
class Injector {
public:
    Injector(const std::vector<InjectionSpec>& specs, Session* session, int64_t start_ns)
        : session_(session), start_ns_(start_ns) {
        items_.reserve(specs.size());
        for (const auto& s : specs) items_.push_back(std::make_unique<InjectionRuntime>(s));
        const bool any_timed =
            std::any_of(items_.begin(), items_.end(),
                        [](const auto& it) { return it->spec.start_ms >= 0; });
        if (any_timed) controller_ = std::thread([this] { run_controller(); });
    }

    ~Injector() { stop(); }

    void stop() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stopping_ = true;
        }
        cv_.notify_all();
        if (controller_.joinable()) controller_.join();
    }

    Directive poll(int thread_id, int64_t iteration) {
        for (auto& item : items_) {
            InjectionRuntime& r = *item;
            if (r.spec.target_thread != thread_id || r.fired.load(std::memory_order_relaxed))
                continue;
            const bool due = r.spec.start_ms >= 0
                                 ? r.time_armed.load(std::memory_order_acquire)
                                 : iteration >= r.spec.start_iteration;
            if (!due) continue;
            r.fired.store(true, std::memory_order_relaxed);
            r.triggered_at_ns.store(now_ns(), std::memory_order_release);
            switch (r.spec.behavior) {
                case BehaviorState::Exit:
                    session_->mark_thread_exit(thread_id);
                    return Directive::ExitNow;
                case BehaviorState::Failure:
                    return Directive::FailNow;
                case BehaviorState::BusyWaiting:
                    busy_wait(thread_id, iteration, r);
                    break;
                case BehaviorState::ConditionalWaiting:
                    cond_wait(r);
                    break;
                default:
                    break;  // excluded by InjectionSpec::validate
            }
        }
        return Directive::Continue;
    }

    std::vector<InjectionOutcome> outcomes() const {
        std::vector<InjectionOutcome> out;
        out.reserve(items_.size());
        for (const auto& item : items_)
            out.push_back({item->spec, item->triggered_at_ns.load(std::memory_order_acquire)});
        return out;
    }

private:
    void run_controller() {
        std::unique_lock<std::mutex> lock(mutex_);
        for (;;) {
            int64_t next = std::numeric_limits<int64_t>::max();
            for (const auto& item : items_) {
                if (item->spec.start_ms < 0 || item->time_armed.load(std::memory_order_relaxed))
                    continue;
                next = std::min(next, start_ns_ + ms_to_ns(item->spec.start_ms));
            }
            if (next == std::numeric_limits<int64_t>::max()) return;
            cv_.wait_until(lock,
                           std::chrono::steady_clock::time_point(std::chrono::nanoseconds(next)),
                           [&] { return stopping_; });
            if (stopping_) return;
            const int64_t now = now_ns();
            for (auto& item : items_) {
                if (item->spec.start_ms >= 0 && start_ns_ + ms_to_ns(item->spec.start_ms) <= now)
                    item->time_armed.store(true, std::memory_order_release);
            }
        }
    }

    /// Mean inter-beat gap over the last stretch of retained beats; 0 when
    /// fewer than two are retained. On a contended core beats arrive in
    /// scheduler bursts, so individual gaps swing between microseconds and
    /// whole time slices; the span mean over many beats is the thread's
    /// effective cadence.
    static int64_t recent_mean_gap(const SequenceSnapshot& snap) {
        const size_t n = snap.records.size();
        if (n < 2) return 0;
        const size_t first = n > 128 ? n - 128 : 0;
        const int64_t span =
            snap.records[n - 1].timestamp_ns - snap.records[first].timestamp_ns;
        return span / static_cast<int64_t>(n - 1 - first);
    }

    /// Hold the thread without progress until the episode ends, emitting
    /// heartbeats on a fixed grid at 0.3x the thread's pre-injection rate:
    /// reduced but smooth, the busy-wait signature. The pacing sleeps to
    /// each grid point rather than spin-yielding; on a contended core a
    /// spinning thread is descheduled for stretches longer than the grid
    /// step, which bunches its beats and destroys the smoothness the
    /// classifier keys on. Missed grid points are skipped, never bursted.
    void busy_wait(int thread_id, int64_t iteration, InjectionRuntime& r) {
        HeartbeatSequence& seq = session_->table().sequence(thread_id);
        const int64_t t0 = r.triggered_at_ns.load(std::memory_order_relaxed);
        const int64_t end = t0 + ms_to_ns(r.spec.duration_ms);
        // Pre-injection cadence from the thread's own recent inter-beat
        // gaps; a window-based rate would be diluted when the window still
        // reaches back before the thread's first beat.
        const int64_t gap = recent_mean_gap(seq.snapshot());
        const int64_t step = gap > 0 ? static_cast<int64_t>(std::llround(gap / 0.3))
                                     : ms_to_ns(r.spec.duration_ms) + 1;
        for (int64_t next = t0 + step; next < end; next += step) {
            std::this_thread::sleep_until(
                std::chrono::steady_clock::time_point(std::chrono::nanoseconds(next)));
            const int64_t now = now_ns();
            if (now >= end) break;
            seq.record(kLoopId, iteration, now);
            while (next + step <= now) next += step;
        }
    }

    /// Block on a condition that fires when the episode ends: zero beats,
    /// thread stays alive.
    void cond_wait(InjectionRuntime& r) {
        const int64_t deadline =
            r.triggered_at_ns.load(std::memory_order_relaxed) + ms_to_ns(r.spec.duration_ms);
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait_until(lock,
                       std::chrono::steady_clock::time_point(std::chrono::nanoseconds(deadline)),
                       [&] { return stopping_; });
    }

    Session* session_;
    int64_t start_ns_;
    std::vector<std::unique_ptr<InjectionRuntime>> items_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stopping_ = false;
    std::thread controller_;
};

/// Per-worker instrumentation: gated beat, then injection poll. Returns
/// false when the worker must abandon its loop.
struct WorkerHooks {
    Session* session = nullptr;
    Injector* injector = nullptr;
    int thread_id = 0;
    bool failed = false;  // Failure directive: leave without an exit marker

    bool step(int64_t iteration) {
        if (!session) return true;
        session->generate(thread_id, kLoopId, iteration);
        switch (injector->poll(thread_id, iteration)) {
            case Directive::Continue:
                return true;
            case Directive::ExitNow:
                return false;
            case Directive::FailNow:
                failed = true;
                return false;
        }
        return true;
    }
};

struct WorkerTiming {
    int64_t begin_ns = 0;
    int64_t end_ns = 0;
    bool completed = false;  // ran its whole slice
};

/// [lo, hi) slice of `count` items for thread t of n.
std::pair<int64_t, int64_t> slice(int64_t count, int t, int n) {
    return {count * t / n, count * (t + 1) / n};
}

void run_pi(const WorkloadSpec& spec, Session* session, Injector& injector,
            std::vector<WorkerTiming>& timing, double& value) {
    const int n = spec.thread_count;
    const int64_t total = spec.pi_iterations_per_thread * n;
    const double dx = 1.0 / static_cast<double>(total);
    std::vector<double> partial(static_cast<size_t>(n), 0.0);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) {
        workers.emplace_back([&, t] {
            std::unique_ptr<ThreadLivenessRegistry::Guard> alive;
            if (session)
                alive = std::make_unique<ThreadLivenessRegistry::Guard>(session->liveness(), t);
            WorkerHooks hooks{session, &injector, t};
            timing[t].begin_ns = now_ns();
            const int64_t begin = spec.pi_iterations_per_thread * t;
            const int64_t end = begin + spec.pi_iterations_per_thread;
            KahanSum sum;
            bool aborted = false;
            int64_t counter = 0;
            for (int64_t i = begin; i < end; ++i) {
                const double x = (static_cast<double>(i) + 0.5) * dx;
                sum.add(4.0 / (1.0 + x * x));
                ++counter;
                if ((counter & 255) == 0 && !hooks.step(counter)) {
                    aborted = true;
                    break;
                }
            }
            partial[static_cast<size_t>(t)] = sum.sum * dx;
            timing[t].end_ns = now_ns();
            timing[t].completed = !aborted;
            if (session && !hooks.failed) session->mark_thread_exit(t);
        });
    }
    for (auto& w : workers) w.join();
    KahanSum total_sum;
    for (double p : partial) total_sum.add(p);
    value = total_sum.sum;
}

void jacobi_update_row(const double* src, double* dst, int grid, int row) {
    const double* up = src + static_cast<size_t>(row - 1) * grid;
    const double* mid = src + static_cast<size_t>(row) * grid;
    const double* down = src + static_cast<size_t>(row + 1) * grid;
    double* out = dst + static_cast<size_t>(row) * grid;
    for (int j = 1; j < grid - 1; ++j)
        out[j] = 0.25 * (up[j] + down[j] + mid[j - 1] + mid[j + 1]);
}

void run_jacobi(const WorkloadSpec& spec, Session* session, Injector& injector,
                std::vector<WorkerTiming>& timing, double& value) {
    const int n = spec.thread_count;
    const int grid = spec.jacobi_grid;
    std::vector<double> bufs[2] = {jacobi_initial(grid), jacobi_initial(grid)};
    DropoutBarrier barrier(n);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) {
        workers.emplace_back([&, t] {
            std::unique_ptr<ThreadLivenessRegistry::Guard> alive;
            if (session)
                alive = std::make_unique<ThreadLivenessRegistry::Guard>(session->liveness(), t);
            WorkerHooks hooks{session, &injector, t};
            timing[t].begin_ns = now_ns();
            const auto [lo, hi] = slice(grid - 2, t, n);
            bool aborted = false;
            int64_t counter = 0;
            for (int cycle = 0; cycle < spec.jacobi_cycles && !aborted; ++cycle) {
                const double* src = bufs[cycle % 2].data();
                double* dst = bufs[(cycle + 1) % 2].data();
                for (int64_t row = lo; row < hi; ++row) {
                    jacobi_update_row(src, dst, grid, static_cast<int>(row) + 1);
                    ++counter;
                    if (!hooks.step(counter)) {
                        aborted = true;
                        break;
                    }
                }
                if (aborted) break;
                barrier.arrive_and_wait();
            }
            if (aborted) barrier.arrive_and_drop();
            timing[t].end_ns = now_ns();
            timing[t].completed = !aborted;
            if (session && !hooks.failed) session->mark_thread_exit(t);
        });
    }
    for (auto& w : workers) w.join();
    value = checksum(bufs[spec.jacobi_cycles % 2]);
}

void matmul_row_update(const double* a, const double* b, double* c, int dim, int i, int k) {
    const double aik = a[static_cast<size_t>(i) * dim + k];
    const double* brow = b + static_cast<size_t>(k) * dim;
    double* crow = c + static_cast<size_t>(i) * dim;
    for (int j = 0; j < dim; ++j) crow[j] += aik * brow[j];
}

void run_matmul(const WorkloadSpec& spec, Session* session, Injector& injector,
                std::vector<WorkerTiming>& timing, double& value) {
    const int n = spec.thread_count;
    const int dim = spec.matmul_dim;
    const std::vector<double> a = matmul_input(dim, 1);
    const std::vector<double> b = matmul_input(dim, 2);
    std::vector<double> c(static_cast<size_t>(dim) * dim, 0.0);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) {
        workers.emplace_back([&, t] {
            std::unique_ptr<ThreadLivenessRegistry::Guard> alive;
            if (session)
                alive = std::make_unique<ThreadLivenessRegistry::Guard>(session->liveness(), t);
            WorkerHooks hooks{session, &injector, t};
            timing[t].begin_ns = now_ns();
            const auto [lo, hi] = slice(dim, t, n);
            bool aborted = false;
            int64_t counter = 0;
            for (int64_t i = lo; i < hi && !aborted; ++i) {
                for (int k = 0; k < dim; ++k) {
                    matmul_row_update(a.data(), b.data(), c.data(), dim, static_cast<int>(i), k);
                    ++counter;
                    if (!hooks.step(counter)) {
                        aborted = true;
                        break;
                    }
                }
            }
            timing[t].end_ns = now_ns();
            timing[t].completed = !aborted;
            if (session && !hooks.failed) session->mark_thread_exit(t);
        });
    }
    for (auto& w : workers) w.join();
    value = checksum(c);
}

}  // namespace

WorkloadResult run_workload(const WorkloadSpec& spec, Session* session,
                            const std::vector<InjectionSpec>& injections) {
    spec.validate();
    for (const auto& inj : injections) inj.validate(spec.thread_count);
    if (!session && !injections.empty())
        throw InvalidSpec("injections need an instrumented session");
    if (session) {
        if (session->status() != SessionStatus::Running)
            throw InvalidSpec("session must be running");
        if (session->thread_count() != spec.thread_count)
            throw InvalidSpec("session and workload thread counts differ");
    }

    const int64_t run_start = now_ns();
    Injector injector(injections, session, run_start);
    std::vector<WorkerTiming> timing(static_cast<size_t>(spec.thread_count));
    double value = 0.0;
    switch (spec.kind) {
        case WorkloadKind::Pi: run_pi(spec, session, injector, timing, value); break;
        case WorkloadKind::Jacobi: run_jacobi(spec, session, injector, timing, value); break;
        case WorkloadKind::MatMul: run_matmul(spec, session, injector, timing, value); break;
    }
    injector.stop();

    WorkloadResult result;
    result.value = value;
    result.wall_s = ns_to_s(now_ns() - run_start);
    result.elapsed_s.reserve(timing.size());
    for (const auto& t : timing) result.elapsed_s.push_back(ns_to_s(t.end_ns - t.begin_ns));
    result.injections = injector.outcomes();
    for (const auto& t : timing) result.result_valid = result.result_valid && t.completed;
    return result;
}

double pi_reference(int64_t total_iterations) {
    const double dx = 1.0 / static_cast<double>(total_iterations);
    KahanSum sum;
    for (int64_t i = 0; i < total_iterations; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * dx;
        sum.add(4.0 / (1.0 + x * x));
    }
    return sum.sum * dx;
}

std::vector<double> jacobi_initial(int grid) {
    std::vector<double> g(static_cast<size_t>(grid) * grid, 0.0);
    for (int j = 0; j < grid; ++j) g[static_cast<size_t>(j)] = 1.0;
    return g;
}

double jacobi_reference(int grid, int cycles) {
    std::vector<double> bufs[2] = {jacobi_initial(grid), jacobi_initial(grid)};
    for (int cycle = 0; cycle < cycles; ++cycle) {
        const double* src = bufs[cycle % 2].data();
        double* dst = bufs[(cycle + 1) % 2].data();
        for (int row = 1; row < grid - 1; ++row) jacobi_update_row(src, dst, grid, row);
    }
    return checksum(bufs[cycles % 2]);
}

std::vector<double> matmul_input(int dim, uint64_t salt) {
    // splitmix64 over the flat index: deterministic, cheap, well spread.
    std::vector<double> m(static_cast<size_t>(dim) * dim);
    for (size_t i = 0; i < m.size(); ++i) {
        uint64_t z = (salt * 0x9E3779B97F4A7C15ULL) + (i + 1) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        m[i] = static_cast<double>(z >> 11) / static_cast<double>(1ULL << 53);
    }
    return m;
}

std::vector<double> matmul_multiply(const std::vector<double>& a, const std::vector<double>& b,
                                    int dim) {
    std::vector<double> c(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) matmul_row_update(a.data(), b.data(), c.data(), dim, i, k);
    return c;
}

double matmul_reference(int dim) {
    return checksum(matmul_multiply(matmul_input(dim, 1), matmul_input(dim, 2), dim));
}

double checksum(const std::vector<double>& values) {
    // Neumaier's variant keeps the correction exact even when a term exceeds
    // the running sum, so sign-mixed data cannot cancel silently.
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double t = sum + v;
        carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + carry;
}

}  // namespace hbtm
