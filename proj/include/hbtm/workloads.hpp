#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

#include "hbtm/behavior.hpp"
#include "hbtm/session.hpp"

namespace hbtm {

enum class WorkloadKind { Pi, Jacobi, MatMul };

constexpr const char* to_string(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::Pi: return "pi";
        case WorkloadKind::Jacobi: return "jacobi";
        case WorkloadKind::MatMul: return "matmul";
    }
    return "pi";
}

bool workload_from_string(std::string_view name, WorkloadKind& out);

/// Sizing of one kernel run. Defaults are desk scale: every kernel finishes
/// in a few seconds single-core so a full experiment sweep stays under a
/// minute.
struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::Pi;
    int thread_count = 4;                          // 1..8
    int64_t pi_iterations_per_thread = 10'000'000;
    int jacobi_grid = 256;                         // grid x grid cells
    int jacobi_cycles = 2000;
    int matmul_dim = 512;                          // dim^3 multiply
    int matmul_chunk = 650;                        // row-updates between beats

    /// Throws InvalidSpec on nonpositive sizes or thread_count outside 1..8.
    void validate() const;

    /// Kind-appropriate initial iterations-between-beats.
    uint64_t default_beats_every() const;

    /// Total iteration-counter advance one worker will produce (the unit the
    /// beat interval is expressed in: pi iterations, jacobi row-updates,
    /// matmul row-updates).
    int64_t iterations_per_thread() const;
};

/// One scripted behavior episode on one thread. Triggered either at an
/// elapsed-time point or at an iteration count (exactly one of the two).
struct InjectionSpec {
    int target_thread = 0;
    BehaviorState behavior = BehaviorState::BusyWaiting;  // BW, CW, Exit or Failure
    int64_t start_ms = -1;         // elapsed ms from workload start, or
    int64_t start_iteration = -1;  // the worker's iteration counter
    int64_t duration_ms = 0;       // BW/CW episode length; ignored for Exit/Failure

    void validate(int thread_count) const;
};

/// What actually happened to one injection during a run.
struct InjectionOutcome {
    InjectionSpec spec;
    int64_t triggered_at_ns = -1;  // monotonic instant the behavior began; -1 = never fired
};

struct WorkloadResult {
    double value = 0.0;             // kernel checksum / estimate
    double wall_s = 0.0;            // start-to-join wall time
    std::vector<double> elapsed_s;  // per-thread busy time
    std::vector<InjectionOutcome> injections;
    bool result_valid = true;       // false once a terminal injection skipped work
};

/// Cycle barrier that tolerates participants leaving: a thread that exits or
/// fails mid-run deregisters instead of arriving, so the remaining threads
/// never deadlock on it.
class DropoutBarrier {
public:
    explicit DropoutBarrier(int participants) : participants_(participants) {}

    void arrive_and_wait();

    /// Permanently leave the barrier. If the caller was the last thread the
    /// others were waiting on, they are released.
    void arrive_and_drop();

    int participants() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int participants_;
    int arrived_ = 0;
    uint64_t generation_ = 0;
};

/// Run one kernel across spec.thread_count workers. With a session, each
/// worker emits gated heartbeats as it works, holds a liveness guard, marks
/// an orderly exit when its slice completes, and honors the injections; the
/// session must be Running with a thread count matching the spec. With
/// session == nullptr the kernel runs uninstrumented (baseline timing;
/// injections must be empty).
WorkloadResult run_workload(const WorkloadSpec& spec, Session* session,
                            const std::vector<InjectionSpec>& injections);

/// Sequential references for correctness checks. Jacobi and matmul are
/// elementwise deterministic, so an uninjected threaded run reproduces them
/// bit for bit. Pi regroups its compensated partial sums per thread, so the
/// threaded estimate matches the reference only to rounding (last few ulps).
double pi_reference(int64_t total_iterations);
double jacobi_reference(int grid, int cycles);
double matmul_reference(int dim);

/// Deterministic matmul inputs and the serial product, exposed for oracle
/// tests (identity checks and cross-validation against the kernel).
std::vector<double> matmul_input(int dim, uint64_t salt);
std::vector<double> matmul_multiply(const std::vector<double>& a, const std::vector<double>& b,
                                    int dim);

/// Starting grid for the Jacobi kernel: hot top edge, cold elsewhere.
std::vector<double> jacobi_initial(int grid);

/// Order-fixed compensated sum used for grid/matrix checksums.
double checksum(const std::vector<double>& values);

}  // namespace hbtm
