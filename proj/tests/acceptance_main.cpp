// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// FAIL. Workload sizes are scaled from a short on-machine calibration so the
// timing-sensitive criteria measure behavior, not this host's clock speed.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hbtm/api.hpp"
#include "hbtm/bench.hpp"
#include "hbtm/clock.hpp"
#include "hbtm/log_io.hpp"
#include "hbtm/rate_control.hpp"
#include "hbtm/session.hpp"
#include "hbtm/workloads.hpp"

using namespace hbtm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

/// Median uninstrumented per-thread busy time -> iteration units per second.
double calibrate_ips(const WorkloadSpec& spec) {
    WorkloadResult r = run_workload(spec, nullptr, {});
    const double elapsed = median(r.elapsed_s);
    if (elapsed <= 0.0) return 1.0;
    return static_cast<double>(spec.iterations_per_thread()) / elapsed;
}

MonitorConfig config_for_rate(Mode mode, double rate) {
    MonitorConfig config;
    config.mode = mode;
    config.detection_period_ms = detection_period_for_rate(rate);
    config.rate_window_ms = std::max<int64_t>(200, 8 * config.detection_period_ms);
    const double window_s = static_cast<double>(config.rate_window_ms) / 1000.0;
    config.window_capacity = static_cast<uint32_t>(
        std::clamp(2.0 * rate * window_s, 256.0, 4096.0));
    return config;
}

SessionOptions options_for(const WorkloadSpec& spec, const MonitorConfig& config,
                           double ips, double rate) {
    SessionOptions options;
    options.config = config;
    options.thread_count = spec.thread_count;
    options.beats_every =
        static_cast<uint64_t>(std::max<int64_t>(1, std::llround(ips / rate)));
    options.spawn_monitors = true;
    return options;
}

// ---------------------------------------------------------------------------
// Criterion 1: four injected behaviors on Jacobi, 20 seeded runs each, both
// monitor modes, every run must label the injected behavior on its target.
Outcome criterion_behavior_correctness() {
    const double t0 = now_s();
    WorkloadSpec probe;
    probe.kind = WorkloadKind::Jacobi;
    probe.thread_count = 4;
    probe.jacobi_grid = 256;
    probe.jacobi_cycles = 4000;
    probe.validate();
    WorkloadResult probe_run = run_workload(probe, nullptr, {});
    const double cycles_per_s =
        static_cast<double>(probe.jacobi_cycles) / std::max(1e-9, probe_run.wall_s);
    const double ips = calibrate_ips(probe);

    const auto cycles_for = [&](double seconds) {
        return std::max(1000, static_cast<int>(std::llround(seconds * cycles_per_s)));
    };

    struct Scenario {
        BehaviorState behavior;
        int64_t base_start_ms;
        int64_t duration_ms;
        double run_s;
    };
    // Busy-wait detection needs a settled baseline (one full rate window)
    // before the episode and a pure window inside it; the others only need
    // the trigger comfortably inside the run.
    const std::vector<Scenario> scenarios = {
        {BehaviorState::BusyWaiting, 450, 400, 1.15},
        {BehaviorState::ConditionalWaiting, 150, 250, 0.65},
        {BehaviorState::Exit, 150, 0, 0.45},
        {BehaviorState::Failure, 150, 0, 0.45},
    };

    int total = 0;
    int correct = 0;
    std::string first_failures;
    for (Mode mode : {Mode::Centralized, Mode::Decentralized}) {
        for (const Scenario& sc : scenarios) {
            WorkloadSpec spec = probe;
            spec.jacobi_cycles = cycles_for(sc.run_s);
            for (uint64_t seed = 1; seed <= 20; ++seed) {
                std::mt19937_64 rng(seed * 1315423911ull + static_cast<uint64_t>(mode));
                InjectionSpec inj;
                inj.target_thread = static_cast<int>(seed % 4);
                inj.behavior = sc.behavior;
                inj.start_ms = sc.base_start_ms +
                               static_cast<int64_t>(rng() % 50);
                inj.duration_ms = sc.duration_ms;

                const MonitorConfig config = config_for_rate(mode, 1000.0);
                Session session(options_for(spec, config, ips, 1000.0));
                session.start();
                WorkloadResult r = run_workload(spec, &session, {inj});
                // finished() retires the monitors via the stop flag; a failed
                // thread never exits, so waiting on all_exited would hang.
                session.finished();
                const auto events = session.events().snapshot();

                ++total;
                bool ok = false;
                if (!r.injections.empty() && r.injections[0].triggered_at_ns >= 0) {
                    const int64_t trigger = r.injections[0].triggered_at_ns;
                    for (const auto& ev : events)
                        if (ev.subject_id == inj.target_thread && ev.state == sc.behavior &&
                            ev.detected_at_ns >= trigger) {
                            ok = true;
                            break;
                        }
                }
                if (ok) {
                    ++correct;
                } else if (first_failures.size() < 120) {
                    first_failures += " [" + std::string(to_string(sc.behavior)) + "/" +
                                      to_string(mode) + "/seed" + std::to_string(seed) + "]";
                }
            }
        }
    }
    const double elapsed = now_s() - t0;
    std::ostringstream detail;
    detail << correct << "/" << total << " runs labeled correctly in " << std::fixed
           << std::setprecision(1) << elapsed << "s";
    if (!first_failures.empty()) detail << "; failed:" << first_failures;
    return {correct == total && elapsed < 300.0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: detection_period 1 ms at >= 1000 beats/s; Exit and Failure
// medians finite and <= 5 ms.
Outcome criterion_detection_latency() {
    WorkloadSpec probe;
    probe.kind = WorkloadKind::Pi;
    probe.thread_count = 4;
    probe.pi_iterations_per_thread = 10'000'000;
    WorkloadResult probe_run = run_workload(probe, nullptr, {});
    const double ips = calibrate_ips(probe);
    const double per_second =
        static_cast<double>(probe.pi_iterations_per_thread) / std::max(1e-9, probe_run.wall_s);

    WorkloadSpec spec = probe;
    spec.pi_iterations_per_thread =
        std::max<int64_t>(1'000'000, std::llround(0.6 * per_second));

    std::map<BehaviorState, std::vector<double>> latencies;
    std::vector<double> beat_rates;
    for (BehaviorState behavior : {BehaviorState::Exit, BehaviorState::Failure}) {
        for (int rep = 0; rep < 5; ++rep) {
            InjectionSpec inj;
            inj.target_thread = 2;
            inj.behavior = behavior;
            inj.start_ms = 250;

            // This criterion pins the polling period at 1 ms explicitly.
            MonitorConfig config;
            config.mode = Mode::Centralized;
            config.detection_period_ms = 1;
            config.rate_window_ms = 200;
            config.window_capacity = 512;
            Session session(options_for(spec, config, ips, 1000.0));
            session.start();
            WorkloadResult r = run_workload(spec, &session, {inj});
            session.finished();  // stop-flag retire: a failed thread never exits
            const auto events = session.events().snapshot();

            for (int id = 0; id < spec.thread_count; ++id) {
                if (id == inj.target_thread) continue;
                const auto snap = session.table().read_sequence(id);
                const double elapsed = r.elapsed_s[static_cast<size_t>(id)];
                if (elapsed > 0.0)
                    beat_rates.push_back(static_cast<double>(snap.last_seq_no) / elapsed);
            }

            auto samples = measure_latency(events, r.injections);
            if (samples.size() == 1 && samples[0].detected)
                latencies[behavior].push_back(samples[0].latency_ms);
        }
    }

    const double exit_median = latencies[BehaviorState::Exit].size() == 5
                                   ? median(latencies[BehaviorState::Exit])
                                   : -1.0;
    const double failure_median = latencies[BehaviorState::Failure].size() == 5
                                      ? median(latencies[BehaviorState::Failure])
                                      : -1.0;
    const double rate_median = median(beat_rates);
    std::ostringstream detail;
    detail << std::fixed << std::setprecision(2) << "exit median " << exit_median
           << " ms, failure median " << failure_median << " ms at period 1 ms, "
           << std::setprecision(0) << rate_median << " beats/s";
    const bool pass = exit_median >= 0.0 && exit_median <= 5.0 && failure_median >= 0.0 &&
                      failure_median <= 5.0 && rate_median >= 1000.0;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 3: overhead <= 5% at 1000 beats/s and overhead(10) <=
// overhead(1000) per workload, median-of-5.
Outcome criterion_overhead() {
    const double t0 = now_s();
    // Runs near one second so scheduler noise averages out; Jacobi gets a
    // large grid so its per-cycle barrier fires rarely enough not to amplify
    // monitor wakeups into a reschedule convoy.
    std::vector<WorkloadSpec> specs(3);
    specs[0].kind = WorkloadKind::Pi;
    specs[0].pi_iterations_per_thread = 50'000'000;
    specs[1].kind = WorkloadKind::Jacobi;
    specs[1].jacobi_grid = 768;
    specs[1].jacobi_cycles = 2'400;
    specs[2].kind = WorkloadKind::MatMul;
    specs[2].matmul_dim = 768;

    bool pass = true;
    std::ostringstream detail;
    detail << std::fixed << std::setprecision(4);
    for (const WorkloadSpec& spec : specs) {
        ExperimentConfig config;
        config.workload = spec;
        config.mode = Mode::Centralized;
        config.rate_targets = {10.0, 1000.0};
        config.repetitions = 7;
        MetricsReport report = run_experiment(config);
        const double slow = report.rows[0].overhead;
        const double fast = report.rows[1].overhead;
        const bool ok = fast <= 0.05 && slow <= fast;
        pass = pass && ok;
        detail << to_string(spec.kind) << " o(10)=" << slow << " o(1000)=" << fast
               << (ok ? "; " : " <- violated; ");
    }
    detail << std::setprecision(1) << "in " << (now_s() - t0) << "s";
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 4: median exit-detection latency strictly decreases over rate
// targets {10, 100, 1000}.
Outcome criterion_latency_trend() {
    WorkloadSpec probe;
    probe.kind = WorkloadKind::Pi;
    probe.thread_count = 4;
    probe.pi_iterations_per_thread = 10'000'000;
    WorkloadResult probe_run = run_workload(probe, nullptr, {});
    const double per_second =
        static_cast<double>(probe.pi_iterations_per_thread) / std::max(1e-9, probe_run.wall_s);

    ExperimentConfig config;
    config.workload = probe;
    config.workload.pi_iterations_per_thread =
        std::max<int64_t>(1'000'000, std::llround(0.8 * per_second));
    config.mode = Mode::Centralized;
    config.rate_targets = {10.0, 100.0, 1000.0};
    config.repetitions = 5;
    InjectionSpec inj;
    inj.target_thread = 2;
    inj.behavior = BehaviorState::Exit;
    inj.start_ms = 450;
    config.injections.push_back(inj);

    MetricsReport report = run_experiment(config);
    std::vector<double> medians;
    for (const RateMetrics& row : report.rows) {
        std::vector<double> detected;
        for (const LatencySample& sample : row.latencies)
            if (sample.detected) detected.push_back(sample.latency_ms);
        if (detected.size() != row.latencies.size() || detected.empty()) {
            return {false, "NotDetected latencies at rate " +
                               std::to_string(static_cast<int>(row.target_rate))};
        }
        medians.push_back(median(detected));
    }
    const bool pass = medians[0] > medians[1] && medians[1] > medians[2];
    std::ostringstream detail;
    detail << std::fixed << std::setprecision(2) << "medians " << medians[0] << " > "
           << medians[1] << " > " << medians[2] << " ms over rates {10,100,1000}";
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 5: on an identical frozen trace of 10 healthy workers, the
// decentralized maximum per-detector query count is 10% +/- 1 query of the
// centralized monitor's total.
Outcome criterion_query_decentralization() {
    const int threads = 10;
    HeartbeatTable table(1024);
    for (int id = 0; id < threads; ++id) table.register_thread(id);
    for (int id = 0; id < threads; ++id) {
        auto& seq = table.sequence(id);
        for (int64_t t = 10; t <= 2000; t += 10) seq.record(1, t, t * 1'000'000);
    }

    MonitorConfig config;
    config.detection_period_ms = 10;
    config.rate_window_ms = 200;

    ReplayResult central = replay_detection(table, config);
    MonitorConfig ring_config = config;
    ring_config.mode = Mode::Decentralized;
    ReplayResult ring = replay_detection(table, ring_config);

    const double expected = 0.10 * static_cast<double>(central.queries.total);
    const double diff =
        std::abs(static_cast<double>(ring.queries.max_per_detector) - expected);
    std::ostringstream detail;
    detail << "central total " << central.queries.total << ", decentralized max "
           << ring.queries.max_per_detector << ", 10% target " << expected << " (diff "
           << diff << ")";
    return {diff <= 1.0 && central.queries.total > 0, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 6: closed-loop convergence in <= 5 rounds for targets
// {10, 100, 1000} on a synthetic fixed-speed workload, plus the algebraic
// identity iteration = average/expected on 1000 random inputs.
Outcome criterion_rate_convergence() {
    const double iterations_per_s = 1.0e5;
    std::ostringstream detail;
    bool pass = true;
    for (double target : {10.0, 100.0, 1000.0}) {
        BeatPacing pacing(4, 40'000);
        int rounds = 0;
        double observed = iterations_per_s / static_cast<double>(pacing.interval(0));
        while (std::abs(observed - target) > 0.05 * target && rounds < 5) {
            RateAdjustment adj = adjust_heart_rate(observed, target, 0.05 * target, 1000);
            if (adj.unchanged) break;
            apply_adjustment(pacing, adj.iteration);
            observed = iterations_per_s / static_cast<double>(pacing.interval(0));
            ++rounds;
        }
        const bool converged = std::abs(observed - target) <= 0.05 * target;
        pass = pass && converged;
        detail << "target " << target << ": " << rounds << (rounds == 1 ? " round" : " rounds")
               << (converged ? "; " : " (stuck); ");
    }

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> rate(1e-3, 1e4);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double average = rate(rng);
        const double expected = rate(rng);
        RateAdjustment adj = adjust_heart_rate(average, expected, 0.0, 1000);
        if (adj.unchanged) continue;
        const double ideal = average / expected;
        worst = std::max(worst, std::abs(adj.iteration - ideal) / std::max(1.0, ideal));
    }
    pass = pass && worst <= 1e-12;
    detail << "identity worst rel err " << worst;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 7: concurrent stress with self-validating payloads, persist/load
// identity on random tables, and windowed rates vs brute-force counting.
Outcome criterion_core_properties() {
    std::ostringstream detail;

    // 8 writers, 4 readers, 100000 heartbeats through a capacity that forces
    // constant eviction. Payload rule: loop_id = thread+1, iteration =
    // seq_no*7 + thread, so any torn read shows up as a payload mismatch.
    const int writers = 8;
    const int64_t beats_each = 12'500;
    HeartbeatTable table(512);
    for (int id = 0; id < writers; ++id) table.register_thread(id);
    std::atomic<bool> stop{false};
    std::atomic<uint64_t> violations{0};
    std::atomic<uint64_t> snapshots_taken{0};

    std::vector<std::thread> readers;
    for (int rt = 0; rt < 4; ++rt)
        readers.emplace_back([&, rt] {
            std::mt19937_64 rng(static_cast<uint64_t>(rt) + 17);
            std::vector<uint64_t> highest(writers, 0);
            while (!stop.load(std::memory_order_acquire)) {
                const int id = static_cast<int>(rng() % writers);
                SequenceSnapshot snap = table.read_sequence(id);
                snapshots_taken.fetch_add(1, std::memory_order_relaxed);
                if (snap.last_seq_no < highest[static_cast<size_t>(id)])
                    violations.fetch_add(1);  // published counter regressed
                highest[static_cast<size_t>(id)] = snap.last_seq_no;
                uint64_t expect = snap.empty() ? 0 : snap.records.front().seq_no;
                int64_t prev_ts = INT64_MIN;
                for (const Heartbeat& hb : snap.records) {
                    const bool payload_ok =
                        hb.thread_id == id && hb.loop_id == id + 1 &&
                        hb.iteration == static_cast<int64_t>(hb.seq_no) * 7 + id;
                    if (!payload_ok || hb.seq_no != expect || hb.timestamp_ns < prev_ts)
                        violations.fetch_add(1);
                    ++expect;
                    prev_ts = hb.timestamp_ns;
                }
                if (!snap.records.empty() &&
                    snap.records.back().seq_no != snap.last_seq_no)
                    violations.fetch_add(1);
            }
        });

    std::vector<std::thread> team;
    for (int id = 0; id < writers; ++id)
        team.emplace_back([&, id] {
            auto& seq = table.sequence(id);
            // The single writer knows the seq_no it is about to be assigned,
            // so the payload can encode it for the readers to cross-check.
            for (int64_t i = 1; i <= beats_each; ++i)
                seq.record(id + 1, i * 7 + id, now_ns());
        });
    for (auto& w : team) w.join();
    stop.store(true, std::memory_order_release);
    for (auto& r : readers) r.join();

    bool stress_ok = violations.load() == 0 && snapshots_taken.load() > 1000;
    for (int id = 0; id < writers; ++id)
        stress_ok = stress_ok && table.read_sequence(id).last_seq_no ==
                                     static_cast<uint64_t>(beats_each);
    detail << "stress: " << violations.load() << " violations over "
           << snapshots_taken.load() << " snapshots; ";

    // Persist -> load identity on 100 random tables.
    const auto dir = std::filesystem::temp_directory_path() / "hbtm_acceptance_logs";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(4242);
    int identity_ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const uint32_t capacity = 64 + static_cast<uint32_t>(rng() % 192);
        const int threads = 1 + static_cast<int>(rng() % 6);
        HeartbeatTable original(capacity);
        for (int id = 0; id < threads; ++id) original.register_thread(id);
        if (rng() % 2) original.set_session_label("trial-" + std::to_string(trial));
        for (int id = 0; id < threads; ++id) {
            auto& seq = original.sequence(id);
            const int beats = static_cast<int>(rng() % 300);
            int64_t ts = static_cast<int64_t>(rng() % 1000);
            for (int b = 0; b < beats; ++b) {
                ts += static_cast<int64_t>(rng() % 1'000'000);
                seq.record(static_cast<int64_t>(rng() % 5),
                           static_cast<int64_t>(rng() % 1'000'000), ts);
            }
            if (rng() % 3 == 0) seq.mark_exit();
        }
        const std::string path = (dir / ("t" + std::to_string(trial) + ".log")).string();
        persist_log(original, path);
        HeartbeatTable loaded = load_log(path, capacity);
        const std::string repath = (dir / "again.log").string();
        persist_log(loaded, repath);
        std::ifstream a(path), b(repath);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (retained_equal(original, loaded) && sa.str() == sb.str()) ++identity_ok;
    }
    detail << "persist/load identity " << identity_ok << "/100; ";

    // Windowed rate vs brute-force counting on 1000 random sequences.
    int rate_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        SequenceSnapshot snap;
        snap.started = true;
        const int beats = static_cast<int>(rng() % 40);
        std::vector<int64_t> stamps;
        for (int b = 0; b < beats; ++b)
            stamps.push_back(static_cast<int64_t>(rng() % 5'000'000'000ull));
        std::sort(stamps.begin(), stamps.end());
        uint64_t seq_no = 0;
        for (int64_t ts : stamps) {
            Heartbeat hb;
            hb.seq_no = ++seq_no;
            hb.timestamp_ns = ts;
            snap.records.push_back(hb);
        }
        snap.last_seq_no = seq_no;
        const int64_t window_ms = 1 + static_cast<int64_t>(rng() % 1000);
        const int64_t now = static_cast<int64_t>(rng() % 6'000'000'000ull);
        int count = 0;
        for (int64_t ts : stamps)
            if (ts > now - window_ms * 1'000'000 && ts <= now) ++count;
        const double brute =
            static_cast<double>(count) / (static_cast<double>(window_ms) / 1000.0);
        const double got = compute_heart_rate(snap, now, window_ms);
        if (std::abs(got - brute) <= 1e-12 * std::max(1.0, brute)) ++rate_ok;
    }
    detail << "rate vs brute force " << rate_ok << "/1000";

    return {stress_ok && identity_ok == 100 && rate_ok == 1000, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 8: threaded kernels match the sequential references, with and
// without heartbeats enabled.
Outcome criterion_kernel_correctness() {
    std::ostringstream detail;
    detail << std::scientific << std::setprecision(2);
    bool pass = true;

    WorkloadSpec pi;
    pi.kind = WorkloadKind::Pi;
    pi.thread_count = 4;
    pi.pi_iterations_per_thread = 1'000'000;
    const double pi_ref = pi_reference(4 * pi.pi_iterations_per_thread);

    WorkloadSpec jacobi;
    jacobi.kind = WorkloadKind::Jacobi;
    jacobi.thread_count = 3;
    jacobi.jacobi_grid = 96;
    jacobi.jacobi_cycles = 300;
    const double jacobi_ref = jacobi_reference(jacobi.jacobi_grid, jacobi.jacobi_cycles);

    WorkloadSpec matmul;
    matmul.kind = WorkloadKind::MatMul;
    matmul.thread_count = 4;
    matmul.matmul_dim = 96;
    matmul.matmul_chunk = 13;
    const double matmul_ref = matmul_reference(matmul.matmul_dim);

    for (bool instrumented : {false, true}) {
        std::unique_ptr<Session> session;
        const auto run = [&](const WorkloadSpec& spec) {
            if (!instrumented) return run_workload(spec, nullptr, {});
            SessionOptions options;
            options.thread_count = spec.thread_count;
            options.beats_every = 500;
            options.spawn_monitors = false;
            session = std::make_unique<Session>(options);
            session->start();
            WorkloadResult r = run_workload(spec, session.get(), {});
            session->finished();
            return r;
        };
        const double pi_err = std::abs(run(pi).value - pi_ref);
        const double jacobi_err =
            std::abs(run(jacobi).value - jacobi_ref) / std::abs(jacobi_ref);
        const double matmul_err =
            std::abs(run(matmul).value - matmul_ref) / std::abs(matmul_ref);
        pass = pass && pi_err <= 1e-6 && jacobi_err <= 1e-9 && matmul_err <= 1e-9;
        detail << (instrumented ? "with beats: " : "without beats: ") << "pi " << pi_err
               << " abs, jacobi " << jacobi_err << " rel, matmul " << matmul_err
               << " rel; ";
    }
    // The estimate itself lands on pi.
    pass = pass && std::abs(pi_ref - M_PI) <= 1e-6;
    return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const std::vector<Criterion> criteria = {
        {"behavior detection correctness", criterion_behavior_correctness},
        {"detection latency bounds", criterion_detection_latency},
        {"instrumentation overhead", criterion_overhead},
        {"latency decreases with rate", criterion_latency_trend},
        {"query-load decentralization", criterion_query_decentralization},
        {"rate controller convergence", criterion_rate_convergence},
        {"core concurrency and persistence properties", criterion_core_properties},
        {"kernel correctness", criterion_kernel_correctness},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<size_t>(only) != i + 1) continue;
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (outcome.pass ? "PASS" : "FAIL") << ": " << (i + 1) << " "
                  << criteria[i].name << " (" << outcome.detail << ")" << std::endl;
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
