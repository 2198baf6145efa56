#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hbtm/bench.hpp"
#include "hbtm/errors.hpp"
#include "hbtm/events.hpp"
#include "hbtm/log_io.hpp"

namespace {

int64_t parse_count(const std::string& text, const std::string& what) {
    try {
        size_t used = 0;
        const int64_t value = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw hbtm::ConfigError("bad " + what + ": '" + text + "'");
    }
}

// Grammar: <behavior>@<thread>:<start_ms>[+<duration_ms>]
// where behavior is one of busywait, condwait, exit, failure.
hbtm::InjectionSpec parse_injection(const std::string& text) {
    const size_t at = text.find('@');
    const size_t colon = text.find(':', at == std::string::npos ? 0 : at);
    if (at == std::string::npos || colon == std::string::npos || colon < at)
        throw hbtm::ConfigError("injection must look like behavior@thread:ms[+dur]: '" + text +
                                "'");

    hbtm::InjectionSpec spec;
    const std::string name = text.substr(0, at);
    if (name == "busywait")
        spec.behavior = hbtm::BehaviorState::BusyWaiting;
    else if (name == "condwait")
        spec.behavior = hbtm::BehaviorState::ConditionalWaiting;
    else if (name == "exit")
        spec.behavior = hbtm::BehaviorState::Exit;
    else if (name == "failure")
        spec.behavior = hbtm::BehaviorState::Failure;
    else
        throw hbtm::ConfigError("unknown injection behavior: '" + name + "'");

    spec.target_thread = static_cast<int>(parse_count(text.substr(at + 1, colon - at - 1),
                                                      "injection thread"));
    std::string when = text.substr(colon + 1);
    const size_t plus = when.find('+');
    if (plus != std::string::npos) {
        spec.duration_ms = parse_count(when.substr(plus + 1), "injection duration");
        when.resize(plus);
    }
    spec.start_ms = parse_count(when, "injection start");
    return spec;
}

std::string format_ms(double ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ms);
    return buf;
}

void print_report(const hbtm::MetricsReport& report) {
    std::printf("workload %s, %s, %d threads, %d repetitions, seed %llu\n",
                report.workload.c_str(), to_string(report.mode), report.thread_count,
                report.repetitions, static_cast<unsigned long long>(report.seed));
    std::printf("baseline e_beta = %.6f s\n", report.e_beta_s);
    std::printf("%12s %14s %12s %10s\n", "target_rate", "achieved_rate", "e_alpha_s", "overhead");
    for (const hbtm::RateMetrics& row : report.rows)
        std::printf("%12.1f %14.2f %12.6f %9.2f%%\n", row.target_rate, row.achieved_rate,
                    row.e_alpha_s, row.overhead * 100.0);
    for (const hbtm::RateMetrics& row : report.rows) {
        for (const hbtm::LatencySample& sample : row.latencies) {
            std::printf("rate %.1f: %s on thread %d -> %s\n", row.target_rate,
                        std::string(to_string(sample.behavior)).c_str(), sample.target_thread,
                        sample.detected ? (format_ms(sample.latency_ms) + " ms").c_str()
                                        : "NotDetected");
        }
        if (!row.queries.empty()) {
            std::printf("rate %.1f queries:", row.target_rate);
            for (const hbtm::QueryCount& q : row.queries)
                std::printf(" %d:%llu", q.detector_id, static_cast<unsigned long long>(q.count));
            std::printf("\n");
        }
    }
}

int do_run(const hbtm::ExperimentConfig& config) {
    const hbtm::MetricsReport report = hbtm::run_experiment(config);
    print_report(report);
    if (!config.out_dir.empty())
        std::printf("report files written to %s\n", config.out_dir.c_str());
    return 0;
}

int do_replay(const std::string& log_path, hbtm::Mode mode, int64_t period_ms) {
    const hbtm::HeartbeatTable table = hbtm::load_log(log_path);
    hbtm::MonitorConfig config;
    config.mode = mode;
    config.detection_period_ms = period_ms;
    const hbtm::ReplayResult result = hbtm::replay_detection(table, config);
    for (const hbtm::DetectionEvent& ev : result.events)
        std::printf("%s\n", hbtm::to_csv_line(ev).c_str());
    std::printf("periods=%llu events=%zu queries_total=%llu queries_max_per_detector=%llu\n",
                static_cast<unsigned long long>(result.periods), result.events.size(),
                static_cast<unsigned long long>(result.queries.total),
                static_cast<unsigned long long>(result.queries.max_per_detector));
    return 0;
}

int do_report(const std::string& dir) {
    const std::string path = dir + "/report.json";
    std::ifstream in(path);
    if (!in) throw hbtm::IoError("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    print_report(hbtm::report_from_json(text.str()));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heartbeat-based behavior monitor for multithreaded workloads"};
    app.require_subcommand(1);

    std::string workload_name = "pi";
    std::string mode_name = "centralized";
    std::string out_dir;
    std::vector<double> rates{1000.0};
    std::vector<std::string> inject_args;
    int threads = 4;
    int reps = 3;
    uint64_t seed = 1;
    int64_t pi_iters = -1;
    int grid = -1;
    int cycles = -1;
    int dim = -1;

    CLI::App* run = app.add_subcommand("run", "Run a workload sweep and report metrics");
    run->add_option("--workload", workload_name, "pi, jacobi or matmul")
        ->check(CLI::IsMember({"pi", "jacobi", "matmul"}));
    run->add_option("--mode", mode_name, "centralized or decentralized")
        ->check(CLI::IsMember({"centralized", "decentralized"}));
    run->add_option("--threads", threads, "worker thread count (1..8)");
    run->add_option("--rate", rates, "heart-rate targets, beats/s")->delimiter(',');
    run->add_option("--reps", reps, "repetitions per configuration (>= 3)");
    run->add_option("--inject", inject_args,
                    "behavior@thread:start_ms[+duration_ms]; behaviors: busywait, condwait, "
                    "exit, failure");
    run->add_option("--seed", seed, "injection schedule seed");
    run->add_option("--out", out_dir, "directory for report files and trace logs");
    run->add_option("--pi-iters", pi_iters, "pi iterations per thread");
    run->add_option("--grid", grid, "jacobi grid size");
    run->add_option("--cycles", cycles, "jacobi sweep cycles");
    run->add_option("--dim", dim, "matmul matrix dimension");

    std::string log_path;
    std::string replay_mode_name = "centralized";
    int64_t period_ms = 10;
    CLI::App* replay = app.add_subcommand("replay", "Re-run detection over a persisted trace log");
    replay->add_option("--log", log_path, "trace log file")->required();
    replay->add_option("--mode", replay_mode_name, "centralized or decentralized")
        ->check(CLI::IsMember({"centralized", "decentralized"}));
    replay->add_option("--period", period_ms, "detection period, ms");

    std::string report_dir;
    CLI::App* report = app.add_subcommand("report", "Print a previously written report");
    report->add_option("--dir", report_dir, "directory holding report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            hbtm::ExperimentConfig config;
            if (!hbtm::workload_from_string(workload_name, config.workload.kind))
                throw hbtm::ConfigError("unknown workload: " + workload_name);
            if (!hbtm::mode_from_string(mode_name, config.mode))
                throw hbtm::ConfigError("unknown mode: " + mode_name);
            config.workload.thread_count = threads;
            if (pi_iters > 0) config.workload.pi_iterations_per_thread = pi_iters;
            if (grid > 0) config.workload.jacobi_grid = grid;
            if (cycles > 0) config.workload.jacobi_cycles = cycles;
            if (dim > 0) config.workload.matmul_dim = dim;
            config.rate_targets = rates;
            config.repetitions = reps;
            config.seed = seed;
            config.out_dir = out_dir;
            for (const std::string& text : inject_args)
                config.injections.push_back(parse_injection(text));
            return do_run(config);
        }
        if (replay->parsed()) {
            hbtm::Mode mode = hbtm::Mode::Centralized;
            if (!hbtm::mode_from_string(replay_mode_name, mode))
                throw hbtm::ConfigError("unknown mode: " + replay_mode_name);
            return do_replay(log_path, mode, period_ms);
        }
        if (report->parsed()) return do_report(report_dir);
    } catch (const hbtm::WorkloadFailure& e) {
        std::fprintf(stderr, "workload failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
