#include "hbtm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "hbtm/clock.hpp"
#include "hbtm/errors.hpp"
#include "hbtm/session.hpp"

namespace hbtm {
namespace {

constexpr int64_t kNsPerMs = 1'000'000;

// Shortest exact decimal: 17 significant digits round-trip any double.
std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(const std::string& text, size_t line) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end != begin + text.size() || text.empty() || errno == ERANGE)
        throw MalformedRecord(line, "bad number: '" + text + "'");
    return value;
}

int64_t parse_int(const std::string& text, size_t line) {
    try {
        size_t used = 0;
        const int64_t value = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw MalformedRecord(line, "bad integer: '" + text + "'");
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double reference_value(const WorkloadSpec& spec) {
    switch (spec.kind) {
        case WorkloadKind::Pi:
            return pi_reference(spec.pi_iterations_per_thread * spec.thread_count);
        case WorkloadKind::Jacobi:
            return jacobi_reference(spec.jacobi_grid, spec.jacobi_cycles);
        case WorkloadKind::MatMul:
            return matmul_reference(spec.matmul_dim);
    }
    return 0.0;
}

void check_result(const WorkloadSpec& spec, const WorkloadResult& run, double reference) {
    const double tolerance = 1e-9 * std::max(1.0, std::fabs(reference));
    if (std::fabs(run.value - reference) > tolerance) {
        std::ostringstream msg;
        msg << to_string(spec.kind) << " kernel drifted from its sequential reference: got "
            << format_double(run.value) << ", want " << format_double(reference);
        throw WorkloadFailure(msg.str());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    workload.validate();
    if (repetitions < 3) throw ConfigError("timing experiments need at least 3 repetitions");
    if (rate_targets.empty()) throw ConfigError("at least one heart-rate target is required");
    for (double rate : rate_targets)
        if (!(rate > 0.0)) throw ConfigError("heart-rate targets must be positive");
    if (mode == Mode::Decentralized && workload.thread_count < 2)
        throw ConfigError("decentralized detection needs at least 2 threads");
    for (const InjectionSpec& injection : injections) injection.validate(workload.thread_count);
}

double compute_overhead(double e_alpha_s, double e_beta_s) {
    if (!(e_beta_s > 0.0)) throw ZeroBaseline();
    return (e_alpha_s - e_beta_s) / e_beta_s;
}

std::vector<LatencySample> measure_latency(const std::vector<DetectionEvent>& events,
                                           const std::vector<InjectionOutcome>& injections) {
    std::vector<LatencySample> samples;
    samples.reserve(injections.size());
    for (const InjectionOutcome& outcome : injections) {
        LatencySample sample;
        sample.behavior = outcome.spec.behavior;
        sample.target_thread = outcome.spec.target_thread;
        if (outcome.triggered_at_ns >= 0) {
            int64_t first = 0;
            for (const DetectionEvent& ev : events) {
                if (ev.subject_id != outcome.spec.target_thread) continue;
                if (ev.state != outcome.spec.behavior) continue;
                if (ev.detected_at_ns < outcome.triggered_at_ns) continue;
                if (!sample.detected || ev.detected_at_ns < first) first = ev.detected_at_ns;
                sample.detected = true;
            }
            if (sample.detected)
                sample.latency_ms =
                    static_cast<double>(first - outcome.triggered_at_ns) / kNsPerMs;
        }
        samples.push_back(sample);
    }
    return samples;
}

QueryStats count_queries(const std::vector<DetectionEvent>& events) {
    std::map<int, uint64_t> by_detector;
    for (const DetectionEvent& ev : events) ++by_detector[ev.detector_id];
    QueryStats stats;
    stats.per_detector.reserve(by_detector.size());
    for (const auto& [detector, count] : by_detector) {
        stats.per_detector.push_back({detector, count});
        stats.total += count;
        stats.max_per_detector = std::max(stats.max_per_detector, count);
    }
    return stats;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

ReplayResult replay_detection(const HeartbeatTable& table, const MonitorConfig& config,
                              const LivenessOracle& liveness) {
    config.validate();
    const LivenessOracle oracle = liveness ? liveness : LivenessOracle([](int) { return true; });

    int64_t first_beat = 0;
    int64_t last_beat = 0;
    bool any = false;
    for (int id : table.ring_order()) {
        const SequenceSnapshot snap = table.read_sequence(id);
        if (snap.records.empty()) continue;
        if (!any || snap.records.front().timestamp_ns < first_beat)
            first_beat = snap.records.front().timestamp_ns;
        if (!any || snap.records.back().timestamp_ns > last_beat)
            last_beat = snap.records.back().timestamp_ns;
        any = true;
    }

    ReplayResult result;
    if (!any) return result;

    EventLog sink;
    const int64_t period_ns = config.detection_period_ms * kNsPerMs;
    if (config.mode == Mode::Centralized) {
        MonitorState state(table, config, oracle);
        for (int64_t now = first_beat + period_ns; now <= last_beat; now += period_ns) {
            state.tick_centralized(now, sink);
            ++result.periods;
        }
    } else {
        std::vector<MonitorState> states;
        states.reserve(table.size());
        for (size_t i = 0; i < table.size(); ++i) states.emplace_back(table, config, oracle);
        for (int64_t now = first_beat + period_ns; now <= last_beat; now += period_ns) {
            for (size_t i = 0; i < states.size(); ++i)
                states[i].tick_decentralized(table.ring_order()[i], now, sink);
            ++result.periods;
        }
    }
    result.events = sink.snapshot();
    result.queries = count_queries(result.events);
    return result;
}

int64_t detection_period_for_rate(double rate) {
    if (!(rate > 0.0)) throw NonPositiveRate("heart-rate target must be positive");
    // Budget a few beats per detection period: polling once per beat buys no
    // extra evidence, costs wakeups that preempt the workers, and makes the
    // silence threshold (3 periods) shorter than an ordinary scheduler slice
    // on a contended core.
    const auto period_ms = static_cast<int64_t>(std::llround(4000.0 / rate));
    return std::clamp<int64_t>(period_ms, 1, 100);
}

MetricsReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const WorkloadSpec& workload = config.workload;

    MetricsReport report;
    report.workload = to_string(workload.kind);
    report.mode = config.mode;
    report.thread_count = workload.thread_count;
    report.repetitions = config.repetitions;
    report.seed = config.seed;

    const double reference = reference_value(workload);

    // Pre-draw every repetition's injection schedule so the RNG stream is
    // independent of run timing: the seed alone fixes all trigger points.
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int64_t> jitter_ms(0, 25);
    std::vector<std::vector<InjectionSpec>> schedules(static_cast<size_t>(config.repetitions));
    for (auto& schedule : schedules) {
        schedule = config.injections;
        for (InjectionSpec& injection : schedule)
            if (injection.start_ms >= 0) injection.start_ms += jitter_ms(rng);
    }

    const size_t targets = config.rate_targets.size();
    std::vector<double> baseline_s;
    std::vector<std::vector<double>> instrumented_s(targets);
    std::vector<std::vector<double>> achieved(targets);
    std::vector<RateMetrics> rows(targets);
    for (size_t ti = 0; ti < targets; ++ti) rows[ti].target_rate = config.rate_targets[ti];

    double iterations_per_s = 0.0;  // per thread, calibrated from the first baseline run

    for (int rep = 0; rep < config.repetitions; ++rep) {
        WorkloadResult base = run_workload(workload, nullptr, {});
        check_result(workload, base, reference);
        baseline_s.push_back(base.wall_s);
        if (rep == 0) {
            const double busy_s = median(base.elapsed_s);
            if (!(busy_s > 0.0)) throw ZeroBaseline();
            iterations_per_s = static_cast<double>(workload.iterations_per_thread()) / busy_s;
        }

        for (size_t ti = 0; ti < targets; ++ti) {
            const double target = config.rate_targets[ti];
            SessionOptions opts;
            opts.config.mode = config.mode;
            opts.config.detection_period_ms = detection_period_for_rate(target);
            // Slow beating needs a wider measurement window: keep several
            // beats in view so observed rates are not all-or-nothing.
            opts.config.rate_window_ms =
                std::max<int64_t>(opts.config.rate_window_ms, 8 * opts.config.detection_period_ms);
            // Every query scans the retained window, so keep it just large
            // enough to cover the rate window with headroom.
            const double window_beats =
                target * static_cast<double>(opts.config.rate_window_ms) / 1000.0;
            opts.config.window_capacity =
                static_cast<uint32_t>(std::clamp(2.0 * window_beats, 256.0, 4096.0));
            opts.thread_count = workload.thread_count;
            opts.beats_every =
                std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(iterations_per_s / target)));
            opts.label = report.workload;
            if (rep == 0 && !config.out_dir.empty()) {
                std::filesystem::create_directories(config.out_dir);
                opts.log_path = config.out_dir + "/trace_" + report.workload + "_" +
                                to_string(config.mode) + "_r" +
                                std::to_string(static_cast<long long>(std::llround(target))) +
                                ".log";
            }

            Session session(opts);
            session.start();
            WorkloadResult run = run_workload(workload, &session, schedules[static_cast<size_t>(rep)]);
            session.finished();

            instrumented_s[ti].push_back(run.wall_s);
            uint64_t beats = 0;
            for (int id : session.table().ring_order())
                beats += session.table().read_sequence(id).last_seq_no;
            if (run.wall_s > 0.0)
                achieved[ti].push_back(static_cast<double>(beats) / run.wall_s /
                                       workload.thread_count);
            if (schedules[static_cast<size_t>(rep)].empty() && run.result_valid)
                check_result(workload, run, reference);

            const auto events = session.events().snapshot();
            const auto samples = measure_latency(events, run.injections);
            rows[ti].latencies.insert(rows[ti].latencies.end(), samples.begin(), samples.end());
            if (rep == 0) rows[ti].queries = count_queries(events).per_detector;
        }
    }

    report.e_beta_s = median(baseline_s);
    for (size_t ti = 0; ti < targets; ++ti) {
        rows[ti].e_alpha_s = median(instrumented_s[ti]);
        rows[ti].achieved_rate = median(achieved[ti]);
        rows[ti].overhead = compute_overhead(rows[ti].e_alpha_s, report.e_beta_s);
    }
    report.rows = std::move(rows);

    if (!config.out_dir.empty()) write_report_files(report, config.out_dir);
    return report;
}

std::string report_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["hbtm-report"] = 1;
    j["workload"] = report.workload;
    j["mode"] = to_string(report.mode);
    j["thread_count"] = report.thread_count;
    j["repetitions"] = report.repetitions;
    j["seed"] = report.seed;
    j["e_beta_s"] = report.e_beta_s;
    j["rows"] = nlohmann::json::array();
    for (const RateMetrics& row : report.rows) {
        nlohmann::json r;
        r["target_rate"] = row.target_rate;
        r["achieved_rate"] = row.achieved_rate;
        r["e_alpha_s"] = row.e_alpha_s;
        r["overhead"] = row.overhead;
        r["latencies"] = nlohmann::json::array();
        for (const LatencySample& sample : row.latencies) {
            nlohmann::json s;
            s["behavior"] = to_string(sample.behavior);
            s["target_thread"] = sample.target_thread;
            s["detected"] = sample.detected;
            s["latency_ms"] = sample.latency_ms;
            r["latencies"].push_back(std::move(s));
        }
        r["queries"] = nlohmann::json::array();
        for (const QueryCount& q : row.queries)
            r["queries"].push_back({{"detector_id", q.detector_id}, {"count", q.count}});
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(1, e.what());
    }
    try {
        if (j.at("hbtm-report").get<int>() != 1)
            throw MalformedRecord(1, "unsupported report version");
        MetricsReport report;
        report.workload = j.at("workload").get<std::string>();
        if (!mode_from_string(j.at("mode").get<std::string>(), report.mode))
            throw MalformedRecord(1, "unknown mode: " + j.at("mode").get<std::string>());
        report.thread_count = j.at("thread_count").get<int>();
        report.repetitions = j.at("repetitions").get<int>();
        report.seed = j.at("seed").get<uint64_t>();
        report.e_beta_s = j.at("e_beta_s").get<double>();
        for (const auto& r : j.at("rows")) {
            RateMetrics row;
            row.target_rate = r.at("target_rate").get<double>();
            row.achieved_rate = r.at("achieved_rate").get<double>();
            row.e_alpha_s = r.at("e_alpha_s").get<double>();
            row.overhead = r.at("overhead").get<double>();
            for (const auto& s : r.at("latencies")) {
                LatencySample sample;
                if (!behavior_from_string(s.at("behavior").get<std::string>(), sample.behavior))
                    throw MalformedRecord(1,
                                          "unknown behavior: " + s.at("behavior").get<std::string>());
                sample.target_thread = s.at("target_thread").get<int>();
                sample.detected = s.at("detected").get<bool>();
                sample.latency_ms = s.at("latency_ms").get<double>();
                row.latencies.push_back(sample);
            }
            for (const auto& q : r.at("queries"))
                row.queries.push_back(
                    {q.at("detector_id").get<int>(), q.at("count").get<uint64_t>()});
            report.rows.push_back(std::move(row));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(1, e.what());
    }
}

namespace {
constexpr const char* kCsvHeader =
    "workload,mode,thread_count,repetitions,seed,e_beta_s,target_rate,achieved_rate,e_alpha_s,"
    "overhead";
}  // namespace

std::string report_to_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const RateMetrics& row : report.rows) {
        out << report.workload << ',' << to_string(report.mode) << ',' << report.thread_count
            << ',' << report.repetitions << ',' << report.seed << ','
            << format_double(report.e_beta_s) << ',' << format_double(row.target_rate) << ','
            << format_double(row.achieved_rate) << ',' << format_double(row.e_alpha_s) << ','
            << format_double(row.overhead) << '\n';
    }
    return out.str();
}

MetricsReport report_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw MalformedRecord(1, "unrecognized report header");

    MetricsReport report;
    bool scalars_set = false;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 10) throw MalformedRecord(line_no, "expected 10 fields");

        MetricsReport scalars;
        scalars.workload = fields[0];
        if (!mode_from_string(fields[1], scalars.mode))
            throw MalformedRecord(line_no, "unknown mode: " + fields[1]);
        scalars.thread_count = static_cast<int>(parse_int(fields[2], line_no));
        scalars.repetitions = static_cast<int>(parse_int(fields[3], line_no));
        scalars.seed = static_cast<uint64_t>(parse_int(fields[4], line_no));
        scalars.e_beta_s = parse_double(fields[5], line_no);
        if (!scalars_set) {
            report.workload = scalars.workload;
            report.mode = scalars.mode;
            report.thread_count = scalars.thread_count;
            report.repetitions = scalars.repetitions;
            report.seed = scalars.seed;
            report.e_beta_s = scalars.e_beta_s;
            scalars_set = true;
        } else if (scalars.workload != report.workload || scalars.mode != report.mode ||
                   scalars.thread_count != report.thread_count ||
                   scalars.repetitions != report.repetitions || scalars.seed != report.seed ||
                   scalars.e_beta_s != report.e_beta_s) {
            throw MalformedRecord(line_no, "inconsistent experiment scalars");
        }

        RateMetrics row;
        row.target_rate = parse_double(fields[6], line_no);
        row.achieved_rate = parse_double(fields[7], line_no);
        row.e_alpha_s = parse_double(fields[8], line_no);
        row.overhead = parse_double(fields[9], line_no);
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_report_files(const MetricsReport& report, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    const auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = out_dir + "/" + name;
        std::ofstream out(path, std::ios::trunc);
        out << content;
        if (!out) throw IoError("cannot write " + path);
    };

    write("report.json", report_to_json(report));
    write("report.csv", report_to_csv(report));

    std::ostringstream overhead;
    overhead << "target_rate,overhead\n";
    for (const RateMetrics& row : report.rows)
        overhead << format_double(row.target_rate) << ',' << format_double(row.overhead) << '\n';
    write("overhead_vs_rate.csv", overhead.str());

    std::ostringstream latency;
    latency << "target_rate,behavior,median_latency_ms\n";
    for (const RateMetrics& row : report.rows) {
        std::map<BehaviorState, std::vector<double>> detected;
        std::map<BehaviorState, size_t> injected;
        for (const LatencySample& sample : row.latencies) {
            ++injected[sample.behavior];
            if (sample.detected) detected[sample.behavior].push_back(sample.latency_ms);
        }
        for (const auto& [behavior, count] : injected) {
            latency << format_double(row.target_rate) << ',' << to_string(behavior) << ',';
            const auto it = detected.find(behavior);
            if (it == detected.end())
                latency << "NotDetected";
            else
                latency << format_double(median(it->second));
            latency << '\n';
        }
    }
    write("latency_vs_rate.csv", latency.str());

    std::ostringstream queries;
    queries << "target_rate,detector_id,query_count\n";
    for (const RateMetrics& row : report.rows)
        for (const QueryCount& q : row.queries)
            queries << format_double(row.target_rate) << ',' << q.detector_id << ',' << q.count
                    << '\n';
    write("queries.csv", queries.str());
}

}  // namespace hbtm
