#include "hbtm/rate_control.hpp"

#include <cmath>

#include "hbtm/errors.hpp"

namespace hbtm {

std::optional<double> average_heart_rate(
    const std::vector<std::pair<BehaviorState, double>>& observations) {
    double sum = 0.0;
    size_t counter = 0;
    for (const auto& [state, rate] : observations) {
        if (is_alive_state(state)) {
            sum += rate;
            ++counter;
        }
    }
    if (counter == 0) return std::nullopt;
    return sum / static_cast<double>(counter);
}

RateAdjustment adjust_heart_rate(double average, double expected, double threshold,
                                 int64_t window_iteration) {
    if (!(average > 0.0)) throw NonPositiveRate("average heart rate must be positive");
    if (!(expected > 0.0)) throw NonPositiveRate("expected heart rate must be positive");

    RateAdjustment adj;
    adj.average = average;
    adj.expected = expected;
    adj.threshold = threshold;
    adj.window_iteration = window_iteration;
    if (std::abs(average - expected) <= threshold) {
        adj.unchanged = true;
        return adj;
    }
    adj.time_s = (1.0 / average) * static_cast<double>(window_iteration);
    adj.amount = adj.time_s / (1.0 / expected);
    adj.iteration = static_cast<double>(window_iteration) / adj.amount;
    return adj;
}

void apply_adjustment(BeatPacing& pacing, double iteration_factor) {
    for (size_t t = 0; t < pacing.thread_count(); ++t) {
        const double scaled = static_cast<double>(pacing.interval(t)) * iteration_factor;
        const double rounded = std::round(scaled);
        pacing.set_interval(t, rounded < 1.0 ? 1 : static_cast<uint64_t>(rounded));
    }
}

}  // namespace hbtm
