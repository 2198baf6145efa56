#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hbtm/behavior.hpp"
#include "hbtm/pacing.hpp"

namespace hbtm {

/// One rate-control decision plus the intermediate quantities it was derived
/// from, kept for reporting and tests.
struct RateAdjustment {
    double average = 0.0;           // observed mean heart rate (beats/s)
    double expected = 0.0;          // target heart rate (beats/s)
    double threshold = 0.0;         // tolerance band (beats/s)
    int64_t window_iteration = 1;   // heartbeats per adjustment window
    double time_s = 0.0;            // duration the window spans at the observed rate
    double amount = 0.0;            // beats the target rate would emit in time_s
    double iteration = 1.0;         // multiplier for iterations-between-beats
    bool unchanged = false;         // observed rate already inside the band
};

/// Mean heart rate over the alive threads (latest state Running or
/// BusyWaiting). Waiting, exited, failed and unstarted threads carry no
/// pacing signal and are excluded. Empty optional when no thread qualifies.
std::optional<double> average_heart_rate(
    const std::vector<std::pair<BehaviorState, double>>& observations);

/// Decide a pacing correction. Inside the tolerance band the decision is
/// Unchanged (iteration stays 1). Outside it, the adjustment window is priced
/// in seconds at the observed rate (time_s), converted to the beat count the
/// target rate would produce in that span (amount), and the ratio
/// window_iteration / amount becomes the iterations-between-beats multiplier:
/// beating too fast stretches the interval (iteration > 1), too slow shrinks
/// it. Throws NonPositiveRate unless both rates are positive.
RateAdjustment adjust_heart_rate(double average, double expected, double threshold,
                                 int64_t window_iteration);

/// Apply a correction to every thread's pacing interval: multiply by
/// `iteration_factor`, round to nearest, clamp to at least one iteration per
/// beat.
void apply_adjustment(BeatPacing& pacing, double iteration_factor);

}  // namespace hbtm
