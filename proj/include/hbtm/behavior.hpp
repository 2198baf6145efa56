#pragma once

#include <cstdint>
#include <string_view>

namespace hbtm {

/// Classification outcome for one thread at one detection instant.
enum class BehaviorState : uint8_t {
    NotStarted,
    Running,
    BusyWaiting,
    ConditionalWaiting,
    Exit,
    Failure,
};

constexpr std::string_view to_string(BehaviorState s) {
    switch (s) {
        case BehaviorState::NotStarted: return "NotStarted";
        case BehaviorState::Running: return "Running";
        case BehaviorState::BusyWaiting: return "BusyWaiting";
        case BehaviorState::ConditionalWaiting: return "ConditionalWaiting";
        case BehaviorState::Exit: return "Exit";
        case BehaviorState::Failure: return "Failure";
    }
    return "?";
}

bool behavior_from_string(std::string_view name, BehaviorState& out);

/// Alive in the ring-walk sense: the thread is making (possibly degraded)
/// progress, so a walk looking for a live detector target stops here.
constexpr bool is_alive_state(BehaviorState s) {
    return s == BehaviorState::Running || s == BehaviorState::BusyWaiting;
}

}  // namespace hbtm
