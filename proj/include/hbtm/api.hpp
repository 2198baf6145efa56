#pragma once

#include <cstdint>

#include "hbtm/session.hpp"

namespace hbtm::api {

/// Thin process-wide facade over Session for code instrumented in the style
/// of a C heartbeat library: numeric status codes (0 success, 1 failure), one
/// live session at a time. A finished session may be replaced by a new
/// init(); callers must have joined the previous session's workers first.
///
/// Threading: configure/init/finished from the main thread; generate and
/// thread_exit from each worker's own thread.

/// Set the options (thread count, pacing, log path, ...) used by the next
/// init(). The mode argument of init() overrides options.config.mode.
void configure(SessionOptions options);

/// Create and start the session. `mode` 0 runs one central monitor thread,
/// 1 arms one ring monitor per worker. Returns 0 on success, 1 on failure
/// (live session exists, unknown mode, invalid options).
int init(int mode);

/// Gated heartbeat emission for thread_num; see Session::generate. Dropped
/// when no session is running.
void generate(int thread_num, int64_t loop_num, int64_t iteration);

/// Record the calling worker's orderly exit.
void thread_exit(int thread_num);

/// Block until detection retires (every worker exited, or another thread
/// called finished()). Returns 0; 1 when called before init.
int monitor();

/// Stop heartbeat production, retire monitors, persist the log. Idempotent.
/// Returns 0 on success, 1 on persistence failure or missing session.
int finished();

/// One rate-control round toward expected_rate; returns the rate the team is
/// paced at afterwards (0 when no session or no live thread).
double heart_rate_adjust(double expected_rate);

/// The live (or most recently finished) session, nullptr before the first
/// init. Test hook; the functions above are the supported surface.
Session* current_session();

}  // namespace hbtm::api
