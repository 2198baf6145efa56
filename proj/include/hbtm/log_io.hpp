#pragma once

#include <cstddef>
#include <string>

#include "hbtm/table.hpp"

namespace hbtm {

/// Heartbeat log, UTF-8 text. Layout:
///
///   hbtm-log v1
///   #session,<label>            (only when the table carries a label)
///   #ring,<id>,<id>,...
///   #start,<id>
///   <thread_id>,<seq_no>,<timestamp_ns>,<loop_id>,<iteration>
///   ...
///   #exit,<id>
///
/// Threads are written in ring order, records in ascending seq_no, so the
/// file is canonical: persist(load(f)) reproduces f byte for byte whenever
/// the load capacity is at least the written window size.
inline constexpr const char* kLogHeader = "hbtm-log v1";

/// Write the table's retained state to `path`. Returns the number of
/// heartbeat record lines written. Throws IoError when the file cannot be
/// created or written.
size_t persist_log(const HeartbeatTable& table, const std::string& path);

/// Parse a log file back into a table. Rejects unknown header versions and
/// reports the 1-based line number of any malformed line. `window_capacity`
/// sizes the rebuilt per-thread windows.
HeartbeatTable load_log(const std::string& path, uint32_t window_capacity = 1024);

/// Retained-state equality: ring order, per-thread markers, last_seq_no and
/// record windows. (Used by round-trip checks; deliberately ignores the
/// application_exited flag, which the log format does not carry.)
bool retained_equal(const HeartbeatTable& a, const HeartbeatTable& b);

}  // namespace hbtm
