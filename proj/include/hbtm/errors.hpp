#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hbtm {

/// Registering a thread id that is already present in the table.
class DuplicateThreadId : public std::logic_error {
public:
    explicit DuplicateThreadId(int thread_id)
        : std::logic_error("thread id already registered: " + std::to_string(thread_id)),
          thread_id(thread_id) {}
    int thread_id;
};

/// Registration attempted after the application was marked finished.
class AlreadyFinished : public std::logic_error {
public:
    AlreadyFinished() : std::logic_error("application already marked finished") {}
};

/// Heartbeat emitted after the owning thread marked itself exited.
class AfterExit : public std::logic_error {
public:
    explicit AfterExit(int thread_id)
        : std::logic_error("heartbeat after exit on thread " + std::to_string(thread_id)),
          thread_id(thread_id) {}
    int thread_id;
};

/// Lookup of a thread id that was never registered.
class UnknownThreadId : public std::out_of_range {
public:
    explicit UnknownThreadId(int thread_id)
        : std::out_of_range("unknown thread id: " + std::to_string(thread_id)),
          thread_id(thread_id) {}
    int thread_id;
};

/// Ring detection requires at least two threads.
class SingletonRing : public std::logic_error {
public:
    SingletonRing() : std::logic_error("ring detection needs at least 2 threads") {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Log file parse failure; `line` is the 1-based offending line number.
class MalformedRecord : public std::runtime_error {
public:
    MalformedRecord(size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    size_t line;
};

class NonPositiveRate : public std::invalid_argument {
public:
    explicit NonPositiveRate(const std::string& what) : std::invalid_argument(what) {}
};

/// Overhead is undefined for a nonpositive baseline time.
class ZeroBaseline : public std::invalid_argument {
public:
    ZeroBaseline() : std::invalid_argument("baseline time must be > 0") {}
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class InvalidSpec : public std::invalid_argument {
public:
    explicit InvalidSpec(const std::string& what) : std::invalid_argument(what) {}
};

/// A workload's numeric result failed its correctness check.
class WorkloadFailure : public std::runtime_error {
public:
    explicit WorkloadFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hbtm
