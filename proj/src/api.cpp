#include "hbtm/api.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <utility>

namespace hbtm::api {

namespace {

std::mutex g_mutex;                        // guards g_session and g_options
std::unique_ptr<Session> g_session;
SessionOptions g_options;
std::atomic<Session*> g_current{nullptr};  // lock-free view for worker-side calls

}  // namespace

void configure(SessionOptions options) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_options = std::move(options);
}

int init(int mode) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_session && g_session->status() != SessionStatus::Finished) return 1;
    if (mode != 0 && mode != 1) return 1;
    SessionOptions options = g_options;
    options.config.mode = mode == 0 ? Mode::Centralized : Mode::Decentralized;
    try {
        auto session = std::make_unique<Session>(std::move(options));
        session->start();
        g_current.store(session.get(), std::memory_order_release);
        g_session = std::move(session);
    } catch (const std::exception&) {
        return 1;
    }
    return 0;
}

void generate(int thread_num, int64_t loop_num, int64_t iteration) {
    if (Session* s = g_current.load(std::memory_order_acquire))
        s->generate(thread_num, loop_num, iteration);
}

void thread_exit(int thread_num) {
    if (Session* s = g_current.load(std::memory_order_acquire)) s->mark_thread_exit(thread_num);
}

int monitor() {
    Session* s = g_current.load(std::memory_order_acquire);
    if (!s || s->status() == SessionStatus::Initialized) return 1;
    s->wait_monitors();
    return 0;
}

int finished() {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_session) return 1;
    return g_session->finished() ? 0 : 1;
}

double heart_rate_adjust(double expected_rate) {
    Session* s = g_current.load(std::memory_order_acquire);
    if (!s) return 0.0;
    return s->heart_rate_adjust(expected_rate);
}

Session* current_session() { return g_current.load(std::memory_order_acquire); }

}  // namespace hbtm::api
