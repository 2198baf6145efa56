#include "hbtm/log_io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>
#include <vector>

namespace hbtm {

namespace {

int64_t parse_int(std::string_view field, size_t line_no) {
    int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw MalformedRecord(line_no, "expected integer, got '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

size_t persist_log(const HeartbeatTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open log file for writing: " + path);

    out << kLogHeader << '\n';
    if (!table.session_label().empty()) out << "#session," << table.session_label() << '\n';

    out << "#ring";
    for (int id : table.ring_order()) out << ',' << id;
    out << '\n';

    size_t records = 0;
    for (int id : table.ring_order()) {
        const SequenceSnapshot snap = table.read_sequence(id);
        if (snap.started) out << "#start," << id << '\n';
        for (const Heartbeat& hb : snap.records) {
            out << hb.thread_id << ',' << hb.seq_no << ',' << hb.timestamp_ns << ','
                << hb.loop_id << ',' << hb.iteration << '\n';
            ++records;
        }
        if (snap.exited) out << "#exit," << id << '\n';
    }

    out.flush();
    if (!out) throw IoError("write failed: " + path);
    return records;
}

HeartbeatTable load_log(const std::string& path, uint32_t window_capacity) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open log file: " + path);

    HeartbeatTable table(window_capacity);
    std::string line;
    size_t line_no = 0;

    if (!std::getline(in, line)) throw MalformedRecord(1, "empty file, missing header");
    ++line_no;
    if (line != kLogHeader)
        throw MalformedRecord(1, "unknown log version: '" + line + "'");

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) throw MalformedRecord(line_no, "blank line");

        if (line[0] == '#') {
            auto fields = split_commas(std::string_view(line).substr(1));
            const std::string_view kind = fields[0];
            if (kind == "session") {
                if (fields.size() != 2) throw MalformedRecord(line_no, "bad session marker");
                table.set_session_label(std::string(fields[1]));
            } else if (kind == "ring") {
                for (size_t i = 1; i < fields.size(); ++i) {
                    const int id = static_cast<int>(parse_int(fields[i], line_no));
                    if (table.contains(id))
                        throw MalformedRecord(line_no, "duplicate ring id " + std::to_string(id));
                    table.register_thread(id);
                }
            } else if (kind == "start" || kind == "exit") {
                if (fields.size() != 2) throw MalformedRecord(line_no, "bad marker line");
                const int id = static_cast<int>(parse_int(fields[1], line_no));
                if (!table.contains(id))
                    throw MalformedRecord(line_no, "marker for unknown thread " + std::to_string(id));
                if (kind == "start")
                    table.sequence(id).restore_started();
                else
                    table.sequence(id).mark_exit();
            } else {
                throw MalformedRecord(line_no, "unknown marker '" + std::string(kind) + "'");
            }
            continue;
        }

        auto fields = split_commas(line);
        if (fields.size() != 5) throw MalformedRecord(line_no, "expected 5 fields");
        Heartbeat hb;
        hb.thread_id = static_cast<int>(parse_int(fields[0], line_no));
        hb.seq_no = static_cast<uint64_t>(parse_int(fields[1], line_no));
        hb.timestamp_ns = parse_int(fields[2], line_no);
        hb.loop_id = parse_int(fields[3], line_no);
        hb.iteration = parse_int(fields[4], line_no);
        if (!table.contains(hb.thread_id)) {
            // Tolerate logs without a ring line; first-seen order becomes the ring.
            table.register_thread(hb.thread_id);
        }
        try {
            table.sequence(hb.thread_id).restore(hb);
        } catch (const std::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }

    return table;
}

bool retained_equal(const HeartbeatTable& a, const HeartbeatTable& b) {
    if (a.ring_order() != b.ring_order()) return false;
    for (int id : a.ring_order()) {
        const SequenceSnapshot sa = a.read_sequence(id);
        const SequenceSnapshot sb = b.read_sequence(id);
        if (sa.started != sb.started || sa.exited != sb.exited) return false;
        if (sa.last_seq_no != sb.last_seq_no) return false;
        if (sa.records != sb.records) return false;
    }
    return true;
}

}  // namespace hbtm
