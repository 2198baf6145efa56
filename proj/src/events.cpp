#include "hbtm/events.hpp"

#include <limits>
#include <sstream>

namespace hbtm {

std::string to_csv_line(const DetectionEvent& ev) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << ev.detected_at_ns << ',' << ev.detector_id << ',' << ev.subject_id << ','
        << to_string(ev.state) << ',' << ev.observed_rate;
    return out.str();
}

}  // namespace hbtm
