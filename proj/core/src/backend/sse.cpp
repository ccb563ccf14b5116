#include "mhagent/backend/sse.hpp"

namespace mhagent::backend {

std::vector<SseEvent> SseParser::feed(std::string_view bytes) {
    buffer_.append(bytes);
    std::vector<SseEvent> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t nl = buffer_.find('\n', start);
        if (nl == std::string::npos) break;
        std::string_view line(buffer_.data() + start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        start = nl + 1;

        if (line.empty()) {
            if (has_data_ || !pending_.event.empty()) out.push_back(std::move(pending_));
            pending_ = SseEvent{};
            has_data_ = false;
            continue;
        }
        if (line.front() == ':') continue;  // comment
        const std::size_t colon = line.find(':');
        std::string_view field = line.substr(0, colon);
        std::string_view value = colon == std::string_view::npos ? std::string_view{} : line.substr(colon + 1);
        if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        if (field == "data") {
            if (has_data_) pending_.data.push_back('\n');
            pending_.data.append(value);
            has_data_ = true;
        } else if (field == "event") {
            pending_.event.assign(value);
        }
    }
    buffer_.erase(0, start);
    return out;
}

std::string format_sse(std::string_view event, std::string_view data) {
    std::string out;
    if (!event.empty()) {
        out += "event: ";
        out += event;
        out += '\n';
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t nl = data.find('\n', start);
        out += "data: ";
        out += data.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        out += '\n';
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    out += '\n';
    return out;
}

}  // namespace mhagent::backend
