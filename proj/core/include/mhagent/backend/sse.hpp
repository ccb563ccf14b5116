#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mhagent::backend {

struct SseEvent {
    std::string event;  // empty when the stream did not name it
    std::string data;   // multi-line data joined with '\n'
};

// Incremental server-sent-events decoder. Bytes may arrive split anywhere;
// complete events are returned as soon as their blank-line terminator is seen.
class SseParser {
public:
    std::vector<SseEvent> feed(std::string_view bytes);

private:
    std::string buffer_;
    SseEvent pending_;
    bool has_data_ = false;
};

// "event: <name>\ndata: <line>\n...\n\n"
std::string format_sse(std::string_view event, std::string_view data);

}  // namespace mhagent::backend
