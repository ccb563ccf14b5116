#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <arpa/inet.h>
#include <httplib.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>
#include <nlohmann/json.hpp>

#include "mhagent/backend/remote_backend.hpp"
#include "mhagent/domain/errors.hpp"

using namespace mhagent;
using namespace mhagent::backend;
using nlohmann::json;

namespace {

// Minimal chat-completions server on an ephemeral loopback port.
class StubServer {
public:
    StubServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            last_body_ = json::parse(req.body);
            last_auth_ = req.get_header_value("Authorization");
            const std::string user = last_body_["messages"].back()["content"];
            const bool stream = last_body_.value("stream", false);
            if (user == "fail") {
                res.status = 500;
                res.set_content(R"({"error": {"message": "model exploded"}})", "application/json");
                return;
            }
            if (!stream) {
                json out{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", "re: " + user}}}}})}};
                res.set_content(out.dump(), "application/json");
                return;
            }
            const bool truncate = user == "truncate";
            res.set_chunked_content_provider("text/event-stream", [user, truncate](std::size_t, httplib::DataSink& sink) {
                const std::vector<std::string> parts{"re", ": ", user};
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    if (truncate && i == 2) {
                        sink.done();
                        return true;
                    }
                    json c{{"choices", json::array({{{"delta", {{"content", parts[i]}}}, {"finish_reason", nullptr}}})}};
                    const std::string ev = "data: " + c.dump() + "\n\n";
                    sink.write(ev.data(), ev.size());
                }
                json fin{{"choices", json::array({{{"delta", json::object()}, {"finish_reason", "stop"}}})}};
                const std::string tail = "data: " + fin.dump() + "\n\ndata: [DONE]\n\n";
                sink.write(tail.data(), tail.size());
                sink.done();
                return true;
            });
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int requests() const { return requests_; }
    const json& last_body() const { return last_body_; }
    const std::string& last_auth() const { return last_auth_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> requests_{0};
    json last_body_;
    std::string last_auth_;
};

std::vector<ChatMessage> ask(const std::string& text) { return {system_message("sys"), user_message(text)}; }

RemoteConfig config_for(const std::string& url) {
    RemoteConfig c;
    c.url = url;
    c.backoff = std::chrono::milliseconds(1);
    c.timeout = std::chrono::seconds(5);
    return c;
}

}  // namespace

TEST(RemoteEndpoint, ResolvesPaths) {
    EXPECT_EQ(resolve_endpoint("http://h:1").path, "/v1/chat/completions");
    EXPECT_EQ(resolve_endpoint("http://h:1/").path, "/v1/chat/completions");
    EXPECT_EQ(resolve_endpoint("http://h:1/v1").path, "/v1/chat/completions");
    EXPECT_EQ(resolve_endpoint("http://h:1/api/chat/completions").path, "/api/chat/completions");
    EXPECT_EQ(resolve_endpoint("http://h:1/x").scheme_host_port, "http://h:1");
    EXPECT_THROW(resolve_endpoint("https://h"), ConfigError);
    EXPECT_THROW(resolve_endpoint("ftp://h"), ConfigError);
    EXPECT_THROW(resolve_endpoint("http://"), ConfigError);
}

TEST(RemoteEndpoint, RequestBodyShape) {
    RemoteConfig c;
    c.model = "m";
    GenerationParams p;
    p.temperature = 0.2;
    p.max_tokens = 350;
    p.seed = 9;
    const auto body = build_request(c, ask("hi"), p, true);
    EXPECT_EQ(body["model"], "m");
    EXPECT_EQ(body["messages"].size(), 2u);
    EXPECT_EQ(body["messages"][0]["role"], "system");
    EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.2);
    EXPECT_EQ(body["max_tokens"], 350);
    EXPECT_EQ(body["stream"], true);
    EXPECT_EQ(body["seed"], 9);
    EXPECT_EQ(body["cache_prompt"], true);
}

TEST(RemoteEndpoint, CompletionParsing) {
    EXPECT_EQ(parse_completion(json::parse(R"({"choices":[{"message":{"content":"x"}}]})")), "x");
    EXPECT_EQ(parse_completion(json::parse(R"({"choices":[{"text":"y"}]})")), "y");
    EXPECT_THROW(parse_completion(json::parse(R"({"error":"bad"})")), BackendError);
    EXPECT_THROW(parse_completion(json::parse(R"({"choices":[]})")), ParseError);
    EXPECT_EQ(parse_stream_delta(json::parse(R"({"choices":[{"delta":{"content":"z"}}]})")), "z");
    EXPECT_EQ(parse_stream_delta(json::parse(R"({"choices":[{"delta":{}}]})")), "");
}

TEST(Remote, NonStreamingReply) {
    StubServer server;
    auto cfg = config_for(server.url());
    cfg.api_key = "secret";
    RemoteBackend b(cfg);
    EXPECT_EQ(b.generate(ask("hello"), {}), "re: hello");
    EXPECT_EQ(server.last_auth(), "Bearer secret");
    EXPECT_EQ(server.last_body()["stream"], false);
}

TEST(Remote, StreamingChunksConcatenate) {
    StubServer server;
    RemoteBackend b(config_for(server.url()));
    std::vector<std::string> chunks;
    const auto text = b.generate_stream(ask("world"), {}, [&](std::string_view c) { chunks.emplace_back(c); });
    EXPECT_EQ(text, "re: world");
    ASSERT_EQ(chunks.size(), 3u);
    EXPECT_EQ(chunks[0] + chunks[1] + chunks[2], text);
}

TEST(Remote, ServerErrorIsBackendErrorWithoutRetry) {
    StubServer server;
    RemoteBackend b(config_for(server.url()));
    try {
        b.generate(ask("fail"), {});
        FAIL();
    } catch (const BackendError& e) {
        EXPECT_EQ(e.server_message(), "model exploded");
    }
    EXPECT_EQ(server.requests(), 1);
    EXPECT_THROW(b.generate_stream(ask("fail"), {}, {}), BackendError);
}

TEST(Remote, TruncatedStreamIsPartialOutput) {
    StubServer server;
    RemoteBackend b(config_for(server.url()));
    std::string seen;
    try {
        b.generate_stream(ask("truncate"), {}, [&](std::string_view c) { seen += c; });
        FAIL();
    } catch (const PartialOutputError& e) {
        EXPECT_EQ(e.partial_text(), "re: ");
        EXPECT_EQ(seen, "re: ");
    }
}

TEST(Remote, UnreachableServerIsTransportErrorAfterRetries) {
    // Take a free port, then close it so nothing listens there.
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    ASSERT_GE(fd, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof(addr);
    ASSERT_EQ(::bind(fd, reinterpret_cast<sockaddr*>(&addr), len), 0);
    ASSERT_EQ(::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len), 0);
    const int port = ntohs(addr.sin_port);
    ::close(fd);
    auto cfg = config_for("http://127.0.0.1:" + std::to_string(port));
    cfg.retries = 2;
    RemoteBackend b(cfg);
    try {
        b.generate(ask("x"), {});
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.attempts(), 3);
    }
    try {
        b.generate_stream(ask("x"), {}, {});
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.attempts(), 3);
    }
}

TEST(Remote, InvalidRequestsAreRejectedLocally) {
    RemoteBackend b(config_for("http://127.0.0.1:1"));
    EXPECT_THROW(b.generate({}, {}), InputError);
    std::vector<ChatMessage> ends_with_assistant{user_message("a"), assistant_message("b")};
    EXPECT_THROW(b.generate(ends_with_assistant, {}), InputError);
    GenerationParams p;
    p.max_tokens = 0;
    EXPECT_THROW(b.generate(ask("x"), p), InputError);
}
