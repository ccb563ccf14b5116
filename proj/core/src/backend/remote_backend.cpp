#include "mhagent/backend/remote_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "mhagent/backend/sse.hpp"
#include "mhagent/domain/errors.hpp"

namespace mhagent::backend {

using nlohmann::json;

RemoteConfig apply_env(RemoteConfig config) {
    if (const char* url = std::getenv("BACKEND_URL"); url && *url) config.url = url;
    if (const char* key = std::getenv("BACKEND_API_KEY"); key && *key) config.api_key = key;
    return config;
}

Endpoint resolve_endpoint(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind("https://", 0) == 0) {
        throw ConfigError("https backends are not supported; put a local proxy in front: " + url);
    }
    if (url.rfind(scheme, 0) != 0) throw ConfigError("backend URL must start with http://: '" + url + "'");
    const std::size_t slash = url.find('/', scheme.size());
    Endpoint ep;
    ep.scheme_host_port = url.substr(0, slash);
    if (ep.scheme_host_port.size() == scheme.size()) throw ConfigError("backend URL has no host: '" + url + "'");
    std::string path = slash == std::string::npos ? "" : url.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
    const std::string suffix = "/chat/completions";
    if (path.empty()) {
        ep.path = "/v1" + suffix;
    } else if (path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        ep.path = path;
    } else {
        ep.path = path + suffix;
    }
    return ep;
}

json build_request(const RemoteConfig& config, std::span<const ChatMessage> messages,
                   const GenerationParams& params, bool stream) {
    json body;
    body["model"] = config.model;
    body["messages"] = json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;
    body["stream"] = stream;
    if (params.seed) body["seed"] = *params.seed;
    if (config.cache_prompt) body["cache_prompt"] = true;
    return body;
}

namespace {

std::string error_message(const json& body) {
    const json& err = body.at("error");
    if (err.is_string()) return err.get<std::string>();
    if (err.is_object() && err.contains("message") && err["message"].is_string()) {
        return err["message"].get<std::string>();
    }
    return err.dump();
}

std::string error_from_raw(int status, const std::string& raw) {
    try {
        const json body = json::parse(raw);
        if (body.is_object() && body.contains("error")) return error_message(body);
    } catch (const json::exception&) {
    }
    return "HTTP " + std::to_string(status) + (raw.empty() ? "" : ": " + raw);
}

}  // namespace

std::string parse_completion(const json& body) {
    if (!body.is_object()) throw ParseError("completion", "expected an object");
    if (body.contains("error") && !body["error"].is_null()) throw BackendError(error_message(body));
    const auto& choices = body.find("choices");
    if (choices == body.end() || !choices->is_array() || choices->empty()) {
        throw ParseError("choices", "missing or empty");
    }
    const json& first = (*choices)[0];
    if (first.contains("message") && first["message"].contains("content")) {
        const json& c = first["message"]["content"];
        return c.is_string() ? c.get<std::string>() : std::string{};
    }
    if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
    throw ParseError("choices[0].message.content", "missing");
}

std::string parse_stream_delta(const json& chunk) {
    if (chunk.contains("error") && !chunk["error"].is_null()) throw BackendError(error_message(chunk));
    if (!chunk.contains("choices") || !chunk["choices"].is_array() || chunk["choices"].empty()) return {};
    const json& first = chunk["choices"][0];
    if (first.contains("delta") && first["delta"].contains("content") && first["delta"]["content"].is_string()) {
        return first["delta"]["content"].get<std::string>();
    }
    if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
    return {};
}

RemoteBackend::RemoteBackend(RemoteConfig config)
    : config_(std::move(config)), endpoint_(resolve_endpoint(config_.url)) {
    if (config_.retries < 0) throw ConfigError("retries must be >= 0");
}

namespace {

httplib::Headers auth_headers(const RemoteConfig& config) {
    httplib::Headers h;
    if (!config.api_key.empty()) h.emplace("Authorization", "Bearer " + config.api_key);
    return h;
}

void configure(httplib::Client& cli, const RemoteConfig& config) {
    cli.set_connection_timeout(std::chrono::seconds(10));
    cli.set_read_timeout(config.timeout);
    cli.set_write_timeout(config.timeout);
}

void backoff(const RemoteConfig& config, int attempt) {
    std::this_thread::sleep_for(config.backoff * (1 << attempt));
}

}  // namespace

std::string RemoteBackend::generate(std::span<const ChatMessage> messages,
                                    const GenerationParams& params) {
    validate_request(messages);
    validate(params);
    const std::string body = build_request(config_, messages, params, false).dump();
    const int attempts = config_.retries + 1;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) backoff(config_, attempt - 1);
        httplib::Client cli(endpoint_.scheme_host_port);
        configure(cli, config_);
        auto res = cli.Post(endpoint_.path, auth_headers(config_), body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            spdlog::warn("backend {} transport error: {} (attempt {}/{})", config_.url, last_error,
                         attempt + 1, attempts);
            continue;
        }
        if (res->status >= 400) throw BackendError(error_from_raw(res->status, res->body));
        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw ParseError("completion", std::string("response is not JSON: ") + e.what());
        }
        return parse_completion(parsed);
    }
    throw TransportError("cannot reach " + config_.url + ": " + last_error, attempts);
}

std::string RemoteBackend::generate_stream(std::span<const ChatMessage> messages,
                                           const GenerationParams& params, const ChunkSink& on_chunk) {
    validate_request(messages);
    validate(params);
    const std::string body = build_request(config_, messages, params, true).dump();
    const int attempts = config_.retries + 1;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) backoff(config_, attempt - 1);

        SseParser parser;
        std::vector<std::string> chunks;
        std::string raw;  // error bodies are not SSE
        int status = 0;
        bool finished = false;
        std::exception_ptr failure;

        httplib::Request req;
        req.method = "POST";
        req.path = endpoint_.path;
        req.headers = auth_headers(config_);
        req.headers.emplace("Accept", "text/event-stream");
        req.set_header("Content-Type", "application/json");
        req.body = body;
        req.response_handler = [&](const httplib::Response& r) {
            status = r.status;
            return true;
        };
        req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
            if (status >= 400) {
                raw.append(data, len);
                return true;
            }
            try {
                for (const auto& ev : parser.feed(std::string_view(data, len))) {
                    if (ev.data == "[DONE]") {
                        finished = true;
                        continue;
                    }
                    const json chunk = json::parse(ev.data);
                    if (chunk.contains("choices") && chunk["choices"].is_array() && !chunk["choices"].empty() &&
                        chunk["choices"][0].contains("finish_reason") &&
                        !chunk["choices"][0]["finish_reason"].is_null()) {
                        finished = true;
                    }
                    std::string delta = parse_stream_delta(chunk);
                    if (delta.empty()) continue;
                    if (on_chunk) on_chunk(delta);
                    chunks.push_back(std::move(delta));
                }
            } catch (...) {
                failure = std::current_exception();
                return false;
            }
            return true;
        };

        httplib::Client cli(endpoint_.scheme_host_port);
        configure(cli, config_);
        httplib::Response res;
        httplib::Error err = httplib::Error::Success;
        const bool ok = cli.send(req, res, err);
        if (failure) {
            try {
                std::rethrow_exception(failure);
            } catch (const BackendError&) {
                throw;
            } catch (const std::exception& e) {
                if (chunks.empty()) throw ParseError("stream", e.what());
                throw PartialOutputError(std::string("malformed stream: ") + e.what(), std::move(chunks));
            }
        }
        if (status >= 400) throw BackendError(error_from_raw(status, raw));
        if (!ok || !finished) {
            last_error = ok ? "stream ended without completion marker" : httplib::to_string(err);
            if (!chunks.empty()) {
                throw PartialOutputError("stream interrupted: " + last_error, std::move(chunks));
            }
            if (ok) {
                // Connected and answered, but nothing useful arrived.
                throw PartialOutputError("stream interrupted: " + last_error, {});
            }
            spdlog::warn("backend {} transport error: {} (attempt {}/{})", config_.url, last_error,
                         attempt + 1, attempts);
            continue;
        }
        std::string text;
        for (const auto& c : chunks) text += c;
        return text;
    }
    throw TransportError("cannot reach " + config_.url + ": " + last_error, attempts);
}

}  // namespace mhagent::backend
