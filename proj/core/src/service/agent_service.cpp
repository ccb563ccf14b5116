#include "mhagent/service/agent_service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "mhagent/backend/decorators.hpp"
#include "mhagent/backend/sse.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/profile.hpp"

namespace mhagent::service {

using nlohmann::json;

namespace {

struct SessionEntry {
    std::string id;
    Timestamp created_at;
    std::atomic<bool> busy{false};
    std::mutex state_mu;  // held for the whole of a turn
    orchestrator::SessionState state;
    mutable std::mutex snapshot_mu;
    UserProfile snapshot;  // profile as of the last completed turn
};

// Clears the busy flag when the last owner (handler or stream) lets go.
struct BusyGuard {
    explicit BusyGuard(std::shared_ptr<SessionEntry> e) : entry(std::move(e)) {}
    BusyGuard(const BusyGuard&) = delete;
    BusyGuard& operator=(const BusyGuard&) = delete;
    ~BusyGuard() { entry->busy = false; }

    std::shared_ptr<SessionEntry> entry;
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, json{{"error", message}});
}

json session_json(const SessionEntry& e) {
    return json{{"session_id", e.id},
                {"profile_id", e.state.profile.user_id},
                {"created_at", format_utc(e.created_at)},
                {"turn", e.state.global_turn},
                {"system_prompt", e.state.system_prompt}};
}

int status_for(const std::exception& e) {
    if (dynamic_cast<const InputError*>(&e)) return 400;
    return 502;
}

}  // namespace

bool valid_profile_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        if (!ok) return false;
    }
    return true;
}

struct AgentService::Impl {
    ServiceConfig config;
    orchestrator::Orchestrator orchestrator;
    httplib::Server server;
    std::thread thread;
    int bound_port = 0;

    mutable std::mutex sessions_mu;
    std::map<std::string, std::shared_ptr<SessionEntry>> sessions;

    Impl(std::shared_ptr<backend::Backend> dialogue, std::shared_ptr<backend::Backend> evaluation, ServiceConfig cfg,
         backend::BatchSizer batch)
        : config(std::move(cfg)),
          orchestrator(std::make_shared<backend::SerializedBackend>(std::move(dialogue)),
                       std::make_shared<backend::SerializedBackend>(std::move(evaluation)), std::move(batch)) {
        orchestrator::validate(config.orchestrator);
        std::error_code ec;
        std::filesystem::create_directories(config.profile_dir, ec);
        if (ec) throw IoError("cannot create profile directory " + config.profile_dir.string() + ": " + ec.message());
        routes();
    }

    std::filesystem::path profile_path(const std::string& id) const { return config.profile_dir / (id + ".json"); }

    std::shared_ptr<SessionEntry> find_session(const std::string& id) const {
        std::lock_guard lock(sessions_mu);
        const auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    void routes() {
        server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
        });
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            } catch (...) {
                send_error(res, 500, "unknown error");
            }
        });

        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, json{{"status", "ok"}});
        });
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create(req, res); });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const auto entry = find_session(req.matches[1]);
            if (!entry) return send_error(res, 404, "unknown session");
            std::lock_guard lock(entry->snapshot_mu);
            json j{{"session_id", entry->id},
                   {"profile_id", entry->snapshot.user_id},
                   {"created_at", format_utc(entry->created_at)},
                   {"busy", entry->busy.load()}};
            send_json(res, 200, j);
        });
        server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(sessions_mu);
            if (sessions.erase(req.matches[1]) == 0) return send_error(res, 404, "unknown session");
            res.status = 204;
        });
        server.Post(R"(/sessions/([^/]+)/messages)",
                    [this](const httplib::Request& req, httplib::Response& res) { message(req, res); });
        server.Get(R"(/sessions/([^/]+)/assessments)", [this](const httplib::Request& req, httplib::Response& res) {
            const auto entry = find_session(req.matches[1]);
            if (!entry) return send_error(res, 404, "unknown session");
            std::lock_guard lock(entry->snapshot_mu);
            send_json(res, 200, profile_to_json(entry->snapshot).at("assessments"));
        });
        server.Get(R"(/profiles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!valid_profile_id(id)) return send_error(res, 400, "invalid profile id");
            try {
                send_json(res, 200, profile_to_json(load_profile(profile_path(id))));
            } catch (const NoProfileError&) {
                send_error(res, 404, "unknown profile");
            } catch (const Error& e) {
                send_error(res, 500, e.what());
            }
        });

        if (config.static_dir && !server.set_mount_point("/", config.static_dir->string())) {
            throw ConfigError("static directory does not exist: " + config.static_dir->string());
        }
    }

    void create(const httplib::Request& req, httplib::Response& res) {
        json body = json::object();
        if (!req.body.empty()) {
            body = json::parse(req.body, nullptr, false);
            if (!body.is_object()) return send_error(res, 400, "body must be a JSON object");
        }
        UserProfile profile;
        std::filesystem::path path;
        if (body.contains("profile_id") && !body["profile_id"].is_null()) {
            if (!body["profile_id"].is_string()) return send_error(res, 400, "profile_id must be a string");
            const std::string id = body["profile_id"];
            if (!valid_profile_id(id)) return send_error(res, 400, "invalid profile id");
            path = profile_path(id);
            try {
                profile = load_profile(path);
            } catch (const NoProfileError&) {
                return send_error(res, 404, "unknown profile");
            } catch (const Error& e) {
                return send_error(res, 422, e.what());
            }
        } else {
            profile = make_profile();
            if (body.contains("basic_info")) {
                if (!body["basic_info"].is_object()) return send_error(res, 400, "basic_info must be an object");
                for (const auto& [k, v] : body["basic_info"].items()) {
                    if (!v.is_string()) return send_error(res, 400, "basic_info values must be strings");
                    profile.basic_info[k] = v.get<std::string>();
                }
            }
            path = profile_path(profile.user_id);
            save_profile(profile, path);
        }

        auto entry = std::make_shared<SessionEntry>();
        entry->id = generate_user_id();
        entry->created_at = now_utc();
        entry->snapshot = profile;
        try {
            entry->state = orchestrator.new_session(std::move(profile), config.orchestrator, path);
        } catch (const Error& e) {
            return send_error(res, 422, e.what());
        }
        {
            std::lock_guard lock(sessions_mu);
            sessions[entry->id] = entry;
        }
        spdlog::info("session {} opened for profile {}", entry->id, entry->state.profile.user_id);
        send_json(res, 201, session_json(*entry));
    }

    void message(const httplib::Request& req, httplib::Response& res) {
        const auto entry = find_session(req.matches[1]);
        if (!entry) return send_error(res, 404, "unknown session");
        const json body = json::parse(req.body, nullptr, false);
        if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
            return send_error(res, 400, "body must be {\"text\": string}");
        }
        const std::string text = body["text"];
        const bool stream = !body.contains("stream") || body["stream"] != false;

        bool expected = false;
        if (!entry->busy.compare_exchange_strong(expected, true)) {
            return send_error(res, 409, "busy");
        }
        auto guard = std::make_shared<BusyGuard>(entry);

        if (!stream) {
            try {
                send_json(res, 200, orchestrator::reply_to_json(run_turn(*entry, text, {})));
            } catch (const Error& e) {
                send_error(res, status_for(e), e.what());
            }
            return;
        }

        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [this, entry, guard, text](std::size_t, httplib::DataSink& sink) {
                auto emit = [&sink](std::string_view event, const json& data) {
                    const std::string frame = backend::format_sse(event, data.dump());
                    sink.write(frame.data(), frame.size());
                };
                try {
                    const auto reply =
                        run_turn(*entry, text, [&](std::string_view chunk) { emit("chunk", json{{"text", chunk}}); });
                    emit("reply", orchestrator::reply_to_json(reply));
                } catch (const std::exception& e) {
                    emit("error", json{{"error", e.what()}});
                }
                sink.done();
                return true;
            });
    }

    orchestrator::AgentReply run_turn(SessionEntry& entry, const std::string& text, const backend::ChunkSink& sink) {
        std::lock_guard lock(entry.state_mu);
        auto reply = orchestrator.user_message(entry.state, text, sink);
        std::lock_guard snap(entry.snapshot_mu);
        entry.snapshot = entry.state.profile;
        return reply;
    }
};

AgentService::AgentService(std::shared_ptr<backend::Backend> dialogue, std::shared_ptr<backend::Backend> evaluation,
                           ServiceConfig config, backend::BatchSizer batch)
    : impl_(std::make_unique<Impl>(std::move(dialogue), std::move(evaluation), std::move(config), std::move(batch))) {}

AgentService::~AgentService() { stop(); }

int AgentService::start() {
    auto& s = impl_->server;
    const auto& cfg = impl_->config;
    if (cfg.port == 0) {
        impl_->bound_port = s.bind_to_any_port(cfg.host);
        if (impl_->bound_port < 0) throw IoError("cannot bind " + cfg.host);
    } else {
        if (!s.bind_to_port(cfg.host, cfg.port)) throw IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
        impl_->bound_port = cfg.port;
    }
    impl_->thread = std::thread([&s] { s.listen_after_bind(); });
    s.wait_until_ready();
    spdlog::info("serving on http://{}:{}", cfg.host, impl_->bound_port);
    return impl_->bound_port;
}

void AgentService::run() {
    auto& s = impl_->server;
    const auto& cfg = impl_->config;
    if (!s.bind_to_port(cfg.host, cfg.port)) throw IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
    impl_->bound_port = cfg.port;
    spdlog::info("serving on http://{}:{}", cfg.host, cfg.port);
    s.listen_after_bind();
}

void AgentService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int AgentService::port() const { return impl_->bound_port; }

std::size_t AgentService::session_count() const {
    std::lock_guard lock(impl_->sessions_mu);
    return impl_->sessions.size();
}

}  // namespace mhagent::service
