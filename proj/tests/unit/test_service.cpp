#include <gtest/gtest.h>

#include <future>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mhagent/backend/scripted_backend.hpp"
#include "mhagent/backend/sse.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/profile.hpp"
#include "mhagent/service/agent_service.hpp"
#include "support/test_support.hpp"

using namespace mhagent;
using namespace mhagent::service;
using backend::ChatMessage;
using backend::ScriptedBackend;
using nlohmann::json;

namespace {

std::shared_ptr<ScriptedBackend> counselor(std::size_t chunk = 3) {
    return std::make_shared<ScriptedBackend>(
        [](std::span<const ChatMessage> msgs) { return "You said: " + std::string(backend::last_user_content(msgs)); },
        chunk);
}

std::shared_ptr<ScriptedBackend> assessor() {
    return std::make_shared<ScriptedBackend>(
        [](std::span<const ChatMessage>) { return std::string("depression:1 anxiety:2"); });
}

struct Running {
    explicit Running(const std::filesystem::path& dir, std::shared_ptr<backend::Backend> dialogue = counselor()) {
        ServiceConfig cfg;
        cfg.port = 0;
        cfg.profile_dir = dir;
        service = std::make_unique<AgentService>(std::move(dialogue), assessor(), cfg);
        port = service->start();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
    }

    json post(const std::string& path, const json& body, int expect) {
        auto res = client->Post(path, body.dump(), "application/json");
        EXPECT_TRUE(res) << httplib::to_string(res.error());
        if (!res) return {};
        EXPECT_EQ(res->status, expect) << res->body;
        return res->body.empty() ? json() : json::parse(res->body, nullptr, false);
    }

    json get(const std::string& path, int expect) {
        auto res = client->Get(path);
        EXPECT_TRUE(res);
        if (!res) return {};
        EXPECT_EQ(res->status, expect) << res->body;
        return json::parse(res->body, nullptr, false);
    }

    // Sends one streamed message and returns the decoded events.
    std::vector<backend::SseEvent> stream(const std::string& session, const std::string& text) {
        auto res = client->Post("/sessions/" + session + "/messages", json{{"text", text}}.dump(), "application/json");
        EXPECT_TRUE(res);
        if (!res) return {};
        EXPECT_EQ(res->status, 200);
        EXPECT_NE(res->get_header_value("Content-Type").find("text/event-stream"), std::string::npos);
        backend::SseParser parser;
        return parser.feed(res->body);
    }

    std::unique_ptr<AgentService> service;
    std::unique_ptr<httplib::Client> client;
    int port = 0;
};

}  // namespace

TEST(Service, ProfileIdValidation) {
    EXPECT_TRUE(valid_profile_id("abc-DEF_123"));
    EXPECT_FALSE(valid_profile_id(""));
    EXPECT_FALSE(valid_profile_id("../etc"));
    EXPECT_FALSE(valid_profile_id(std::string(65, 'a')));
}

TEST(Service, HealthAndSessionLifecycle) {
    test_util::TempDir dir;
    Running s(dir.path());
    EXPECT_EQ(s.get("/health", 200)["status"], "ok");
    const auto created = s.post("/sessions", json{{"basic_info", {{"age", "24"}}}}, 201);
    const std::string sid = created["session_id"];
    const std::string pid = created["profile_id"];
    EXPECT_NE(created["system_prompt"].get<std::string>().find("age: 24"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / (pid + ".json")));
    EXPECT_EQ(s.get("/sessions/" + sid, 200)["profile_id"], pid);
    EXPECT_EQ(s.service->session_count(), 1u);
    EXPECT_EQ(s.client->Delete("/sessions/" + sid)->status, 204);
    s.get("/sessions/" + sid, 404);
}

TEST(Service, UnknownIdsAndBadBodies) {
    test_util::TempDir dir;
    Running s(dir.path());
    s.post("/sessions", json{{"profile_id", "nobody"}}, 404);
    s.post("/sessions", json{{"profile_id", "../x"}}, 400);
    s.post("/sessions/nope/messages", json{{"text", "hi"}}, 404);
    s.get("/sessions/nope/assessments", 404);
    s.get("/profiles/nobody", 404);
    const std::string sid = s.post("/sessions", json::object(), 201)["session_id"];
    s.post("/sessions/" + sid + "/messages", json{{"txt", "hi"}}, 400);
    s.post("/sessions/" + sid + "/messages", json{{"text", ""}, {"stream", false}}, 400);
    {
        std::ofstream out(dir / "broken.json");
        out << "{";
    }
    s.post("/sessions", json{{"profile_id", "broken"}}, 422);
}

TEST(Service, StreamedRepliesAndCadence) {
    test_util::TempDir dir;
    Running s(dir.path());
    const auto created = s.post("/sessions", json::object(), 201);
    const std::string sid = created["session_id"];
    for (int t = 1; t <= 5; ++t) {
        const std::string text = "message " + std::to_string(t);
        const auto events = s.stream(sid, text);
        ASSERT_GE(events.size(), 2u);
        std::string joined;
        for (std::size_t i = 0; i + 1 < events.size(); ++i) {
            EXPECT_EQ(events[i].event, "chunk");
            joined += json::parse(events[i].data)["text"].get<std::string>();
        }
        EXPECT_GT(events.size(), 2u);  // the reply arrives in several chunks
        ASSERT_EQ(events.back().event, "reply");
        const auto reply = json::parse(events.back().data);
        EXPECT_EQ(reply["text"], joined);
        EXPECT_EQ(reply["text"], "You said: " + text);
        EXPECT_EQ(reply["turn"], t);
        if (t < 5) {
            EXPECT_TRUE(reply["assessed"].is_null());
        } else {
            EXPECT_EQ(reply["assessed"]["depression"]["level"], 1);
            EXPECT_EQ(reply["assessed"]["anxiety"]["label"], "moderate");
            EXPECT_FALSE(reply["recommendations"].empty());
        }
    }
    // The profile was persisted before the terminal event.
    const std::string pid = created["profile_id"];
    EXPECT_EQ(load_profile(dir / (pid + ".json")).assessments.size(), 1u);
}

TEST(Service, AssessmentsAfterTenTurnsAndRestart) {
    test_util::TempDir dir;
    std::string pid;
    {
        Running s(dir.path());
        const auto created = s.post("/sessions", json::object(), 201);
        const std::string sid = created["session_id"];
        pid = created["profile_id"];
        for (int t = 1; t <= 10; ++t) {
            const auto r = s.post("/sessions/" + sid + "/messages", json{{"text", "hi " + std::to_string(t)}, {"stream", false}}, 200);
            EXPECT_EQ(r["assessed"].is_null(), t % 5 != 0);
        }
        const auto records = s.get("/sessions/" + sid + "/assessments", 200);
        ASSERT_EQ(records.size(), 2u);
        EXPECT_EQ(records[0]["at_turn"], 5);
        EXPECT_EQ(records[1]["at_turn"], 10);
    }
    // A fresh service over the same directory sees the persisted profile.
    Running again(dir.path());
    const auto profile = again.get("/profiles/" + pid, 200);
    EXPECT_EQ(profile["assessments"].size(), 2u);
    const auto resumed = again.post("/sessions", json{{"profile_id", pid}}, 201);
    EXPECT_NE(resumed["system_prompt"].get<std::string>().find("mild depression"), std::string::npos);
    const std::string sid = resumed["session_id"];
    for (int t = 1; t <= 5; ++t) again.post("/sessions/" + sid + "/messages", json{{"text", "back"}, {"stream", false}}, 200);
    EXPECT_EQ(again.get("/sessions/" + sid + "/assessments", 200).back()["at_turn"], 15);
}

TEST(Service, ConcurrentMessageIsBusy) {
    test_util::TempDir dir;
    std::promise<void> entered;
    std::promise<void> release;
    auto release_future = release.get_future().share();
    std::atomic<bool> first{true};
    auto slow = std::make_shared<ScriptedBackend>([&, release_future](std::span<const ChatMessage>) {
        if (first.exchange(false)) {
            entered.set_value();
            release_future.wait();
        }
        return std::string("done");
    });
    Running s(dir.path(), slow);
    const std::string sid = s.post("/sessions", json::object(), 201)["session_id"];

    auto in_flight = std::async(std::launch::async, [&] {
        httplib::Client c("127.0.0.1", s.port);
        auto res = c.Post("/sessions/" + sid + "/messages", json{{"text", "one"}, {"stream", false}}.dump(), "application/json");
        return res ? res->status : -1;
    });
    entered.get_future().wait();
    const auto busy = s.post("/sessions/" + sid + "/messages", json{{"text", "two"}, {"stream", false}}, 409);
    EXPECT_EQ(busy["error"], "busy");
    release.set_value();
    EXPECT_EQ(in_flight.get(), 200);
    EXPECT_EQ(s.post("/sessions/" + sid + "/messages", json{{"text", "three"}, {"stream", false}}, 200)["turn"], 2);
}

TEST(Service, BackendFailureBecomesErrorEvent) {
    test_util::TempDir dir;
    auto failing = std::make_shared<ScriptedBackend>([](std::span<const ChatMessage> msgs) -> std::string {
        if (backend::last_user_content(msgs) == "fail") throw BackendError("model offline");
        return "fine";
    });
    Running s(dir.path(), failing);
    const std::string sid = s.post("/sessions", json::object(), 201)["session_id"];
    const auto events = s.stream(sid, "fail");
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].event, "error");
    EXPECT_NE(json::parse(events[0].data)["error"].get<std::string>().find("model offline"), std::string::npos);
    s.post("/sessions/" + sid + "/messages", json{{"text", "fail"}, {"stream", false}}, 502);
    // The failed turns did not count.
    EXPECT_EQ(s.post("/sessions/" + sid + "/messages", json{{"text", "ok"}, {"stream", false}}, 200)["turn"], 1);
}

TEST(Service, StaticAssetsAreServedWhenConfigured) {
    test_util::TempDir dir;
    std::filesystem::create_directories(dir / "www");
    {
        std::ofstream out(dir / "www" / "index.html");
        out << "<html>ui</html>";
    }
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.profile_dir = dir.path();
    cfg.static_dir = dir / "www";
    AgentService svc(counselor(), assessor(), cfg);
    httplib::Client c("127.0.0.1", svc.start());
    auto res = c.Get("/index.html");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->body, "<html>ui</html>");
    EXPECT_EQ(c.Get("/health")->status, 200);

    ServiceConfig missing = cfg;
    missing.static_dir = dir / "nope";
    EXPECT_THROW(AgentService(counselor(), assessor(), missing), ConfigError);
}
