#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "mhagent/domain/dialogue.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/profile.hpp"
#include "support/test_support.hpp"

using namespace mhagent;
using nlohmann::json;

namespace {

AssessmentRecord record(int turn, int d, int a) {
    AssessmentRecord r;
    r.at_turn = turn;
    r.timestamp = parse_utc("2026-01-02T03:04:05Z");
    r.state = MentalState{SeverityLevel(d), SeverityLevel(a)};
    r.evidence_window = {"q1", "q2"};
    return r;
}

}  // namespace

TEST(Dialogue, JsonRoundTrip) {
    Dialogue d;
    d.id = "d1";
    d.topic = "family";
    d.turns = {{"hello", "hi"}, {"sad", "tell me more"}};
    const Dialogue back = json(d).get<Dialogue>();
    EXPECT_EQ(back, d);
}

TEST(Dialogue, NumericIdIsKeptAsText) {
    const auto d = json::parse(R"({"id": 7, "turns": [{"query": "q", "reply": "r"}]})").get<Dialogue>();
    EXPECT_EQ(d.id, "7");
}

TEST(Dialogue, ValidateRejectsEmptyParts) {
    Dialogue d;
    EXPECT_THROW(validate(d), InputError);
    d.turns = {{"", "r"}};
    EXPECT_THROW(validate(d), InputError);
    d.turns = {{"q", ""}};
    EXPECT_THROW(validate(d), InputError);
    EXPECT_NO_THROW(validate(d, true));
}

TEST(Profile, TimestampFormat) {
    const auto t = parse_utc("2026-10-15T08:30:00Z");
    EXPECT_EQ(format_utc(t), "2026-10-15T08:30:00Z");
    EXPECT_THROW(parse_utc("2026-10-15 08:30:00"), ParseError);
}

TEST(Profile, GeneratedIdsAreHexAndDistinct) {
    const auto a = generate_user_id();
    const auto b = generate_user_id();
    EXPECT_EQ(a.size(), 32u);
    EXPECT_NE(a, b);
    EXPECT_EQ(a.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(Profile, SaveThenLoadIsIdentity) {
    test_util::TempDir dir;
    UserProfile p = make_profile("alice");
    p.basic_info["age"] = "29";
    append_assessment(p, record(5, 1, 2));
    append_assessment(p, record(10, 2, 2));
    save_profile(p, dir / "alice.json");
    EXPECT_EQ(load_profile(dir / "alice.json"), p);
}

TEST(Profile, AppendRequiresIncreasingTurns) {
    UserProfile p = make_profile("u");
    append_assessment(p, record(5, 0, 0));
    EXPECT_THROW(append_assessment(p, record(5, 0, 0)), InputError);
    EXPECT_THROW(append_assessment(p, record(3, 0, 0)), InputError);
    EXPECT_EQ(p.assessments.size(), 1u);
}

TEST(Profile, MissingFileIsNoProfileError) {
    test_util::TempDir dir;
    EXPECT_THROW(load_profile(dir / "nobody.json"), NoProfileError);
}

TEST(Profile, ParseErrorsNameTheField) {
    UserProfile p = make_profile("u");
    append_assessment(p, record(5, 0, 0));
    append_assessment(p, record(10, 0, 0));
    json j = profile_to_json(p);
    j["assessments"][1]["at_turn"] = 5;
    try {
        profile_from_json(j);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("assessments[1].at_turn"), std::string::npos) << e.what();
    }
    j = profile_to_json(p);
    j["assessments"][0]["state"]["depression"] = 9;
    EXPECT_THROW(profile_from_json(j), ParseError);
}

TEST(Profile, CrashBeforeRenameLeavesPreviousFileIntact) {
    test_util::TempDir dir;
    const auto path = dir / "p.json";
    UserProfile before = make_profile("u");
    append_assessment(before, record(5, 1, 1));
    save_profile(before, path);

    UserProfile after = before;
    append_assessment(after, record(10, 3, 3));
    struct Crash {};
    EXPECT_THROW(save_profile(after, path, [] { throw Crash{}; }), Crash);
    EXPECT_EQ(load_profile(path), before);

    // A later successful save replaces both the file and any stale temp file.
    save_profile(after, path);
    EXPECT_EQ(load_profile(path), after);
    EXPECT_FALSE(std::filesystem::exists(profile_temp_path(path)));
}

TEST(Profile, UnwritableDirectoryIsIoError) {
    test_util::TempDir dir;
    const auto path = dir / "missing-subdir" / "p.json";
    EXPECT_THROW(save_profile(make_profile("u"), path), IoError);
}
