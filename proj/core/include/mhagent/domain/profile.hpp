#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mhagent/domain/severity.hpp"

namespace mhagent {

using Timestamp = std::chrono::sys_seconds;

// "2026-10-15T08:30:00Z"
std::string format_utc(Timestamp t);
// Accepts the format_utc form (trailing Z required). Throws ParseError.
Timestamp parse_utc(const std::string& s);
Timestamp now_utc();

struct AssessmentRecord {
    int at_turn = 0;  // 1-based global turn index
    Timestamp timestamp{};
    MentalState state;
    std::vector<std::string> evidence_window;  // user queries merged for the assessment

    friend bool operator==(const AssessmentRecord&, const AssessmentRecord&) = default;
};

struct UserProfile {
    std::string user_id;
    std::map<std::string, std::string> basic_info;
    std::vector<AssessmentRecord> assessments;  // strictly increasing at_turn

    friend bool operator==(const UserProfile&, const UserProfile&) = default;

    const AssessmentRecord* latest() const {
        return assessments.empty() ? nullptr : &assessments.back();
    }
};

inline constexpr int kProfileFormatVersion = 1;

// Random 128-bit identifier rendered as 32 lower-case hex digits.
std::string generate_user_id();

UserProfile make_profile(std::string user_id = {});

// Throws InputError if at_turn is non-positive or not strictly increasing.
void validate(const UserProfile& profile);

// Appends a record, enforcing the ordering invariant.
void append_assessment(UserProfile& profile, AssessmentRecord record);

nlohmann::json profile_to_json(const UserProfile& profile);
// Throws ParseError naming the offending field, e.g.
// "assessments[1].at_turn: non-increasing at_turn".
UserProfile profile_from_json(const nlohmann::json& j);

// Throws NoProfileError if the file does not exist, ParseError if malformed.
UserProfile load_profile(const std::filesystem::path& path);

// Writes `<path>.tmp` then renames it over `path`. `before_rename` runs
// between the two steps; it exists so tests can inject a crash there.
// Throws IoError on failure; the previous file is left untouched.
void save_profile(const UserProfile& profile, const std::filesystem::path& path,
                  const std::function<void()>& before_rename = {});

std::filesystem::path profile_temp_path(const std::filesystem::path& path);

}  // namespace mhagent
