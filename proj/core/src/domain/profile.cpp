#include "mhagent/domain/profile.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/text.hpp"

namespace mhagent {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_utc(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

Timestamp parse_utc(const std::string& s) {
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, se = 0;
    char z = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c%n", &y, &mo, &d, &h, &mi, &se, &z,
                    &consumed) != 7 ||
        z != 'Z' || static_cast<std::size_t>(consumed) != s.size()) {
        throw ParseError("timestamp", "expected UTC ISO-8601 like 2026-01-31T12:00:00Z, got '" + s + "'");
    }
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 59) {
        throw ParseError("timestamp", "invalid calendar value '" + s + "'");
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

Timestamp now_utc() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string generate_user_id() {
    std::random_device rd;
    std::uint64_t hi = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::uint64_t lo = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    return text::hex64(hi) + text::hex64(lo);
}

UserProfile make_profile(std::string user_id) {
    UserProfile p;
    p.user_id = user_id.empty() ? generate_user_id() : std::move(user_id);
    return p;
}

void validate(const UserProfile& profile) {
    if (profile.user_id.empty()) throw InputError("profile has an empty user_id");
    int prev = 0;
    for (const auto& r : profile.assessments) {
        if (r.at_turn <= 0) throw InputError("assessment at_turn must be positive");
        if (r.at_turn <= prev) throw InputError("non-increasing at_turn");
        prev = r.at_turn;
    }
}

void append_assessment(UserProfile& profile, AssessmentRecord record) {
    if (record.at_turn <= 0) throw InputError("assessment at_turn must be positive");
    if (const auto* last = profile.latest(); last && record.at_turn <= last->at_turn) {
        throw InputError("non-increasing at_turn: " + std::to_string(record.at_turn) + " after " +
                         std::to_string(last->at_turn));
    }
    profile.assessments.push_back(std::move(record));
}

json profile_to_json(const UserProfile& profile) {
    json j;
    j["format_version"] = kProfileFormatVersion;
    j["user_id"] = profile.user_id;
    j["basic_info"] = json::object();
    for (const auto& [k, v] : profile.basic_info) j["basic_info"][k] = v;
    j["assessments"] = json::array();
    for (const auto& r : profile.assessments) {
        j["assessments"].push_back({
            {"at_turn", r.at_turn},
            {"timestamp", format_utc(r.timestamp)},
            {"state", {{"depression", r.state.depression.value()}, {"anxiety", r.state.anxiety.value()}}},
            {"evidence_window", r.evidence_window},
        });
    }
    return j;
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + key, "missing field");
    return *it;
}

int require_int(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw ParseError(where + key, "expected an integer");
    return v.get<int>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw ParseError(where + key, "expected a string");
    return v.get<std::string>();
}

SeverityLevel parse_level(const json& obj, const std::string& key, const std::string& where) {
    const int v = require_int(obj, key, where);
    if (v < SeverityLevel::kMin || v > SeverityLevel::kMax) {
        throw ParseError(where + key, "severity out of range");
    }
    return SeverityLevel(v);
}

}  // namespace

UserProfile profile_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("", "profile must be a JSON object");
    const int version = require_int(j, "format_version", "");
    if (version != kProfileFormatVersion) {
        throw ParseError("format_version", "unsupported version " + std::to_string(version));
    }
    UserProfile p;
    p.user_id = require_string(j, "user_id", "");
    if (p.user_id.empty()) throw ParseError("user_id", "must not be empty");

    const json& info = require(j, "basic_info", "");
    if (!info.is_object()) throw ParseError("basic_info", "expected an object");
    for (const auto& [k, v] : info.items()) {
        if (!v.is_string()) throw ParseError("basic_info." + k, "expected a string");
        p.basic_info[k] = v.get<std::string>();
    }

    const json& list = require(j, "assessments", "");
    if (!list.is_array()) throw ParseError("assessments", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "assessments[" + std::to_string(i) + "].";
        const json& item = list[i];
        if (!item.is_object()) throw ParseError(where.substr(0, where.size() - 1), "expected an object");
        AssessmentRecord r;
        r.at_turn = require_int(item, "at_turn", where);
        if (r.at_turn <= 0) throw ParseError(where + "at_turn", "must be positive");
        if (!p.assessments.empty() && r.at_turn <= p.assessments.back().at_turn) {
            throw ParseError(where + "at_turn", "non-increasing at_turn");
        }
        try {
            r.timestamp = parse_utc(require_string(item, "timestamp", where));
        } catch (const ParseError& e) {
            throw ParseError(where + "timestamp", e.what());
        }
        const json& state = require(item, "state", where);
        if (!state.is_object()) throw ParseError(where + "state", "expected an object");
        r.state.depression = parse_level(state, "depression", where + "state.");
        r.state.anxiety = parse_level(state, "anxiety", where + "state.");
        const json& ev = require(item, "evidence_window", where);
        if (!ev.is_array()) throw ParseError(where + "evidence_window", "expected an array");
        for (std::size_t k = 0; k < ev.size(); ++k) {
            if (!ev[k].is_string()) {
                throw ParseError(where + "evidence_window[" + std::to_string(k) + "]", "expected a string");
            }
            r.evidence_window.push_back(ev[k].get<std::string>());
        }
        p.assessments.push_back(std::move(r));
    }
    return p;
}

UserProfile load_profile(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) throw NoProfileError(path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open profile " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("profile is not valid JSON: ") + e.what());
    }
    return profile_from_json(j);
}

fs::path profile_temp_path(const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    return tmp;
}

void save_profile(const UserProfile& profile, const fs::path& path,
                  const std::function<void()>& before_rename) {
    validate(profile);
    const fs::path tmp = profile_temp_path(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << profile_to_json(profile).dump(2) << '\n';
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    if (before_rename) before_rename();
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace mhagent
