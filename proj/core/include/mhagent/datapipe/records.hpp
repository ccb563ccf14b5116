#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhagent/domain/dialogue.hpp"
#include "mhagent/domain/errors.hpp"
#include "mhagent/domain/severity.hpp"

namespace mhagent::datapipe {

struct QaPair {
    std::string question;
    std::string answer;
    std::optional<std::string> topic;

    friend bool operator==(const QaPair&, const QaPair&) = default;
};

struct LabeledSample {
    std::string question;
    MentalState state;

    friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// {"question": ..., "answer": ..., "topic": ...}
void to_json(nlohmann::json& j, const QaPair& p);
void from_json(const nlohmann::json& j, QaPair& p);
// {"question": ..., "depression": 0-3, "anxiety": 0-3}
void to_json(nlohmann::json& j, const LabeledSample& s);
void from_json(const nlohmann::json& j, LabeledSample& s);

// Reads one JSON document per non-blank line. Parse failures are reported
// as ParseError("<file>:<line>", ...).
template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<T> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<T>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno), e.what());
        } catch (const Error& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno), e.what());
        }
    }
    return out;
}

// Writes via a temporary file and rename so readers never see a torn file.
template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        for (const auto& item : items) out << nlohmann::json(item).dump() << '\n';
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

// Parameters, inputs and counts of one pipeline run, written as
// <output>.manifest.json next to the stage output.
void write_manifest(const std::filesystem::path& output, const nlohmann::json& manifest);
std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace mhagent::datapipe
