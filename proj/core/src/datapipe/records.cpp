#include "mhagent/datapipe/records.hpp"

namespace mhagent::datapipe {

using nlohmann::json;

void to_json(json& j, const QaPair& p) {
    j = json{{"question", p.question}, {"answer", p.answer}};
    if (p.topic) j["topic"] = *p.topic;
}

void from_json(const json& j, QaPair& p) {
    if (!j.is_object()) throw ParseError("qa", "expected an object");
    if (!j.contains("question") || !j["question"].is_string()) throw ParseError("question", "missing or not a string");
    if (!j.contains("answer") || !j["answer"].is_string()) throw ParseError("answer", "missing or not a string");
    p.question = j["question"].get<std::string>();
    p.answer = j["answer"].get<std::string>();
    p.topic.reset();
    if (j.contains("topic") && j["topic"].is_string()) p.topic = j["topic"].get<std::string>();
}

void to_json(json& j, const LabeledSample& s) {
    j = json{{"question", s.question},
             {"depression", s.state.depression.value()},
             {"anxiety", s.state.anxiety.value()}};
}

void from_json(const json& j, LabeledSample& s) {
    if (!j.is_object()) throw ParseError("sample", "expected an object");
    if (!j.contains("question") || !j["question"].is_string()) throw ParseError("question", "missing or not a string");
    s.question = j["question"].get<std::string>();
    for (const char* key : {"depression", "anxiety"}) {
        if (!j.contains(key) || !j[key].is_number_integer()) throw ParseError(key, "missing or not an integer");
        const int v = j[key].get<int>();
        if (v < SeverityLevel::kMin || v > SeverityLevel::kMax) throw ParseError(key, "severity out of range");
    }
    s.state = MentalState{SeverityLevel(j["depression"].get<int>()), SeverityLevel(j["anxiety"].get<int>())};
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
    auto p = output;
    p += ".manifest.json";
    return p;
}

void write_manifest(const std::filesystem::path& output, const json& manifest) {
    const auto path = manifest_path(output);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << manifest.dump(2) << '\n';
}

}  // namespace mhagent::datapipe
