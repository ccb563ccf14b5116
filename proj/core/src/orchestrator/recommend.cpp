#include "mhagent/orchestrator/recommend.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "mhagent/domain/errors.hpp"

namespace mhagent::orchestrator {

RecommendationTable default_recommendations() {
    RecommendationTable t;
    t.tiers[0] = {
        "Keep up healthy routines: regular sleep, physical activity, and time with people you trust.",
        "Check in with yourself now and then; it is fine to come back and talk whenever something weighs on you.",
    };
    t.tiers[1] = {
        "Keep talking things through here: conversational guidance can help you name your feelings and notice "
        "unhelpful thought patterns.",
        "Try a short daily meditation or slow-breathing exercise of 5 to 10 minutes.",
        "Keep a simple mood journal to spot what tends to trigger worry or low mood.",
    };
    t.tiers[2] = {
        "Consider regular sessions with a licensed counselor for structured support such as cognitive "
        "behavioural therapy.",
        "Build daily relaxation and meditation practice into your routine, and protect your sleep schedule.",
        "Let a trusted friend or family member know how you have been feeling.",
    };
    t.tiers[3] = {
        "Please see a psychiatrist or other licensed mental-health professional soon; medication-based "
        "treatment may need to be evaluated alongside therapy.",
        "If you have thoughts of harming yourself, contact local emergency services or a crisis hotline right "
        "away.",
        "Ask someone you trust to help you arrange and attend a professional appointment.",
    };
    return t;
}

RecommendationTable load_recommendations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open recommendation table " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), e.what());
    }
    if (!j.is_object() || !j.contains("tiers") || !j["tiers"].is_array()) {
        throw ParseError("tiers", "missing or not an array");
    }
    const auto& tiers = j["tiers"];
    if (tiers.size() != SeverityLevel::kCount) throw ParseError("tiers", "expected exactly 4 tiers");
    RecommendationTable t;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const std::string where = "tiers[" + std::to_string(i) + "]";
        if (!tiers[i].is_array() || tiers[i].empty()) throw ParseError(where, "expected a non-empty array");
        for (const auto& s : tiers[i]) {
            if (!s.is_string()) throw ParseError(where, "entries must be strings");
            t.tiers[i].push_back(s.get<std::string>());
        }
    }
    return t;
}

std::vector<std::string> recommend(const MentalState& state, const RecommendationTable& table) {
    return table.tiers[static_cast<std::size_t>(state.peak().value())];
}

}  // namespace mhagent::orchestrator
