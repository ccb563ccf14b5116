#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "mhagent/domain/severity.hpp"

namespace mhagent::orchestrator {

// Four tiers of treatment suggestions, indexed by severity.
struct RecommendationTable {
    std::array<std::vector<std::string>, SeverityLevel::kCount> tiers;
};

RecommendationTable default_recommendations();

// {"tiers": [[...], [...], [...], [...]]}, exactly four non-empty tiers.
// Throws IoError / ParseError.
RecommendationTable load_recommendations(const std::filesystem::path& path);

// The tier is the higher of the two severities.
std::vector<std::string> recommend(const MentalState& state,
                                   const RecommendationTable& table = default_recommendations());

}  // namespace mhagent::orchestrator
