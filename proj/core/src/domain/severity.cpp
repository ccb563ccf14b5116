#include "mhagent/domain/severity.hpp"

#include "mhagent/domain/errors.hpp"

namespace mhagent {

SeverityLevel::SeverityLevel(int value) {
    if (value < kMin || value > kMax) {
        throw RangeError("severity out of range: " + std::to_string(value));
    }
    value_ = static_cast<std::uint8_t>(value);
}

std::string_view SeverityLevel::name() const noexcept {
    static constexpr std::string_view kNames[] = {"minimal", "mild", "moderate", "severe"};
    return kNames[value_];
}

std::string describe(const MentalState& state) {
    return std::string(state.depression.name()) + " depression (" +
           std::to_string(state.depression.value()) + "/3), " + std::string(state.anxiety.name()) +
           " anxiety (" + std::to_string(state.anxiety.value()) + "/3)";
}

}  // namespace mhagent
