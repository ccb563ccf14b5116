#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mhagent {

// Ordinal severity of one condition: 0 minimal, 1 mild, 2 moderate, 3 severe.
class SeverityLevel {
public:
    static constexpr int kMin = 0;
    static constexpr int kMax = 3;
    static constexpr int kCount = kMax - kMin + 1;

    constexpr SeverityLevel() = default;
    // Throws RangeError outside [0,3].
    explicit SeverityLevel(int value);

    constexpr int value() const noexcept { return value_; }

    friend constexpr auto operator<=>(SeverityLevel, SeverityLevel) = default;

    // "minimal" / "mild" / "moderate" / "severe"
    std::string_view name() const noexcept;

private:
    std::uint8_t value_ = 0;
};

// |a - b|, always in [0,3].
constexpr int distance(SeverityLevel a, SeverityLevel b) noexcept {
    return a.value() > b.value() ? a.value() - b.value() : b.value() - a.value();
}

struct MentalState {
    SeverityLevel depression;
    SeverityLevel anxiety;

    friend bool operator==(const MentalState&, const MentalState&) = default;

    // Higher of the two severities.
    SeverityLevel peak() const noexcept { return depression < anxiety ? anxiety : depression; }
};

// "moderate depression (2/3), severe anxiety (3/3)"
std::string describe(const MentalState& state);

}  // namespace mhagent
