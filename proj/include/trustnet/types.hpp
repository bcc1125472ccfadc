#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trustnet {

using Index = std::uint32_t;

enum class TrustLabel : std::uint8_t { trustworthy, untrustworthy, unclassified };

// Publishers scoring at or above this value are trustworthy.
inline constexpr int kTrustThreshold = 60;

constexpr TrustLabel label_for_score(int score) noexcept
{
    return score >= kTrustThreshold ? TrustLabel::trustworthy : TrustLabel::untrustworthy;
}

constexpr TrustLabel label_for_score(std::optional<int> score) noexcept
{
    return score ? label_for_score(*score) : TrustLabel::unclassified;
}

constexpr std::string_view to_string(TrustLabel label) noexcept
{
    switch (label) {
    case TrustLabel::trustworthy: return "T";
    case TrustLabel::untrustworthy: return "N";
    case TrustLabel::unclassified: return "UNC";
    }
    return "UNC";
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace trustnet
