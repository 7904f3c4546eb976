#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebb/core.hpp"

namespace ebb {

enum class FindingKind {
    PowerLoss,
    LoggerOrSensorFault,
    EmgDropout,
    ActuationActive,
    ActuationInactive,
    UnderLoadAtFailure,
};

enum class Confidence { High, Low };

std::string_view to_string(FindingKind k);
std::string_view to_string(Confidence c);
std::optional<FindingKind> finding_kind_from_string(std::string_view s);
std::optional<Confidence> confidence_from_string(std::string_view s);

/// A detector's claim about the half-open interval [t0, t1).
struct Finding {
    FindingKind kind = FindingKind::PowerLoss;
    std::uint32_t t0 = 0;
    std::uint32_t t1 = 0;
    std::vector<ChannelId> evidence;
    Confidence confidence = Confidence::High;
    std::string note;
    std::optional<double> value;  // measured quantity, e.g. torque at failure

    bool overlaps(std::uint32_t a, std::uint32_t b) const { return t0 < b && a < t1; }

    friend bool operator==(const Finding&, const Finding&) = default;
};

}  // namespace ebb
