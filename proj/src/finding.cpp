#include "ebb/finding.hpp"

#include <array>
#include <utility>

namespace ebb {
namespace {

constexpr std::array<std::pair<FindingKind, std::string_view>, 6> kKindNames{{
    {FindingKind::PowerLoss, "PowerLoss"},
    {FindingKind::LoggerOrSensorFault, "LoggerOrSensorFault"},
    {FindingKind::EmgDropout, "EmgDropout"},
    {FindingKind::ActuationActive, "ActuationActive"},
    {FindingKind::ActuationInactive, "ActuationInactive"},
    {FindingKind::UnderLoadAtFailure, "UnderLoadAtFailure"},
}};

}  // namespace

std::string_view to_string(FindingKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "?";
}

std::string_view to_string(Confidence c) { return c == Confidence::High ? "High" : "Low"; }

std::optional<FindingKind> finding_kind_from_string(std::string_view s) {
    for (const auto& [kind, name] : kKindNames) {
        if (name == s) return kind;
    }
    return std::nullopt;
}

std::optional<Confidence> confidence_from_string(std::string_view s) {
    if (s == "High") return Confidence::High;
    if (s == "Low") return Confidence::Low;
    return std::nullopt;
}

}  // namespace ebb
