#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ebb/finding.hpp"
#include "ebb/store.hpp"

namespace ebb::forensics {

struct DetectorConfig {
    std::uint32_t min_powerloss_run = 3;  // records
    double flat_eps_emg = 5.0;            // ADC counts
    double pos_activity_delta = 5.0;      // degrees
    std::uint32_t window = 30;            // records
    double load_torque_min = 5.0;         // N·m
    // Logs that never carry a heartbeat cannot tell power loss from a dead
    // logger; optionally downgrade PowerLoss confidence for them.
    bool powerloss_low_conf_without_heartbeat = false;

    /// Throws ArgumentError unless every threshold is strictly positive.
    void validate() const;
};

nlohmann::ordered_json config_to_json(const DetectorConfig& cfg);

struct Interval {
    std::uint32_t t0 = 0;
    std::uint32_t t1 = 0;
};

/// Maximal all-zero runs of at least min_powerloss_run records, split by
/// classify_zero into PowerLoss and LoggerOrSensorFault findings.
std::vector<Finding> detect_power_loss(const EbbLog& log, const DetectorConfig& cfg);

/// Per-window flags computed over live (not all-zero) stretches of the log.
struct WindowScan {
    std::uint32_t t_start = 0;         // t of the first record of the stretch
    std::vector<std::uint8_t> flat;    // all four EMG ranges < flat_eps_emg
    std::vector<std::uint8_t> active;  // some position range > pos_activity_delta
};

std::vector<WindowScan> scan_windows(const EbbLog& log, const DetectorConfig& cfg);

/// EMG-flat stretches during which the elbows demonstrably moved. A stretch is
/// the union of consecutive or overlapping EMG-flat windows inside live data;
/// it is reported when at least one of its windows shows position activity.
std::vector<Finding> detect_emg_dropout(const EbbLog& log, const DetectorConfig& cfg);

/// Throws ArgumentError for an empty or out-of-log interval.
Finding detect_actuation(const EbbLog& log, std::uint32_t t0, std::uint32_t t1,
                         const DetectorConfig& cfg, std::span<const Finding> emg_dropouts);
Finding detect_actuation(const EbbLog& log, std::uint32_t t0, std::uint32_t t1,
                         const DetectorConfig& cfg);

/// Looks at the last live record before the power loss. Throws ArgumentError
/// if `power_loss` is not a PowerLoss finding.
std::optional<Finding> classify_under_load(const EbbLog& log, const Finding& power_loss,
                                           const DetectorConfig& cfg);

struct Timeline {
    std::vector<Finding> findings;  // sorted by t0, ties by kind name
    DetectorConfig config;
    std::string session_id;
};

void sort_findings(std::vector<Finding>& findings);

struct Recommendation {
    FindingKind trigger;
    std::string text;
};

struct Report {
    Timeline timeline;
    std::vector<std::string> what_happened;
    std::vector<std::string> why;
    std::vector<Recommendation> prevention;

    nlohmann::ordered_json to_json() const;
    std::string to_markdown() const;
};

Report build_report(const EbbLog& log, std::span<const Interval> queries,
                    const DetectorConfig& cfg);

/// Reads the findings back out of a report produced by Report::to_json().
std::vector<Finding> findings_from_report_json(const nlohmann::json& j);

}  // namespace ebb::forensics
