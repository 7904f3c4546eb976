#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ebb/core.hpp"
#include "ebb/wire.hpp"

namespace ebb::sim {

enum class PhaseKind { Lifting, Idle, Scuffle };

struct Phase {
    PhaseKind kind = PhaseKind::Idle;
    std::uint32_t t0 = 0;
    std::uint32_t t1 = 0;
    double payload_kg = 0.0;  // Lifting only

    friend bool operator==(const Phase&, const Phase&) = default;
};

enum class FaultKind {
    PowerLoss,    // no frames of any kind from `at` on
    EmgDropout,   // EMG reads 0 and decisions are forced to 0 from `at` on
    LoggerFault,  // DATA values all 0 from `at` on, heartbeat continues
};

struct FaultInjection {
    FaultKind kind = FaultKind::PowerLoss;
    std::uint32_t at = 0;

    friend bool operator==(const FaultInjection&, const FaultInjection&) = default;
};

struct SimParams {
    double m_arm_eff = 1.5;            // kg
    double r_arm = 0.15;               // m
    double r_load = 0.30;              // m
    double g = 9.81;                   // m/s^2
    double lift_period = 8.0;          // s
    double theta_min = 10.0;           // deg
    double theta_max = 120.0;          // deg
    double emg_noise_max = 30.0;       // ADC counts
    double emg_active_base = 200.0;    // ADC counts
    double emg_effort_gain = 100.0;    // ADC counts at full-load torque
    double decision_threshold = 150.0; // ADC counts
    double ambient_temp = 20.0;        // degC

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

inline constexpr double kMaxPayloadKg = 6.0;

struct Scenario {
    std::string name;
    std::uint32_t session_len = 0;
    std::vector<Phase> phases;
    std::vector<FaultInjection> faults;
    SimParams params;
    std::uint64_t seed = 42;
    bool noise = true;
    std::string start_utc = "1970-01-01T00:00:00Z";
    std::string notes;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

std::string_view to_string(PhaseKind k);
std::string_view to_string(FaultKind k);

/// Throws ArgumentError describing the first broken invariant.
void validate(const Scenario& s);

/// Elbow angle during a lift cycle, degrees.
double lift_angle_deg(const SimParams& p, std::uint32_t t);
/// Elbow torque for a held payload at the given angle, N·m.
double elbow_torque_nm(const SimParams& p, double payload_kg, double theta_deg);
/// Largest torque the device can see (payload at the 6 kg limit, elbow at 90°).
double max_torque_nm(const SimParams& p);

struct FaultInterval {
    FaultKind kind;
    std::uint32_t t0;
    std::uint32_t t1;
};

struct PhaseLabel {
    PhaseKind kind;
    std::uint32_t t0;
    std::uint32_t t1;
    double payload_kg;
    bool active;
};

struct GroundTruth {
    std::vector<FaultInterval> faults;
    std::vector<PhaseLabel> phases;
    std::optional<std::uint32_t> power_loss_at;
    std::optional<bool> under_load_at_loss;
    std::optional<double> torque_at_loss;  // closed-form |torque| one second before the loss
};

struct Generated {
    SessionMeta meta;
    std::vector<wire::Frame> frames;
    GroundTruth truth;
};

/// Deterministic for a fixed scenario (seed included).
Generated generate(const Scenario& s);

/// Physical channel values for second t, before any fault is applied.
/// Consumes exactly four draws from `rng` when noise is on.
ChannelValues clean_sample(const Scenario& s, const Phase& phase, std::uint32_t t,
                           std::mt19937_64& rng);

wire::Bytes encode_stream(std::span<const wire::Frame> frames);

Scenario builtin_mock_accident(std::span<const std::string> variants = {});
Scenario builtin_lifting_only();
/// "mock-accident" or "lifting-only"; variants only apply to mock-accident.
Scenario builtin_scenario(std::string_view name, std::span<const std::string> variants = {});
std::vector<std::string> builtin_names();
std::vector<std::string> variant_names();

nlohmann::ordered_json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario_file(const std::filesystem::path& path);

nlohmann::ordered_json truth_to_json(const Scenario& s, const GroundTruth& truth);

}  // namespace ebb::sim
