#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ebb {

/// Thrown when a caller passes arguments that violate an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The twelve EBB channels in canonical order. Group 1 (EMG + decisions)
/// comes first, group 2 (elbow position, torque, temperature) second.
enum class ChannelId : std::uint8_t {
    EmgLeftBicep,
    EmgLeftTricep,
    EmgRightBicep,
    EmgRightTricep,
    DecisionLeft,
    DecisionRight,
    PosLeft,
    PosRight,
    TorqueLeft,
    TorqueRight,
    TempLeft,
    TempRight,
};

inline constexpr std::size_t kChannelCount = 12;

enum class ChannelGroup { Emg, Decision, Position, Torque, Temperature };

struct ChannelInfo {
    ChannelId id;
    std::string_view name;        // enum-style name
    std::string_view column;      // CSV column name
    ChannelGroup group;
    float min;
    float max;
};

const std::array<ChannelId, kChannelCount>& canonical_channel_order();
const ChannelInfo& channel_info(ChannelId id);

constexpr std::size_t index_of(ChannelId id) { return static_cast<std::size_t>(id); }

inline constexpr std::array<ChannelId, 4> kEmgChannels{
    ChannelId::EmgLeftBicep, ChannelId::EmgLeftTricep,
    ChannelId::EmgRightBicep, ChannelId::EmgRightTricep};
inline constexpr std::array<ChannelId, 2> kDecisionChannels{ChannelId::DecisionLeft,
                                                            ChannelId::DecisionRight};
inline constexpr std::array<ChannelId, 2> kPositionChannels{ChannelId::PosLeft,
                                                            ChannelId::PosRight};
inline constexpr std::array<ChannelId, 2> kTorqueChannels{ChannelId::TorqueLeft,
                                                          ChannelId::TorqueRight};

/// Channel values indexed by canonical position.
using ChannelValues = std::array<float, kChannelCount>;

/// One 1 Hz sample.
struct EbbRecord {
    std::uint64_t seq = 0;
    std::uint32_t t = 0;
    ChannelValues values{};
    bool hb = false;
    bool synthesized = false;

    float operator[](ChannelId id) const { return values[index_of(id)]; }
    float& operator[](ChannelId id) { return values[index_of(id)]; }

    bool all_zero() const;

    friend bool operator==(const EbbRecord&, const EbbRecord&) = default;
};

struct SessionMeta {
    std::string session_id;
    std::string device_id;
    std::string start_utc;
    int rate_hz = 1;
    int schema_version = 1;

    friend bool operator==(const SessionMeta&, const SessionMeta&) = default;
};

struct Violation {
    std::string channel;  // column name, or "hb" for record-level violations
    double value = 0.0;
    std::string bound;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationResult validate_record(const EbbRecord& r);

enum class ZeroClassification { Normal, PowerLoss, LoggerOrSensorFault };

std::string_view to_string(ZeroClassification c);

/// Total over records: all-zero without heartbeat is power loss, all-zero
/// with heartbeat means the robot was alive and the logger/sensors failed.
ZeroClassification classify_zero(const EbbRecord& r);

}  // namespace ebb
