#include "ebb/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ebb {
namespace {

constexpr std::array<ChannelInfo, kChannelCount> kInfo{{
    {ChannelId::EmgLeftBicep, "EmgLeftBicep", "emg_lb", ChannelGroup::Emg, 0.0F, 1023.0F},
    {ChannelId::EmgLeftTricep, "EmgLeftTricep", "emg_lt", ChannelGroup::Emg, 0.0F, 1023.0F},
    {ChannelId::EmgRightBicep, "EmgRightBicep", "emg_rb", ChannelGroup::Emg, 0.0F, 1023.0F},
    {ChannelId::EmgRightTricep, "EmgRightTricep", "emg_rt", ChannelGroup::Emg, 0.0F, 1023.0F},
    {ChannelId::DecisionLeft, "DecisionLeft", "dec_l", ChannelGroup::Decision, 0.0F, 1.0F},
    {ChannelId::DecisionRight, "DecisionRight", "dec_r", ChannelGroup::Decision, 0.0F, 1.0F},
    {ChannelId::PosLeft, "PosLeft", "pos_l", ChannelGroup::Position, 0.0F, 150.0F},
    {ChannelId::PosRight, "PosRight", "pos_r", ChannelGroup::Position, 0.0F, 150.0F},
    {ChannelId::TorqueLeft, "TorqueLeft", "torque_l", ChannelGroup::Torque, -40.0F, 40.0F},
    {ChannelId::TorqueRight, "TorqueRight", "torque_r", ChannelGroup::Torque, -40.0F, 40.0F},
    {ChannelId::TempLeft, "TempLeft", "temp_l", ChannelGroup::Temperature, -20.0F, 100.0F},
    {ChannelId::TempRight, "TempRight", "temp_r", ChannelGroup::Temperature, -20.0F, 100.0F},
}};

std::string format_bound(const ChannelInfo& info) {
    std::ostringstream os;
    os << "not in [" << info.min << ", " << info.max << "]";
    return os.str();
}

}  // namespace

const std::array<ChannelId, kChannelCount>& canonical_channel_order() {
    static constexpr std::array<ChannelId, kChannelCount> order{
        ChannelId::EmgLeftBicep, ChannelId::EmgLeftTricep, ChannelId::EmgRightBicep,
        ChannelId::EmgRightTricep, ChannelId::DecisionLeft, ChannelId::DecisionRight,
        ChannelId::PosLeft, ChannelId::PosRight, ChannelId::TorqueLeft,
        ChannelId::TorqueRight, ChannelId::TempLeft, ChannelId::TempRight};
    return order;
}

const ChannelInfo& channel_info(ChannelId id) { return kInfo[index_of(id)]; }

bool EbbRecord::all_zero() const {
    return std::all_of(values.begin(), values.end(), [](float v) { return v == 0.0F; });
}

ValidationResult validate_record(const EbbRecord& r) {
    ValidationResult result;
    const bool zero = r.all_zero();
    for (const auto& info : kInfo) {
        const float v = r[info.id];
        if (!std::isfinite(v)) {
            result.violations.push_back({std::string(info.column), v, "not finite"});
            continue;
        }
        if (info.group == ChannelGroup::Decision && v != 0.0F && v != 1.0F) {
            result.violations.push_back({std::string(info.column), v, "decision not in {0,1}"});
            continue;
        }
        if (!zero && (v < info.min || v > info.max)) {
            result.violations.push_back({std::string(info.column), v, format_bound(info)});
        }
    }
    if (r.hb && r.synthesized) {
        result.violations.push_back({"hb", 1.0, "heartbeat set on a zero-filled record"});
    }
    return result;
}

std::string_view to_string(ZeroClassification c) {
    switch (c) {
        case ZeroClassification::Normal: return "Normal";
        case ZeroClassification::PowerLoss: return "PowerLoss";
        case ZeroClassification::LoggerOrSensorFault: return "LoggerOrSensorFault";
    }
    return "Normal";
}

ZeroClassification classify_zero(const EbbRecord& r) {
    if (!r.all_zero()) return ZeroClassification::Normal;
    return r.hb ? ZeroClassification::LoggerOrSensorFault : ZeroClassification::PowerLoss;
}

}  // namespace ebb
