#include "ebb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace ebb::sim {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

const Phase& phase_at(const Scenario& s, std::uint32_t t) {
    auto it = std::upper_bound(s.phases.begin(), s.phases.end(), t,
                               [](std::uint32_t v, const Phase& p) { return v < p.t1; });
    return *it;
}

std::optional<std::uint32_t> earliest(const Scenario& s, FaultKind kind) {
    std::optional<std::uint32_t> at;
    for (const auto& f : s.faults) {
        if (f.kind == kind && (!at || f.at < *at)) at = f.at;
    }
    return at;
}

// Uniform integer in [0, max]. Plain modulo keeps the draw sequence identical
// across standard libraries; the bias for max << 2^64 is negligible.
double draw_noise(std::mt19937_64& rng, double max) {
    const auto span = static_cast<std::uint64_t>(max) + 1;
    return static_cast<double>(rng() % span);
}

PhaseKind phase_kind_from(const std::string& s) {
    if (s == "Lifting") return PhaseKind::Lifting;
    if (s == "Idle") return PhaseKind::Idle;
    if (s == "Scuffle") return PhaseKind::Scuffle;
    throw ArgumentError("unknown phase kind: " + s);
}

FaultKind fault_kind_from(const std::string& s) {
    if (s == "PowerLoss") return FaultKind::PowerLoss;
    if (s == "EmgDropout") return FaultKind::EmgDropout;
    if (s == "LoggerFault") return FaultKind::LoggerFault;
    throw ArgumentError("unknown fault kind: " + s);
}

// PowerLoss is timed by `at`, the onset faults by `from`.
const char* fault_time_key(FaultKind k) { return k == FaultKind::PowerLoss ? "at" : "from"; }

}  // namespace

std::string_view to_string(PhaseKind k) {
    switch (k) {
        case PhaseKind::Lifting: return "Lifting";
        case PhaseKind::Idle: return "Idle";
        case PhaseKind::Scuffle: return "Scuffle";
    }
    return "?";
}

std::string_view to_string(FaultKind k) {
    switch (k) {
        case FaultKind::PowerLoss: return "PowerLoss";
        case FaultKind::EmgDropout: return "EmgDropout";
        case FaultKind::LoggerFault: return "LoggerFault";
    }
    return "?";
}

void validate(const Scenario& s) {
    const auto& p = s.params;
    const double positives[] = {p.m_arm_eff,       p.r_arm,           p.r_load,
                                p.g,               p.lift_period,     p.theta_min,
                                p.theta_max,       p.emg_noise_max,   p.emg_active_base,
                                p.emg_effort_gain, p.decision_threshold, p.ambient_temp};
    for (double v : positives) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ArgumentError("simulation parameters must be strictly positive");
        }
    }
    if (p.theta_min >= p.theta_max) throw ArgumentError("theta_min must be below theta_max");
    if (p.theta_max > channel_info(ChannelId::PosLeft).max) {
        throw ArgumentError("theta_max exceeds the position channel range");
    }
    if (max_torque_nm(p) > channel_info(ChannelId::TorqueLeft).max) {
        throw ArgumentError("parameters allow torque beyond the torque channel range");
    }
    if (p.emg_active_base + p.emg_effort_gain + p.emg_noise_max >
        channel_info(ChannelId::EmgLeftBicep).max) {
        throw ArgumentError("EMG model exceeds the ADC range");
    }
    if (p.ambient_temp > channel_info(ChannelId::TempLeft).max) {
        throw ArgumentError("ambient temperature outside the temperature channel range");
    }

    if (s.session_len == 0) throw ArgumentError("session_len must be positive");
    if (s.phases.empty()) throw ArgumentError("scenario has no phases");
    std::uint32_t cursor = 0;
    for (const auto& ph : s.phases) {
        if (ph.t0 != cursor) {
            throw ArgumentError("phases must tile the session: expected a phase starting at t=" +
                                std::to_string(cursor));
        }
        if (ph.t1 <= ph.t0) throw ArgumentError("empty phase at t=" + std::to_string(ph.t0));
        if (ph.payload_kg < 0.0 || ph.payload_kg > kMaxPayloadKg) {
            throw ArgumentError("payload must lie in [0, 6] kg");
        }
        if (ph.kind != PhaseKind::Lifting && ph.payload_kg != 0.0) {
            throw ArgumentError("only Lifting phases carry a payload");
        }
        cursor = ph.t1;
    }
    if (cursor != s.session_len) {
        throw ArgumentError("phases end at t=" + std::to_string(cursor) + ", session_len is " +
                            std::to_string(s.session_len));
    }
    for (const auto& f : s.faults) {
        if (f.at >= s.session_len) {
            throw ArgumentError(std::string(to_string(f.kind)) + " injected outside the session");
        }
    }
}

double lift_angle_deg(const SimParams& p, std::uint32_t t) {
    const double mid = 0.5 * (p.theta_min + p.theta_max);
    const double amp = 0.5 * (p.theta_max - p.theta_min);
    return mid + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p.lift_period);
}

double elbow_torque_nm(const SimParams& p, double payload_kg, double theta_deg) {
    return (payload_kg * p.r_load + p.m_arm_eff * p.r_arm) * p.g * std::sin(theta_deg * kDegToRad);
}

double max_torque_nm(const SimParams& p) {
    return (kMaxPayloadKg * p.r_load + p.m_arm_eff * p.r_arm) * p.g;
}

ChannelValues clean_sample(const Scenario& s, const Phase& phase, std::uint32_t t,
                           std::mt19937_64& rng) {
    const auto& p = s.params;
    std::array<double, 4> noise{};
    if (s.noise) {
        for (auto& n : noise) n = draw_noise(rng, p.emg_noise_max);
    }

    double theta = p.theta_min;
    double payload = 0.0;
    bool lifting = phase.kind == PhaseKind::Lifting;
    if (lifting) {
        theta = lift_angle_deg(p, t);
        payload = phase.payload_kg;
    }
    const double torque = elbow_torque_nm(p, payload, theta);

    double bicep_l = noise[0], tricep_l = noise[1], bicep_r = noise[2], tricep_r = noise[3];
    if (lifting) {
        const double effort = std::abs(torque) / max_torque_nm(p);
        const double drive = std::round(p.emg_effort_gain * effort);
        const double co_contraction = std::round(0.25 * p.emg_effort_gain * effort);
        bicep_l += p.emg_active_base + drive;
        bicep_r += p.emg_active_base + drive;
        tricep_l += co_contraction;
        tricep_r += co_contraction;
    }

    ChannelValues v{};
    auto set = [&v](ChannelId id, double x) { v[index_of(id)] = static_cast<float>(x); };
    set(ChannelId::EmgLeftBicep, bicep_l);
    set(ChannelId::EmgLeftTricep, tricep_l);
    set(ChannelId::EmgRightBicep, bicep_r);
    set(ChannelId::EmgRightTricep, tricep_r);
    set(ChannelId::DecisionLeft, lifting && bicep_l > p.decision_threshold ? 1.0 : 0.0);
    set(ChannelId::DecisionRight, lifting && bicep_r > p.decision_threshold ? 1.0 : 0.0);
    set(ChannelId::PosLeft, theta);
    set(ChannelId::PosRight, theta);
    set(ChannelId::TorqueLeft, torque);
    set(ChannelId::TorqueRight, torque);
    set(ChannelId::TempLeft, p.ambient_temp);
    set(ChannelId::TempRight, p.ambient_temp);
    return v;
}

Generated generate(const Scenario& s) {
    validate(s);

    Generated out;
    out.meta.session_id = s.name + "-seed" + std::to_string(s.seed);
    out.meta.device_id = "ebb-sim";
    out.meta.start_utc = s.start_utc;

    const auto power_loss = earliest(s, FaultKind::PowerLoss);
    const auto emg_dropout = earliest(s, FaultKind::EmgDropout);
    const auto logger_fault = earliest(s, FaultKind::LoggerFault);
    const std::uint32_t live_end = power_loss.value_or(s.session_len);

    std::mt19937_64 rng(s.seed);
    std::uint32_t seq = 0;
    out.frames.reserve(2 * static_cast<std::size_t>(live_end) + 1);
    out.frames.push_back(wire::make_meta_frame(seq++, out.meta));
    for (std::uint32_t t = 0; t < live_end; ++t) {
        auto values = clean_sample(s, phase_at(s, t), t, rng);
        if (emg_dropout && t >= *emg_dropout) {
            for (auto id : kEmgChannels) values[index_of(id)] = 0.0F;
            for (auto id : kDecisionChannels) values[index_of(id)] = 0.0F;
        }
        if (logger_fault && t >= *logger_fault) values.fill(0.0F);
        out.frames.push_back(wire::make_data_frame(seq++, t, values));
        out.frames.push_back(wire::make_heartbeat_frame(seq++, t));
    }

    auto& truth = out.truth;
    for (const auto& f : s.faults) truth.faults.push_back({f.kind, f.at, s.session_len});
    std::sort(truth.faults.begin(), truth.faults.end(),
              [](const FaultInterval& a, const FaultInterval& b) { return a.t0 < b.t0; });
    for (const auto& ph : s.phases) {
        truth.phases.push_back({ph.kind, ph.t0, ph.t1, ph.payload_kg,
                                ph.kind == PhaseKind::Lifting});
    }
    if (power_loss) {
        truth.power_loss_at = *power_loss;
        const auto& ph = phase_at(s, *power_loss);
        truth.under_load_at_loss = ph.kind == PhaseKind::Lifting && ph.payload_kg > 0.0;
        if (*power_loss > 0) {
            const std::uint32_t last = *power_loss - 1;
            const auto& prev = phase_at(s, last);
            const bool lifting = prev.kind == PhaseKind::Lifting;
            truth.torque_at_loss = std::abs(elbow_torque_nm(
                s.params, lifting ? prev.payload_kg : 0.0,
                lifting ? lift_angle_deg(s.params, last) : s.params.theta_min));
        }
    }
    return out;
}

wire::Bytes encode_stream(std::span<const wire::Frame> frames) {
    wire::Bytes bytes;
    bytes.reserve(frames.size() * (wire::kHeaderSize + wire::kDataPayloadSize + wire::kCrcSize));
    for (const auto& f : frames) wire::encode_frame_into(f, bytes);
    return bytes;
}

Scenario builtin_mock_accident(std::span<const std::string> variants) {
    Scenario s;
    s.name = "mock-accident";
    s.session_len = 7200;
    s.phases = {
        {PhaseKind::Lifting, 0, 2700, 6.0},
        {PhaseKind::Scuffle, 2700, 2760, 0.0},
        {PhaseKind::Idle, 2760, 3000, 0.0},
        {PhaseKind::Lifting, 3000, 7200, 6.0},
    };
    s.faults = {{FaultKind::PowerLoss, 3600}};
    s.notes = "illustrative timeline: shift length and event spacing are not known from the "
              "enactment";
    for (const auto& v : variants) {
        if (v == "emg-dropout") {
            s.faults.push_back({FaultKind::EmgDropout, 0});
        } else if (v == "logger-fault") {
            for (auto& f : s.faults) {
                if (f.kind == FaultKind::PowerLoss) f.kind = FaultKind::LoggerFault;
            }
        } else if (v == "idle-power-loss") {
            for (auto& f : s.faults) {
                if (f.kind == FaultKind::PowerLoss) f.at = 2900;
            }
        } else {
            throw ArgumentError("unknown variant: " + v);
        }
        s.name += "+" + v;
    }
    return s;
}

Scenario builtin_lifting_only() {
    Scenario s;
    s.name = "lifting-only";
    s.session_len = 3600;
    s.phases = {{PhaseKind::Lifting, 0, 3600, 6.0}};
    s.notes = "fault-free reference session";
    return s;
}

Scenario builtin_scenario(std::string_view name, std::span<const std::string> variants) {
    if (name == "mock-accident") return builtin_mock_accident(variants);
    if (name == "lifting-only") {
        if (!variants.empty()) throw ArgumentError("lifting-only takes no variants");
        return builtin_lifting_only();
    }
    throw ArgumentError("unknown scenario: " + std::string(name));
}

std::vector<std::string> builtin_names() { return {"mock-accident", "lifting-only"}; }

std::vector<std::string> variant_names() {
    return {"emg-dropout", "logger-fault", "idle-power-loss"};
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["session_len"] = s.session_len;
    j["seed"] = s.seed;
    j["noise"] = s.noise;
    j["start_utc"] = s.start_utc;
    if (!s.notes.empty()) j["notes"] = s.notes;
    auto phases = nlohmann::ordered_json::array();
    for (const auto& p : s.phases) {
        nlohmann::ordered_json pj{{"kind", to_string(p.kind)}, {"t0", p.t0}, {"t1", p.t1}};
        if (p.kind == PhaseKind::Lifting) pj["payload_kg"] = p.payload_kg;
        phases.push_back(std::move(pj));
    }
    j["phases"] = std::move(phases);
    auto faults = nlohmann::ordered_json::array();
    for (const auto& f : s.faults) {
        faults.push_back({{"kind", to_string(f.kind)}, {fault_time_key(f.kind), f.at}});
    }
    j["faults"] = std::move(faults);
    const auto& p = s.params;
    j["params"] = {{"m_arm_eff", p.m_arm_eff},
                   {"r_arm", p.r_arm},
                   {"r_load", p.r_load},
                   {"g", p.g},
                   {"lift_period", p.lift_period},
                   {"theta_min", p.theta_min},
                   {"theta_max", p.theta_max},
                   {"emg_noise_max", p.emg_noise_max},
                   {"emg_active_base", p.emg_active_base},
                   {"emg_effort_gain", p.emg_effort_gain},
                   {"decision_threshold", p.decision_threshold},
                   {"ambient_temp", p.ambient_temp}};
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    try {
        Scenario s;
        s.name = j.at("name").get<std::string>();
        s.session_len = j.at("session_len").get<std::uint32_t>();
        s.seed = j.value("seed", std::uint64_t{42});
        s.noise = j.value("noise", true);
        s.start_utc = j.value("start_utc", s.start_utc);
        s.notes = j.value("notes", "");
        for (const auto& pj : j.at("phases")) {
            Phase p;
            p.kind = phase_kind_from(pj.at("kind").get<std::string>());
            p.t0 = pj.at("t0").get<std::uint32_t>();
            p.t1 = pj.at("t1").get<std::uint32_t>();
            p.payload_kg = pj.value("payload_kg", 0.0);
            s.phases.push_back(p);
        }
        if (j.contains("faults")) {
            for (const auto& fj : j.at("faults")) {
                FaultInjection f;
                f.kind = fault_kind_from(fj.at("kind").get<std::string>());
                f.at = fj.at(fault_time_key(f.kind)).get<std::uint32_t>();
                s.faults.push_back(f);
            }
        }
        if (j.contains("params")) {
            const auto& pj = j.at("params");
            auto& p = s.params;
            p.m_arm_eff = pj.value("m_arm_eff", p.m_arm_eff);
            p.r_arm = pj.value("r_arm", p.r_arm);
            p.r_load = pj.value("r_load", p.r_load);
            p.g = pj.value("g", p.g);
            p.lift_period = pj.value("lift_period", p.lift_period);
            p.theta_min = pj.value("theta_min", p.theta_min);
            p.theta_max = pj.value("theta_max", p.theta_max);
            p.emg_noise_max = pj.value("emg_noise_max", p.emg_noise_max);
            p.emg_active_base = pj.value("emg_active_base", p.emg_active_base);
            p.emg_effort_gain = pj.value("emg_effort_gain", p.emg_effort_gain);
            p.decision_threshold = pj.value("decision_threshold", p.decision_threshold);
            p.ambient_temp = pj.value("ambient_temp", p.ambient_temp);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed scenario: ") + e.what());
    }
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open scenario file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

nlohmann::ordered_json truth_to_json(const Scenario& s, const GroundTruth& truth) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_to_json(s);
    auto faults = nlohmann::ordered_json::array();
    for (const auto& f : truth.faults) {
        faults.push_back({{"kind", to_string(f.kind)}, {"t0", f.t0}, {"t1", f.t1}});
    }
    j["faults"] = std::move(faults);
    auto phases = nlohmann::ordered_json::array();
    for (const auto& p : truth.phases) {
        phases.push_back({{"kind", to_string(p.kind)},
                          {"t0", p.t0},
                          {"t1", p.t1},
                          {"payload_kg", p.payload_kg},
                          {"active", p.active}});
    }
    j["phases"] = std::move(phases);
    if (truth.power_loss_at) {
        j["power_loss"] = {{"at", *truth.power_loss_at},
                           {"under_load", truth.under_load_at_loss.value_or(false)}};
        if (truth.torque_at_loss) j["power_loss"]["torque_nm"] = *truth.torque_at_loss;
    }
    return j;
}

}  // namespace ebb::sim
