#include "ebb/forensics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ebb/window_scan.hpp"

namespace ebb::forensics {
namespace {

std::string fmt(double v, int precision = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string span_text(std::uint32_t t0, std::uint32_t t1) {
    return "[" + std::to_string(t0) + ", " + std::to_string(t1) + ")";
}

bool live(const EbbRecord& r) { return classify_zero(r) == ZeroClassification::Normal; }

std::vector<ChannelId> all_channels() {
    const auto& order = canonical_channel_order();
    return {order.begin(), order.end()};
}

std::uint32_t log_end(const EbbLog& log) { return log.records.back().t + 1; }

std::optional<ChannelId> channel_from_column(std::string_view column) {
    for (auto id : canonical_channel_order()) {
        if (channel_info(id).column == column) return id;
    }
    return std::nullopt;
}

}  // namespace

void DetectorConfig::validate() const {
    if (min_powerloss_run == 0 || window == 0 || !(flat_eps_emg > 0.0) ||
        !(pos_activity_delta > 0.0) || !(load_torque_min > 0.0)) {
        throw ArgumentError("detector thresholds must be strictly positive");
    }
}

nlohmann::ordered_json config_to_json(const DetectorConfig& cfg) {
    return {{"min_powerloss_run", cfg.min_powerloss_run},
            {"flat_eps_emg", cfg.flat_eps_emg},
            {"pos_activity_delta", cfg.pos_activity_delta},
            {"window", cfg.window},
            {"load_torque_min", cfg.load_torque_min},
            {"powerloss_low_conf_without_heartbeat", cfg.powerloss_low_conf_without_heartbeat}};
}

std::vector<Finding> detect_power_loss(const EbbLog& log, const DetectorConfig& cfg) {
    std::vector<Finding> out;
    const auto& recs = log.records;
    const bool any_heartbeat =
        std::any_of(recs.begin(), recs.end(), [](const EbbRecord& r) { return r.hb; });

    std::size_t i = 0;
    while (i < recs.size()) {
        const auto cls = classify_zero(recs[i]);
        std::size_t j = i + 1;
        while (j < recs.size() && classify_zero(recs[j]) == cls) ++j;
        if (cls != ZeroClassification::Normal && j - i >= cfg.min_powerloss_run) {
            Finding f;
            f.t0 = recs[i].t;
            f.t1 = recs[j - 1].t + 1;
            f.evidence = all_channels();
            if (cls == ZeroClassification::PowerLoss) {
                f.kind = FindingKind::PowerLoss;
                f.confidence = (cfg.powerloss_low_conf_without_heartbeat && !any_heartbeat)
                                   ? Confidence::Low
                                   : Confidence::High;
                f.note = "all 12 channels zero for " + std::to_string(j - i) +
                         " s with no heartbeat";
            } else {
                f.kind = FindingKind::LoggerOrSensorFault;
                f.confidence = Confidence::High;
                f.note = "all 12 channels zero for " + std::to_string(j - i) +
                         " s while the heartbeat reported the robot powered";
            }
            out.push_back(std::move(f));
        }
        i = j;
    }
    return out;
}

std::vector<WindowScan> scan_windows(const EbbLog& log, const DetectorConfig& cfg) {
    std::vector<WindowScan> scans;
    const auto& recs = log.records;
    const std::size_t w = cfg.window;
    std::size_t i = 0;
    while (i < recs.size()) {
        if (!live(recs[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < recs.size() && live(recs[j])) ++j;
        const std::size_t n = j - i;
        if (n >= w) {
            auto column = [&](ChannelId id) {
                std::vector<float> c(n);
                for (std::size_t k = 0; k < n; ++k) c[k] = recs[i + k][id];
                return c;
            };
            WindowScan scan;
            scan.t_start = recs[i].t;
            scan.flat.assign(n - w + 1, 1);
            scan.active.assign(n - w + 1, 0);
            for (auto id : kEmgChannels) {
                const auto range = kernels::sliding_range(column(id), w);
                for (std::size_t s = 0; s < range.size(); ++s) {
                    if (!(range[s] < cfg.flat_eps_emg)) scan.flat[s] = 0;
                }
            }
            for (auto id : kPositionChannels) {
                const auto range = kernels::sliding_range(column(id), w);
                for (std::size_t s = 0; s < range.size(); ++s) {
                    if (range[s] > cfg.pos_activity_delta) scan.active[s] = 1;
                }
            }
            scans.push_back(std::move(scan));
        }
        i = j;
    }
    return scans;
}

std::vector<Finding> detect_emg_dropout(const EbbLog& log, const DetectorConfig& cfg) {
    std::vector<Finding> out;
    const std::uint32_t w = cfg.window;
    for (const auto& scan : scan_windows(log, cfg)) {
        std::optional<std::pair<std::uint32_t, std::uint32_t>> group;
        bool moved = false;
        auto close = [&] {
            if (group && moved) {
                Finding f;
                f.kind = FindingKind::EmgDropout;
                f.t0 = scan.t_start + group->first;
                f.t1 = scan.t_start + group->second;
                f.evidence = {kEmgChannels.begin(), kEmgChannels.end()};
                f.evidence.insert(f.evidence.end(), kPositionChannels.begin(),
                                  kPositionChannels.end());
                f.confidence = Confidence::Low;
                f.note = "EMG flat (range < " + fmt(cfg.flat_eps_emg, 1) +
                         " counts) on all four channels while the elbows moved";
                out.push_back(std::move(f));
            }
            group.reset();
            moved = false;
        };
        for (std::uint32_t s = 0; s < scan.flat.size(); ++s) {
            if (!scan.flat[s]) continue;
            if (group && s <= group->second) {
                group->second = s + w;
            } else {
                close();
                group = std::pair{s, s + w};
            }
            moved = moved || scan.active[s];
        }
        close();
    }
    return out;
}

Finding detect_actuation(const EbbLog& log, std::uint32_t t0, std::uint32_t t1,
                         const DetectorConfig& cfg, std::span<const Finding> emg_dropouts) {
    if (t0 >= t1) throw ArgumentError("actuation query " + span_text(t0, t1) + " is empty");
    if (log.empty() || t0 < log.records.front().t || t1 > log_end(log)) {
        throw ArgumentError("actuation query " + span_text(t0, t1) + " lies outside the log");
    }

    const auto slice = store::read_range(log, t0, t1);
    bool decided = false;
    std::optional<float> lo, hi;
    std::size_t live_count = 0;
    for (const auto& r : slice) {
        if (!live(r)) continue;
        ++live_count;
        for (auto id : kDecisionChannels) decided = decided || r[id] == 1.0F;
        for (auto id : kPositionChannels) {
            lo = lo ? std::min(*lo, r[id]) : r[id];
            hi = hi ? std::max(*hi, r[id]) : r[id];
        }
    }
    const double pos_range = lo ? static_cast<double>(*hi) - static_cast<double>(*lo) : 0.0;
    const bool moved = pos_range > cfg.pos_activity_delta;

    Finding f;
    f.kind = (decided || moved) ? FindingKind::ActuationActive : FindingKind::ActuationInactive;
    f.t0 = t0;
    f.t1 = t1;
    f.evidence = {ChannelId::DecisionLeft, ChannelId::DecisionRight, ChannelId::PosLeft,
                  ChannelId::PosRight};
    f.value = pos_range;
    const bool emg_missing = std::any_of(
        emg_dropouts.begin(), emg_dropouts.end(), [&](const Finding& d) {
            return d.kind == FindingKind::EmgDropout && d.overlaps(t0, t1);
        });
    f.confidence = (emg_missing || live_count == 0) ? Confidence::Low : Confidence::High;
    if (live_count == 0) {
        f.note = "no live records in the interval";
    } else {
        f.note = "elbow position range " + fmt(pos_range, 1) + " deg, actuation decision " +
                 (decided ? "raised" : "never raised");
        if (emg_missing) f.note += "; EMG not captured over this interval";
    }
    return f;
}

Finding detect_actuation(const EbbLog& log, std::uint32_t t0, std::uint32_t t1,
                         const DetectorConfig& cfg) {
    const auto dropouts = detect_emg_dropout(log, cfg);
    return detect_actuation(log, t0, t1, cfg, dropouts);
}

std::optional<Finding> classify_under_load(const EbbLog& log, const Finding& power_loss,
                                           const DetectorConfig& cfg) {
    if (power_loss.kind != FindingKind::PowerLoss) {
        throw ArgumentError("classify_under_load expects a PowerLoss finding");
    }
    const auto before = store::read_range(log, 0, power_loss.t0);
    auto it = std::find_if(before.rbegin(), before.rend(),
                           [](const EbbRecord& r) { return !r.synthesized && live(r); });
    if (it == before.rend()) return std::nullopt;

    const EbbRecord& r = *it;
    const double torque = std::max(std::abs(static_cast<double>(r[ChannelId::TorqueLeft])),
                                   std::abs(static_cast<double>(r[ChannelId::TorqueRight])));
    if (torque < cfg.load_torque_min) return std::nullopt;

    Finding f;
    f.kind = FindingKind::UnderLoadAtFailure;
    f.t0 = r.t;
    f.t1 = r.t + 1;
    f.evidence = {ChannelId::TorqueLeft, ChannelId::TorqueRight};
    f.confidence = Confidence::High;
    f.value = torque;
    f.note = "elbow torque " + fmt(torque) + " N·m at t=" + std::to_string(r.t) +
             ", last live record before the power loss at t=" + std::to_string(power_loss.t0);
    return f;
}

void sort_findings(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.t0 != b.t0) return a.t0 < b.t0;
        return to_string(a.kind) < to_string(b.kind);
    });
}

// ---------------------------------------------------------------------------

namespace {

std::string narrate(const Finding& f) {
    const std::string when = "t=" + span_text(f.t0, f.t1) + " s";
    const std::string conf = std::string(to_string(f.confidence)) + " confidence";
    switch (f.kind) {
        case FindingKind::PowerLoss:
            return when + ": every channel dropped to zero with no heartbeat; the exoskeleton "
                          "lost power (" + conf + ").";
        case FindingKind::LoggerOrSensorFault:
            return when + ": every channel read zero while the heartbeat kept reporting the "
                          "robot powered; the logger or its sensors failed (" + conf + ").";
        case FindingKind::EmgDropout:
            return when + ": the EMG channels were flat while the elbows moved; EMG data was "
                          "not captured (" + conf + ").";
        case FindingKind::ActuationActive:
            return when + ": the exoskeleton arms were actuated (" + f.note + "; " + conf + ").";
        case FindingKind::ActuationInactive:
            return when + ": no exoskeleton arm movement or actuation decision (" + f.note +
                   "; " + conf + ").";
        case FindingKind::UnderLoadAtFailure:
            return when + ": the elbows were carrying " + fmt(f.value.value_or(0.0)) +
                   " N·m immediately before the power loss (" + conf + ").";
    }
    return when;
}

bool anomalous(FindingKind k) {
    return k == FindingKind::PowerLoss || k == FindingKind::LoggerOrSensorFault ||
           k == FindingKind::EmgDropout || k == FindingKind::UnderLoadAtFailure;
}

constexpr const char* kFailSafeText =
    "Build a fail-safe into the exoskeleton so that a power failure cannot leave it frozen "
    "while under load.";
constexpr const char* kEmgAlarmText =
    "Build an alarm into the exoskeleton that alerts the wearer when the EMG sensors have failed.";

}  // namespace

Report build_report(const EbbLog& log, std::span<const Interval> queries,
                    const DetectorConfig& cfg) {
    cfg.validate();
    Report report;
    report.timeline.config = cfg;
    report.timeline.session_id = log.meta.session_id;
    auto& findings = report.timeline.findings;

    const auto outages = detect_power_loss(log, cfg);
    const auto dropouts = detect_emg_dropout(log, cfg);
    std::vector<std::pair<Finding, std::optional<Finding>>> losses;
    for (const auto& f : outages) {
        findings.push_back(f);
        if (f.kind == FindingKind::PowerLoss) {
            auto load = classify_under_load(log, f, cfg);
            if (load) findings.push_back(*load);
            losses.emplace_back(f, std::move(load));
        }
    }
    findings.insert(findings.end(), dropouts.begin(), dropouts.end());
    std::vector<Finding> actuation;
    for (const auto& q : queries) {
        actuation.push_back(detect_actuation(log, q.t0, q.t1, cfg, dropouts));
    }
    findings.insert(findings.end(), actuation.begin(), actuation.end());
    sort_findings(findings);

    // What happened
    const bool any_anomaly = std::any_of(findings.begin(), findings.end(),
                                         [](const Finding& f) { return anomalous(f.kind); });
    if (!any_anomaly) report.what_happened.push_back("No anomalous findings in the log.");
    for (const auto& f : findings) report.what_happened.push_back(narrate(f));

    // Why
    for (const auto& [loss, load] : losses) {
        if (load) {
            report.why.push_back("Power was lost at t=" + std::to_string(loss.t0) +
                                 " s while the elbows carried " + fmt(*load->value) +
                                 " N·m, so the exoskeleton froze under load.");
        } else {
            report.why.push_back("Power was lost at t=" + std::to_string(loss.t0) +
                                 " s; the elbows were not under significant load.");
        }
    }
    for (const auto& f : outages) {
        if (f.kind == FindingKind::LoggerOrSensorFault) {
            report.why.push_back("The heartbeat shows the robot stayed powered from t=" +
                                 std::to_string(f.t0) +
                                 " s, so the all-zero data points to a logger or sensor fault "
                                 "rather than a robot power failure.");
        }
    }
    for (const auto& f : dropouts) {
        report.why.push_back("The EMG sensors were not captured over t=" + span_text(f.t0, f.t1) +
                             " s; conclusions that depend on the wearer's muscle activity "
                             "there carry low confidence.");
    }
    for (const auto& f : actuation) {
        if (f.kind == FindingKind::ActuationInactive) {
            report.why.push_back("The exoskeleton did not actuate during t=" +
                                 span_text(f.t0, f.t1) +
                                 " s, so it did not drive any arm movement in that interval" +
                                 (f.confidence == Confidence::Low
                                      ? " (low confidence: muscle activity unobserved)."
                                      : "."));
        }
    }
    if (report.why.empty()) report.why.push_back("Nothing in the log calls for explanation.");

    // Prevention
    if (!dropouts.empty()) report.prevention.push_back({FindingKind::EmgDropout, kEmgAlarmText});
    const bool froze_under_load =
        std::any_of(losses.begin(), losses.end(), [](const auto& l) { return l.second.has_value(); });
    if (froze_under_load) {
        report.prevention.push_back({FindingKind::UnderLoadAtFailure, kFailSafeText});
    }
    return report;
}

nlohmann::ordered_json Report::to_json() const {
    nlohmann::ordered_json j;
    auto findings = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < timeline.findings.size(); ++i) {
        findings.push_back(store::finding_to_json(timeline.findings[i], i));
    }
    j["timeline"] = {{"session_id", timeline.session_id},
                     {"config", config_to_json(timeline.config)},
                     {"findings", std::move(findings)}};
    auto prevention = nlohmann::ordered_json::array();
    for (const auto& r : this->prevention) {
        prevention.push_back({{"trigger", to_string(r.trigger)}, {"text", r.text}});
    }
    j["report"] = {{"what_happened", what_happened},
                   {"why", why},
                   {"prevention", std::move(prevention)}};
    return j;
}

std::string Report::to_markdown() const {
    std::ostringstream md;
    md << "# EBB investigation report: " << timeline.session_id << "\n\n";
    md << "| # | kind | interval (s) | confidence | evidence | note |\n";
    md << "|---|------|--------------|------------|----------|------|\n";
    for (std::size_t i = 0; i < timeline.findings.size(); ++i) {
        const auto& f = timeline.findings[i];
        md << "| " << i << " | " << to_string(f.kind) << " | " << span_text(f.t0, f.t1) << " | "
           << to_string(f.confidence) << " | ";
        for (std::size_t k = 0; k < f.evidence.size(); ++k) {
            md << (k ? ", " : "") << channel_info(f.evidence[k]).column;
        }
        md << " | " << f.note << " |\n";
    }
    md << "\n## What happened?\n\n";
    for (const auto& s : what_happened) md << "- " << s << "\n";
    md << "\n## Why did it happen?\n\n";
    for (const auto& s : why) md << "- " << s << "\n";
    md << "\n## What can we do to prevent it happening again?\n\n";
    if (prevention.empty()) md << "- No technical recommendation is triggered by this log.\n";
    for (const auto& r : prevention) md << "- " << r.text << "\n";
    return md.str();
}

std::vector<Finding> findings_from_report_json(const nlohmann::json& j) {
    std::vector<Finding> out;
    for (const auto& fj : j.at("timeline").at("findings")) {
        Finding f;
        const auto kind = finding_kind_from_string(fj.at("kind").get<std::string>());
        const auto conf = confidence_from_string(fj.at("confidence").get<std::string>());
        if (!kind || !conf) throw ArgumentError("unrecognised finding in report");
        f.kind = *kind;
        f.confidence = *conf;
        f.t0 = fj.at("t0").get<std::uint32_t>();
        f.t1 = fj.at("t1").get<std::uint32_t>();
        for (const auto& c : fj.at("evidence")) {
            const auto id = channel_from_column(c.get<std::string>());
            if (!id) throw ArgumentError("unknown evidence channel in report");
            f.evidence.push_back(*id);
        }
        f.note = fj.value("note", "");
        if (fj.contains("value")) f.value = fj.at("value").get<double>();
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace ebb::forensics
