// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ebb/forensics.hpp"
#include "ebb/pipeline.hpp"
#include "ebb/store.hpp"
#include "ebb/wire.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ebb;
using namespace ebb::forensics;

namespace {

// Pinned tolerances.
constexpr double kMaxAnalyzeSeconds = 1.0;
constexpr double kMinDropoutCoverage = 0.95;
constexpr double kTorqueRelTol = 0.01;
constexpr std::uint32_t kNoisyStartTol = 1;
constexpr std::uint32_t kMinLiftWindow = 30;
constexpr int kWireFrames = 10'000;
constexpr int kPersistLogs = 100;
constexpr int kOracleLogs = 100;
constexpr std::size_t kOracleRecords = 10'000;

struct Outcome {
    bool pass;
    std::string detail;
};

SimRun simulate(const std::vector<std::string>& variants, bool noise) {
    auto s = sim::builtin_mock_accident(variants);
    s.seed = 42;
    s.noise = noise;
    return run_pipeline(s);
}

std::vector<Finding> of_kind(const std::vector<Finding>& fs, FindingKind k) {
    std::vector<Finding> out;
    for (const auto& f : fs) {
        if (f.kind == k) out.push_back(f);
    }
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome power_loss_reproduction() {
    const auto dir = testing_support::scratch_dir("acceptance_pl");
    const auto run = simulate({}, false);
    const auto csv = dir / "mock-accident.ebb.csv";
    store::save_log(run.log, csv);
    const std::uint32_t at = *run.truth.power_loss_at;

    const auto start = std::chrono::steady_clock::now();
    const auto log = store::load_log(csv);
    const auto report = build_report(log, {}, {});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto losses = of_kind(report.timeline.findings, FindingKind::PowerLoss);
    bool ok = losses.size() == 1 && losses[0].t0 == at && losses[0].t1 == log.size() &&
              secs < kMaxAnalyzeSeconds;

    const auto noisy = simulate({}, true);
    const auto noisy_losses =
        of_kind(build_report(noisy.log, {}, {}).timeline.findings, FindingKind::PowerLoss);
    const bool noisy_ok =
        noisy_losses.size() == 1 &&
        static_cast<std::uint32_t>(std::abs(static_cast<long>(noisy_losses[0].t0) - at)) <=
            kNoisyStartTol &&
        noisy_losses[0].t1 == noisy.log.size();
    ok = ok && noisy_ok;

    std::ostringstream d;
    d << "findings=" << losses.size();
    if (!losses.empty()) d << " [" << losses[0].t0 << "," << losses[0].t1 << ")";
    d << " injected=" << at << " analyze=" << secs * 1000 << "ms noisy=" << (noisy_ok ? "ok" : "bad");
    return {ok, d.str()};
}

Outcome heartbeat_disambiguation() {
    const auto normal = simulate({}, false);
    const auto faulty = simulate({"logger-fault"}, false);
    const auto fs = build_report(faulty.log, {}, {}).timeline.findings;
    const auto faults = of_kind(fs, FindingKind::LoggerOrSensorFault);
    const auto losses = of_kind(fs, FindingKind::PowerLoss);

    // Same channel values over the outage; only the heartbeat differs.
    bool same_values = faulty.log.size() == normal.log.size();
    bool hb_differs = false;
    for (std::size_t i = 0; same_values && i < faulty.log.size(); ++i) {
        const auto& a = faulty.log.records[i];
        const auto& b = normal.log.records[i];
        if (a.all_zero() != b.all_zero()) same_values = false;
        if (a.all_zero() && b.all_zero() && a.hb != b.hb) hb_differs = true;
    }
    const bool ok = faults.size() == 1 && losses.empty() && same_values && hb_differs;
    std::ostringstream d;
    d << "LoggerOrSensorFault=" << faults.size() << " PowerLoss=" << losses.size()
      << " zero-pattern-equal=" << same_values << " hb-only-difference=" << hb_differs;
    return {ok, d.str()};
}

Outcome emg_dropout_reproduction() {
    const auto run = simulate({"emg-dropout"}, false);
    const auto report = build_report(run.log, {}, {});
    const auto dropouts = of_kind(report.timeline.findings, FindingKind::EmgDropout);
    const std::uint32_t pre = *run.truth.power_loss_at;
    std::uint64_t covered = 0;
    for (const auto& f : dropouts) {
        if (f.t0 < pre) covered += std::min(f.t1, pre) - f.t0;
    }
    const double coverage = static_cast<double>(covered) / pre;
    bool alarm = false;
    for (const auto& r : report.prevention) alarm = alarm || r.trigger == FindingKind::EmgDropout;
    alarm = alarm && report.to_markdown().find("EMG sensors have failed") != std::string::npos;
    std::ostringstream d;
    d << "coverage=" << coverage * 100 << "% findings=" << dropouts.size()
      << " alarm-recommendation=" << alarm;
    return {coverage >= kMinDropoutCoverage && alarm, d.str()};
}

Outcome scuffle_analysis() {
    const auto dropout = simulate({"emg-dropout"}, false);
    const DetectorConfig cfg;
    std::uint32_t s0 = 0, s1 = 0;
    for (const auto& p : dropout.truth.phases) {
        if (p.kind == sim::PhaseKind::Scuffle) {
            s0 = p.t0;
            s1 = p.t1;
        }
    }
    const auto scuffle = detect_actuation(dropout.log, s0, s1, cfg);
    const bool scuffle_ok = s1 > s0 && scuffle.kind == FindingKind::ActuationInactive &&
                            scuffle.confidence == Confidence::Low;

    // Every lifting window of at least 30 s inside live data, in both runs.
    std::size_t windows = 0, active = 0;
    const auto plain = simulate({}, false);
    for (const auto* run : {&dropout, &plain}) {
        const auto dropouts = detect_emg_dropout(run->log, cfg);
        const std::uint32_t live_end = *run->truth.power_loss_at;
        for (const auto& p : run->truth.phases) {
            if (p.kind != sim::PhaseKind::Lifting) continue;
            const std::uint32_t end = std::min(p.t1, live_end);
            for (std::uint32_t len = kMinLiftWindow; p.t0 + len <= end; len *= 2) {
                for (std::uint32_t a = p.t0; a + len <= end; ++a) {
                    ++windows;
                    if (detect_actuation(run->log, a, a + len, cfg, dropouts).kind ==
                        FindingKind::ActuationActive) {
                        ++active;
                    }
                }
            }
        }
    }
    std::ostringstream d;
    d << "scuffle=" << to_string(scuffle.kind) << "/" << to_string(scuffle.confidence)
      << " lifting-windows-active=" << active << "/" << windows;
    return {scuffle_ok && windows > 0 && active == windows, d.str()};
}

Outcome under_load_classification() {
    const auto run = simulate({}, false);
    const auto fs = build_report(run.log, {}, {}).timeline.findings;
    const auto load = of_kind(fs, FindingKind::UnderLoadAtFailure);
    const std::uint32_t at = *run.truth.power_loss_at;
    const double theta = 65.0 + 55.0 * std::sin(2.0 * std::acos(-1.0) * (at - 1) / 8.0);
    const double expected = oracle::torque(6.0, theta);
    bool ok = load.size() == 1 && load[0].value &&
              std::abs(*load[0].value - expected) <= kTorqueRelTol * std::abs(expected);

    const auto idle = simulate({"idle-power-loss"}, false);
    const auto idle_fs = build_report(idle.log, {}, {}).timeline.findings;
    const bool idle_ok = of_kind(idle_fs, FindingKind::PowerLoss).size() == 1 &&
                         of_kind(idle_fs, FindingKind::UnderLoadAtFailure).empty();
    ok = ok && idle_ok;
    std::ostringstream d;
    d << "torque=" << (load.empty() ? 0.0 : load[0].value.value_or(0.0))
      << " N·m expected=" << expected << " idle-under-load=" << (idle_ok ? "none" : "present");
    return {ok, d.str()};
}

Outcome wire_robustness() {
    std::mt19937_64 rng(7);
    wire::Bytes stream;
    std::vector<wire::Frame> sent;
    for (int i = 0; i < kWireFrames; ++i) {
        const auto seq = static_cast<std::uint32_t>(i);
        const auto t = static_cast<std::uint32_t>(rng());
        switch (rng() % 3) {
            case 0: {
                ChannelValues v;
                for (auto& x : v) x = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
                sent.push_back(wire::make_data_frame(seq, t, v));
                break;
            }
            case 1:
                sent.push_back(wire::make_heartbeat_frame(seq, t));
                break;
            default: {
                wire::Bytes payload(rng() % 257);
                for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
                sent.push_back(wire::make_frame(wire::FrameKind::Meta, seq, t, payload));
            }
        }
        wire::encode_frame_into(sent.back(), stream);
    }
    std::size_t matched = 0;
    wire::Bytes reencoded;
    const auto events = wire::decode_stream(stream);
    for (const auto& e : events) {
        if (const auto* ok = std::get_if<wire::FrameOk>(&e)) {
            if (matched < sent.size() && ok->frame == sent[matched]) ++matched;
            wire::encode_frame_into(ok->frame, reencoded);
        }
    }
    const bool round_trip =
        matched == sent.size() && events.size() == sent.size() && reencoded == stream;

    ChannelValues fixture{212, 31, 219, 8, 1, 1, 26.1F, 26.1F, 8.7F, 8.7F, 20, 20};
    const auto frame = wire::encode_frame(wire::make_data_frame(7, 3599, fixture));
    std::size_t false_accepts = 0;
    for (std::size_t bit = 0; bit < frame.size() * 8; ++bit) {
        auto bad = frame;
        bad[bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
        for (const auto& e : wire::decode_stream(bad)) {
            if (std::holds_alternative<wire::FrameOk>(e)) ++false_accepts;
        }
    }
    std::ostringstream d;
    d << "round-trip=" << matched << "/" << kWireFrames << " bit-flips=" << frame.size() * 8
      << " false-accepts=" << false_accepts;
    return {round_trip && false_accepts == 0, d.str()};
}

Outcome persistence() {
    std::mt19937_64 rng(11);
    int equal = 0;
    for (int i = 0; i < kPersistLogs; ++i) {
        const auto log = testing_support::random_log(rng, 1 + rng() % 2000,
                                                     static_cast<std::uint32_t>(rng() % 100));
        std::stringstream ss;
        store::write_csv(log, ss);
        if (store::read_csv(ss, log.meta) == log) ++equal;
    }
    const auto dir = testing_support::scratch_dir("acceptance_golden");
    std::string first, second;
    for (auto* out : {&first, &second}) {
        store::save_log(simulate({}, false).log, dir / "mock-accident.ebb.csv");
        *out = slurp(dir / "mock-accident.ebb.csv");
    }
    const auto frozen = slurp(std::filesystem::path(EBB_TEST_DATA) / "mock-accident.ebb.csv");
    const bool golden = !frozen.empty() && first == second && first == frozen;
    std::ostringstream d;
    d << "round-trip=" << equal << "/" << kPersistLogs << " golden-identical=" << golden;
    return {equal == kPersistLogs && golden, d.str()};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(13);
    int mismatched_logs = 0;
    std::size_t intervals = 0;
    const DetectorConfig cfg;
    for (int i = 0; i < kOracleLogs; ++i) {
        EbbLog log;
        std::uniform_real_distribution<float> emg(150, 260), pos(10, 120);
        enum class Mode { Normal, FlatEmg, Still, Outage } mode = Mode::Normal;
        float level = 0;
        for (std::size_t t = 0; t < kOracleRecords; ++t) {
            if (rng() % 150 == 0) {
                mode = static_cast<Mode>(rng() % 4);
                level = static_cast<float>(rng() % 300);
            }
            EbbRecord r;
            r.t = r.seq = static_cast<std::uint32_t>(t);
            r.hb = true;
            if (mode != Mode::Outage) {
                for (auto id : kEmgChannels) {
                    r[id] = mode == Mode::FlatEmg ? level + static_cast<float>(rng() % 5)
                                                  : emg(rng);
                }
                for (auto id : kPositionChannels) {
                    r[id] = mode == Mode::Still ? 10.0F + static_cast<float>(rng() % 6) : pos(rng);
                }
                r[ChannelId::TempLeft] = r[ChannelId::TempRight] = 20.0F;
            } else {
                r.hb = rng() % 2;
                r.synthesized = !r.hb;
            }
            log.records.push_back(r);
        }
        const auto got = detect_emg_dropout(log, cfg);
        const auto want = oracle::emg_dropout_bruteforce(log, cfg.window, cfg.flat_eps_emg,
                                                         cfg.pos_activity_delta);
        intervals += want.size();
        bool same = got.size() == want.size();
        for (std::size_t k = 0; same && k < got.size(); ++k) {
            same = got[k].t0 == want[k].t0 && got[k].t1 == want[k].t1;
        }
        if (!same) ++mismatched_logs;
    }
    std::ostringstream d;
    d << "logs=" << kOracleLogs << "x" << kOracleRecords << " oracle-intervals=" << intervals
      << " mismatched-logs=" << mismatched_logs;
    return {mismatched_logs == 0 && intervals > 0, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"power-loss reproduction", power_loss_reproduction},
        {"heartbeat disambiguation", heartbeat_disambiguation},
        {"emg-dropout reproduction", emg_dropout_reproduction},
        {"scuffle analysis", scuffle_analysis},
        {"under-load classification", under_load_classification},
        {"wire robustness", wire_robustness},
        {"persistence", persistence},
        {"oracle equivalence", oracle_equivalence},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
