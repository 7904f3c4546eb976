// ebb: simulate, validate, analyze, collect and serve Ethical Black Box logs.

#include <iostream>

#include "CLI11.hpp"
#include "ebb/commands.hpp"

int main(int argc, char** argv) {
    using namespace ebb::cli;

    CLI::App app{"Ethical Black Box toolkit for exoskeleton telemetry"};
    app.require_subcommand(1);

    SimulateOptions sim;
    int noise = -1;
    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Generate a scenario, stream it over the "
                                                    "wire protocol and write the collected log");
    simulate->add_option("--scenario", sim.scenario, "Built-in scenario name")
        ->capture_default_str();
    simulate->add_option("--scenario-file", sim.scenario_file, "Scenario JSON file");
    simulate->add_option("--variant", sim.variants,
                         "Variant of the built-in scenario (emg-dropout, logger-fault, "
                         "idle-power-loss); repeatable");
    auto* seed_opt = simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--noise", noise, "1 = ADC jitter on, 0 = noise-free")
        ->check(CLI::IsMember({0, 1}));
    simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
    simulate->add_flag("--frames", sim.write_frames, "Also write the raw frame stream (.ebb.bin)");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a .ebb.csv log");
    validate->add_option("log", validate_path, "Log file")->required();

    AnalyzeOptions an;
    std::vector<std::string> queries;
    std::string analyze_log;
    auto* analyze = app.add_subcommand("analyze", "Run the detectors and write the report");
    analyze->add_option("log", analyze_log, "Log file")->required();
    analyze->add_option("--query", queries, "Actuation query t0:t1 (repeatable)");
    analyze->add_option("--min-run", an.config.min_powerloss_run, "Minimum all-zero run")
        ->capture_default_str();
    analyze->add_option("--flat-eps", an.config.flat_eps_emg, "EMG flatness threshold")
        ->capture_default_str();
    analyze->add_option("--pos-delta", an.config.pos_activity_delta,
                        "Elbow position activity threshold (deg)")
        ->capture_default_str();
    analyze->add_option("--window", an.config.window, "Sliding window (records)")
        ->capture_default_str();
    analyze->add_option("--load-torque", an.config.load_torque_min,
                        "Under-load torque threshold (N·m)")
        ->capture_default_str();
    analyze->add_flag("--low-conf-without-heartbeat",
                      an.config.powerloss_low_conf_without_heartbeat,
                      "Report PowerLoss with low confidence when the log has no heartbeat");
    analyze->add_option("--out", an.out_dir, "Report directory")->capture_default_str();

    std::string frames_path, collect_out;
    std::uint32_t session_len = 0;
    auto* collect = app.add_subcommand("collect", "Decode a captured frame stream into a log");
    collect->add_option("frames", frames_path, "Frame stream file")->required();
    collect->add_option("--session-len", session_len, "Session length in seconds")->required();
    collect->add_option("--out", collect_out, "Output .ebb.csv path")->required();

    ServeOptions sv;
    std::string serve_log, serve_report;
    auto* serve = app.add_subcommand("serve", "Serve a log and its report over HTTP/JSON");
    serve->add_option("log", serve_log, "Log file")->required();
    serve->add_option("--report", serve_report, "report.json from analyze")->required();
    serve->add_option("--bind", sv.bind, "host:port")->capture_default_str();
    serve->add_option("--annotations", sv.annotations_path, "Annotation sidecar (.jsonl)");
    serve->add_option("--cors-origin", sv.cors_origin, "Allowed UI origin")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (*simulate) {
        if (*seed_opt) sim.seed = seed;
        if (noise >= 0) sim.noise = noise == 1;
        return cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*validate) return cmd_validate(validate_path, std::cout, std::cerr);
    if (*analyze) {
        an.log_path = analyze_log;
        try {
            for (const auto& q : queries) an.queries.push_back(parse_query(q));
        } catch (const std::exception& e) {
            std::cerr << "analyze: " << e.what() << '\n';
            return kExitUsage;
        }
        return cmd_analyze(an, std::cout, std::cerr);
    }
    if (*collect) return cmd_collect(frames_path, session_len, collect_out, std::cout, std::cerr);
    if (*serve) {
        sv.log_path = serve_log;
        sv.report_path = serve_report;
        return cmd_serve(sv, std::cout, std::cerr);
    }
    return kExitUsage;
}
