#include "ebb/commands.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <ostream>

#include "ebb/pipeline.hpp"
#include "ebb/service.hpp"
#include "ebb/sim.hpp"
#include "ebb/store.hpp"

namespace ebb::cli {
namespace {

std::string log_stem(const std::filesystem::path& log_path) {
    std::string name = log_path.filename().string();
    constexpr std::string_view kExt = ".ebb.csv";
    if (name.size() > kExt.size() && name.ends_with(kExt)) return name.substr(0, name.size() - kExt.size());
    return log_path.stem().string();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string summary_line(const Finding& f) {
    std::string line = std::string(to_string(f.kind)) + " [" + std::to_string(f.t0) + ", " +
                       std::to_string(f.t1) + ") " + std::string(to_string(f.confidence));
    if (!f.note.empty()) line += " - " + f.note;
    return line;
}

}  // namespace

SimulateOutputs simulate_outputs(const std::filesystem::path& out_dir, const std::string& stem) {
    return {out_dir / (stem + ".ebb.csv"), out_dir / (stem + ".meta.json"),
            out_dir / (stem + ".truth.json"), out_dir / (stem + ".ebb.bin")};
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
    sim::Scenario scenario;
    try {
        if (opts.scenario_file) {
            if (!opts.variants.empty()) {
                throw ArgumentError("--variant only applies to built-in scenarios");
            }
            scenario = sim::load_scenario_file(*opts.scenario_file);
        } else {
            scenario = sim::builtin_scenario(opts.scenario, opts.variants);
        }
        if (opts.seed) scenario.seed = *opts.seed;
        if (opts.noise) scenario.noise = *opts.noise;
        sim::validate(scenario);
    } catch (const ArgumentError& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const auto run = run_pipeline(scenario);
        std::filesystem::create_directories(opts.out_dir);
        const auto paths = simulate_outputs(opts.out_dir, scenario.name);
        store::save_log(run.log, paths.csv);
        write_text(paths.truth, sim::truth_to_json(scenario, run.truth).dump(2) + "\n");
        if (opts.write_frames) {
            std::ofstream bin(paths.frames, std::ios::binary | std::ios::trunc);
            bin.write(reinterpret_cast<const char*>(run.stream.data()),
                      static_cast<std::streamsize>(run.stream.size()));
            if (!bin) throw std::runtime_error("write to " + paths.frames.string() + " failed");
        }
        out << "wrote " << paths.csv.string() << " (" << run.log.size() << " records)\n";
        out << "wrote " << paths.truth.string() << '\n';
        if (opts.write_frames) {
            out << "wrote " << paths.frames.string() << " (" << run.stream.size() << " bytes)\n";
        }
        for (const auto& w : run.warnings) err << "warning: " << w << '\n';
    } catch (const std::exception& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_validate(const std::filesystem::path& log_path, std::ostream& out, std::ostream& err) {
    EbbLog log;
    try {
        log = store::load_log(log_path);
    } catch (const InvariantError& e) {
        out << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception& e) {
        err << "validate: " << e.what() << '\n';
        return kExitUsage;
    }

    std::size_t bad = 0;
    for (const auto& r : log.records) {
        for (const auto& v : validate_record(r).violations) {
            out << "t=" << r.t << ": " << v.channel << "=" << v.value << " " << v.bound << '\n';
            ++bad;
        }
    }
    if (bad > 0) return kExitInvariant;
    out << "ok: " << log.size() << " records\n";
    return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
    EbbLog log;
    try {
        opts.config.validate();
        log = store::load_log(opts.log_path);
    } catch (const std::exception& e) {
        err << "analyze: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        const auto report = forensics::build_report(log, opts.queries, opts.config);
        std::filesystem::create_directories(opts.out_dir);
        write_text(opts.out_dir / "report.json", report.to_json().dump(2) + "\n");
        write_text(opts.out_dir / "report.md", report.to_markdown());
        for (const auto& f : report.timeline.findings) out << summary_line(f) << '\n';
        if (report.timeline.findings.empty()) out << "no findings\n";
    } catch (const std::exception& e) {
        err << "analyze: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_collect(const std::filesystem::path& frames_path, std::uint32_t session_len,
                const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err) {
    std::ifstream in(frames_path, std::ios::binary);
    if (!in) {
        err << "collect: cannot open " << frames_path.string() << '\n';
        return kExitUsage;
    }
    const wire::Bytes bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        auto run = collect_stream(bytes, session_len);
        if (run.log.meta.session_id.empty()) run.log.meta.session_id = log_stem(out_csv);
        if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
        store::save_log(run.log, out_csv);
        for (const auto& w : run.warnings) err << "warning: " << w << '\n';
        out << "wrote " << out_csv.string() << " (" << run.log.size() << " records)\n";
    } catch (const std::exception& e) {
        err << "collect: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

std::filesystem::path default_annotations_path(const std::filesystem::path& log_path) {
    return log_path.parent_path() / (log_stem(log_path) + ".annotations.jsonl");
}

int cmd_serve(const ServeOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        auto log = store::load_log(opts.log_path);
        std::ifstream in(opts.report_path);
        if (!in) throw std::runtime_error("cannot open " + opts.report_path.string());
        auto findings = forensics::findings_from_report_json(nlohmann::json::parse(in));
        const auto [host, port] = service::parse_bind(opts.bind);
        service::Server server(std::move(log), std::move(findings),
                               opts.annotations_path.value_or(
                                   default_annotations_path(opts.log_path)),
                               opts.cors_origin);
        out << "serving " << opts.log_path.string() << " on http://" << host << ':' << port
            << std::endl;
        if (!server.listen(host, port)) {
            err << "serve: cannot bind " << opts.bind << '\n';
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        err << "serve: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

forensics::Interval parse_query(const std::string& text) {
    const auto colon = text.find(':');
    auto parse = [&](std::string_view s) {
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw ArgumentError("query must look like t0:t1, got '" + text + "'");
        }
        return v;
    };
    if (colon == std::string::npos) throw ArgumentError("query must look like t0:t1, got '" + text + "'");
    const std::string_view view(text);
    const forensics::Interval q{parse(view.substr(0, colon)), parse(view.substr(colon + 1))};
    if (q.t0 >= q.t1) throw ArgumentError("query needs t0 < t1, got '" + text + "'");
    return q;
}

}  // namespace ebb::cli
