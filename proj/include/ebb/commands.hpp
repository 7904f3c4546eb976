#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ebb/forensics.hpp"

namespace ebb::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

struct SimulateOptions {
    std::string scenario = "mock-accident";
    std::optional<std::filesystem::path> scenario_file;
    std::vector<std::string> variants;
    std::optional<std::uint64_t> seed;
    std::optional<bool> noise;
    std::filesystem::path out_dir = ".";
    bool write_frames = false;
};

/// Paths written by cmd_simulate for a scenario named `stem`.
struct SimulateOutputs {
    std::filesystem::path csv;
    std::filesystem::path meta;
    std::filesystem::path truth;
    std::filesystem::path frames;
};
SimulateOutputs simulate_outputs(const std::filesystem::path& out_dir, const std::string& stem);

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

int cmd_validate(const std::filesystem::path& log_path, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
    std::filesystem::path log_path;
    forensics::DetectorConfig config;
    std::vector<forensics::Interval> queries;
    std::filesystem::path out_dir = ".";
};

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);

/// Decodes a captured frame stream file into a `.ebb.csv` log.
int cmd_collect(const std::filesystem::path& frames_path, std::uint32_t session_len,
                const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err);

struct ServeOptions {
    std::filesystem::path log_path;
    std::filesystem::path report_path;
    std::string bind = "127.0.0.1:8790";
    std::optional<std::filesystem::path> annotations_path;
    std::string cors_origin = "*";
};

/// `<dir>/<stem>.annotations.jsonl` next to the log.
std::filesystem::path default_annotations_path(const std::filesystem::path& log_path);

int cmd_serve(const ServeOptions& opts, std::ostream& out, std::ostream& err);

/// "t0:t1" → Interval; throws ArgumentError.
forensics::Interval parse_query(const std::string& text);

}  // namespace ebb::cli
