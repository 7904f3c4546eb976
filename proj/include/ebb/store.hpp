#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ebb/core.hpp"
#include "ebb/finding.hpp"

namespace ebb {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) +
                             (column.empty() ? "" : ", column '" + column + "'") + ": " + what),
          line_(line),
          column_(std::move(column)) {}

    std::size_t line() const { return line_; }
    const std::string& column() const { return column_; }

private:
    std::size_t line_;
    std::string column_;
};

class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EbbLog {
    SessionMeta meta;
    std::vector<EbbRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    friend bool operator==(const EbbLog&, const EbbLog&) = default;
};

namespace store {

/// The exact CSV header line (without the trailing LF).
const std::string& csv_header();

/// Throws InvariantError unless records step by exactly one second with
/// strictly increasing seq.
void check_log_invariants(const EbbLog& log);

/// Shortest round-trip decimal text for a channel value.
std::string format_value(float v);

std::size_t write_csv(const EbbLog& log, std::ostream& out);
std::size_t write_csv(const EbbLog& log, const std::filesystem::path& path);

EbbLog read_csv(std::istream& in, SessionMeta meta = {});
EbbLog read_csv(const std::filesystem::path& path, SessionMeta meta = {});

/// Half-open [t0, t1). Throws ArgumentError if t0 > t1.
std::span<const EbbRecord> read_range(const EbbLog& log, std::uint32_t t0, std::uint32_t t1);

nlohmann::ordered_json meta_to_json(const SessionMeta& meta);
SessionMeta meta_from_json(const nlohmann::json& j);

/// `<dir>/<stem>.meta.json` for a `<dir>/<stem>.ebb.csv` log path.
std::filesystem::path meta_sidecar_path(const std::filesystem::path& csv_path);

/// Writes the CSV and the meta sidecar.
void save_log(const EbbLog& log, const std::filesystem::path& csv_path);
/// Reads the CSV plus its meta sidecar if one exists.
EbbLog load_log(const std::filesystem::path& csv_path);

nlohmann::ordered_json record_to_json(const EbbRecord& r);
nlohmann::ordered_json finding_to_json(const Finding& f, std::size_t id);

/// UI feed: {meta, channels, records, findings}. Throws ArgumentError when a
/// finding's interval falls outside the log.
nlohmann::ordered_json export_json(const EbbLog& log, std::span<const Finding> findings);

}  // namespace store
}  // namespace ebb
