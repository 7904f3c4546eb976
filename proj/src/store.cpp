#include "ebb/store.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace ebb::store {
namespace {

constexpr std::size_t kColumnCount = 2 + kChannelCount + 2;

std::vector<std::string> header_columns() {
    std::vector<std::string> cols{"seq", "t"};
    for (auto id : canonical_channel_order()) cols.emplace_back(channel_info(id).column);
    cols.emplace_back("hb");
    cols.emplace_back("synth");
    return cols;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, const std::string& column) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(line, column, "cannot parse '" + std::string(text) + "'");
    }
    return value;
}

bool parse_flag(std::string_view text, std::size_t line, const std::string& column) {
    if (text == "0") return false;
    if (text == "1") return true;
    throw ParseError(line, column, "expected 0 or 1, got '" + std::string(text) + "'");
}

// nlohmann stores doubles; route through the shortest float text so the JSON
// shows the same digits as the CSV.
double json_number(float v) { return std::strtod(format_value(v).c_str(), nullptr); }

}  // namespace

const std::string& csv_header() {
    static const std::string header = [] {
        std::string h;
        for (const auto& c : header_columns()) {
            if (!h.empty()) h += ',';
            h += c;
        }
        return h;
    }();
    return header;
}

void check_log_invariants(const EbbLog& log) {
    for (std::size_t i = 1; i < log.records.size(); ++i) {
        const auto& prev = log.records[i - 1];
        const auto& cur = log.records[i];
        if (cur.t <= prev.t) {
            throw InvariantError("t not increasing at t=" + std::to_string(cur.t));
        }
        if (cur.t != prev.t + 1) {
            throw InvariantError("gap at t=" + std::to_string(prev.t + 1));
        }
        if (cur.seq <= prev.seq) {
            throw InvariantError("seq not increasing at t=" + std::to_string(cur.t));
        }
    }
}

std::string format_value(float v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::size_t write_csv(const EbbLog& log, std::ostream& out) {
    check_log_invariants(log);
    std::string text = csv_header();
    text += '\n';
    char buf[32];
    for (const auto& r : log.records) {
        auto [p1, e1] = std::to_chars(buf, buf + sizeof buf, r.seq);
        text.append(buf, p1);
        text += ',';
        auto [p2, e2] = std::to_chars(buf, buf + sizeof buf, r.t);
        text.append(buf, p2);
        for (float v : r.values) {
            text += ',';
            auto [p3, e3] = std::to_chars(buf, buf + sizeof buf, v);
            text.append(buf, p3);
        }
        text += r.hb ? ",1" : ",0";
        text += r.synthesized ? ",1\n" : ",0\n";
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    return text.size();
}

std::size_t write_csv(const EbbLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const auto n = write_csv(log, out);
    out.flush();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
    return n;
}

EbbLog read_csv(std::istream& in, SessionMeta meta) {
    const auto expected = header_columns();
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "", "missing header");
    if (line != csv_header()) {
        const auto got = split(line);
        for (const auto& col : expected) {
            if (std::find(got.begin(), got.end(), col) == got.end()) {
                throw ParseError(1, col, "missing column");
            }
        }
        for (auto col : got) {
            if (std::find(expected.begin(), expected.end(), col) == expected.end()) {
                throw ParseError(1, std::string(col), "unknown column");
            }
        }
        throw ParseError(1, "", "columns out of order");
    }

    EbbLog log;
    log.meta = std::move(meta);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split(line);
        if (fields.size() != kColumnCount) {
            throw ParseError(line_no, "", "expected " + std::to_string(kColumnCount) +
                                              " columns, got " + std::to_string(fields.size()));
        }
        EbbRecord r;
        r.seq = parse_field<std::uint64_t>(fields[0], line_no, expected[0]);
        r.t = parse_field<std::uint32_t>(fields[1], line_no, expected[1]);
        for (std::size_t i = 0; i < kChannelCount; ++i) {
            r.values[i] = parse_field<float>(fields[2 + i], line_no, expected[2 + i]);
        }
        r.hb = parse_flag(fields[14], line_no, expected[14]);
        r.synthesized = parse_flag(fields[15], line_no, expected[15]);
        log.records.push_back(r);
    }
    check_log_invariants(log);
    return log;
}

EbbLog read_csv(const std::filesystem::path& path, SessionMeta meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_csv(in, std::move(meta));
}

std::span<const EbbRecord> read_range(const EbbLog& log, std::uint32_t t0, std::uint32_t t1) {
    if (t0 > t1) {
        throw ArgumentError("read_range: t0=" + std::to_string(t0) + " > t1=" +
                            std::to_string(t1));
    }
    const auto& recs = log.records;
    auto lo = std::lower_bound(recs.begin(), recs.end(), t0,
                               [](const EbbRecord& r, std::uint32_t t) { return r.t < t; });
    auto hi = std::lower_bound(lo, recs.end(), t1,
                               [](const EbbRecord& r, std::uint32_t t) { return r.t < t; });
    return {lo, hi};
}

nlohmann::ordered_json meta_to_json(const SessionMeta& meta) {
    return {{"session_id", meta.session_id},
            {"device_id", meta.device_id},
            {"start_utc", meta.start_utc},
            {"rate_hz", meta.rate_hz},
            {"schema_version", meta.schema_version}};
}

SessionMeta meta_from_json(const nlohmann::json& j) {
    SessionMeta m;
    m.session_id = j.value("session_id", "");
    m.device_id = j.value("device_id", "");
    m.start_utc = j.value("start_utc", "");
    m.rate_hz = j.value("rate_hz", 1);
    m.schema_version = j.value("schema_version", 1);
    return m;
}

std::filesystem::path meta_sidecar_path(const std::filesystem::path& csv_path) {
    std::string name = csv_path.filename().string();
    constexpr std::string_view kExt = ".ebb.csv";
    if (name.size() > kExt.size() && name.ends_with(kExt)) {
        name.resize(name.size() - kExt.size());
    } else {
        name = csv_path.stem().string();
    }
    return csv_path.parent_path() / (name + ".meta.json");
}

void save_log(const EbbLog& log, const std::filesystem::path& csv_path) {
    write_csv(log, csv_path);
    const auto meta_path = meta_sidecar_path(csv_path);
    std::ofstream out(meta_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + meta_path.string() + " for writing");
    out << meta_to_json(log.meta).dump(2) << '\n';
}

EbbLog load_log(const std::filesystem::path& csv_path) {
    SessionMeta meta;
    const auto meta_path = meta_sidecar_path(csv_path);
    if (std::filesystem::exists(meta_path)) {
        std::ifstream in(meta_path);
        meta = meta_from_json(nlohmann::json::parse(in));
    } else {
        meta.session_id = meta_path.stem().stem().string();
    }
    return read_csv(csv_path, std::move(meta));
}

nlohmann::ordered_json record_to_json(const EbbRecord& r) {
    auto row = nlohmann::ordered_json::array();
    row.push_back(r.seq);
    row.push_back(r.t);
    for (float v : r.values) row.push_back(json_number(v));
    row.push_back(r.hb ? 1 : 0);
    row.push_back(r.synthesized ? 1 : 0);
    return row;
}

nlohmann::ordered_json finding_to_json(const Finding& f, std::size_t id) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["kind"] = to_string(f.kind);
    j["t0"] = f.t0;
    j["t1"] = f.t1;
    auto evidence = nlohmann::ordered_json::array();
    for (auto c : f.evidence) evidence.push_back(channel_info(c).column);
    j["evidence"] = std::move(evidence);
    j["confidence"] = to_string(f.confidence);
    j["note"] = f.note;
    if (f.value) j["value"] = *f.value;
    return j;
}

nlohmann::ordered_json export_json(const EbbLog& log, std::span<const Finding> findings) {
    const std::uint32_t begin = log.empty() ? 0 : log.records.front().t;
    const std::uint32_t end = log.empty() ? 0 : log.records.back().t + 1;

    nlohmann::ordered_json doc;
    doc["meta"] = meta_to_json(log.meta);
    auto channels = nlohmann::ordered_json::array();
    for (auto id : canonical_channel_order()) channels.push_back(channel_info(id).column);
    doc["channels"] = std::move(channels);
    auto records = nlohmann::ordered_json::array();
    for (const auto& r : log.records) records.push_back(record_to_json(r));
    doc["records"] = std::move(records);
    auto out = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < findings.size(); ++i) {
        const auto& f = findings[i];
        if (f.t0 >= f.t1 || f.t0 < begin || f.t1 > end) {
            throw ArgumentError(std::string(to_string(f.kind)) + " finding [" +
                                std::to_string(f.t0) + ", " + std::to_string(f.t1) +
                                ") lies outside the log [" + std::to_string(begin) + ", " +
                                std::to_string(end) + ")");
        }
        out.push_back(finding_to_json(f, i));
    }
    doc["findings"] = std::move(out);
    return doc;
}

}  // namespace ebb::store
