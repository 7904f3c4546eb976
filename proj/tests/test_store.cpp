#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ebb/store.hpp"
#include "test_support.hpp"

using namespace ebb;
using namespace ebb::store;

namespace {

const std::string kHeader =
    "seq,t,emg_lb,emg_lt,emg_rb,emg_rt,dec_l,dec_r,pos_l,pos_r,torque_l,torque_r,temp_l,temp_r,"
    "hb,synth";

std::string to_csv(const EbbLog& log) {
    std::ostringstream os;
    write_csv(log, os);
    return os.str();
}

EbbLog from_csv(const std::string& text) {
    std::istringstream is(text);
    return read_csv(is);
}

EbbLog ten_records() {
    std::mt19937_64 rng(10);
    return testing_support::random_log(rng, 10);
}

}  // namespace

TEST(WriteCsv, HeaderIsExact) { EXPECT_EQ(csv_header(), kHeader); }

TEST(WriteCsv, EmptyLogIsHeaderOnly) {
    EbbLog log;
    std::ostringstream os;
    EXPECT_EQ(write_csv(log, os), kHeader.size() + 1);
    EXPECT_EQ(os.str(), kHeader + "\n");
}

TEST(WriteCsv, ZeroFilledRecordLine) {
    EbbLog log;
    EbbRecord r;
    r.synthesized = true;
    log.records.push_back(r);
    EXPECT_EQ(to_csv(log), kHeader + "\n0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1\n");
}

TEST(WriteCsv, ShortestRoundTripValues) {
    EXPECT_EQ(format_value(8.7F), "8.7");
    EXPECT_EQ(format_value(26.1F), "26.1");
    EXPECT_EQ(format_value(1.0F), "1");
    EXPECT_EQ(format_value(-19.865F), "-19.865");
    EXPECT_EQ(format_value(0.1F), "0.1");
}

TEST(WriteCsv, RejectsBrokenOrdering) {
    auto log = ten_records();
    log.records[4].t = 9;
    std::ostringstream os;
    EXPECT_THROW(write_csv(log, os), InvariantError);
}

TEST(WriteCsv, UnwritableDestinationNamesThePath) {
    const std::filesystem::path bad = "/nonexistent-dir/x.ebb.csv";
    try {
        write_csv(ten_records(), bad);
        FAIL() << "expected failure";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.ebb.csv"), std::string::npos);
    }
}

TEST(ReadCsv, RoundTripRandomLogs) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        auto log = testing_support::random_log(rng, rng() % 400, static_cast<std::uint32_t>(rng() % 50));
        std::istringstream is(to_csv(log));
        EXPECT_EQ(read_csv(is, log.meta), log) << "trial " << trial;
    }
}

TEST(ReadCsv, DeterministicBytes) {
    const auto log = ten_records();
    EXPECT_EQ(to_csv(log), to_csv(log));
}

TEST(ReadCsv, MissingColumnNamed) {
    const std::string header15 = kHeader.substr(0, kHeader.size() - std::string(",synth").size());
    try {
        from_csv(header15 + "\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), "synth");
    }
}

TEST(ReadCsv, UnknownColumnNamed) {
    try {
        from_csv(kHeader + ",extra\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.column(), "extra");
    }
}

TEST(ReadCsv, WrongColumnCountNamesLine) {
    try {
        from_csv(kHeader + "\n0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1\n1,1,0,0\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ReadCsv, BadFieldNamesColumn) {
    try {
        from_csv(kHeader + "\n0,0,0,0,0,0,0,0,x,0,0,0,0,0,0,1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), "pos_l");
    }
    EXPECT_THROW(from_csv(kHeader + "\n0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,1\n"), ParseError);
}

TEST(ReadCsv, GapIsInvariantError) {
    const std::string row = ",0,0,0,0,0,0,0,0,0,0,0,0,0,1\n";
    try {
        from_csv(kHeader + "\n0,0" + row + "1,1" + row + "2,3" + row);
        FAIL() << "expected InvariantError";
    } catch (const InvariantError& e) {
        EXPECT_STREQ(e.what(), "gap at t=2");
    }
    EXPECT_THROW(from_csv(kHeader + "\n0,5" + row + "1,4" + row), InvariantError);
    EXPECT_THROW(from_csv(kHeader + "\n3,0" + row + "3,1" + row), InvariantError);
}

TEST(ReadCsv, EmptyInputIsParseError) { EXPECT_THROW(from_csv(""), ParseError); }

TEST(ReadRange, HalfOpenSemantics) {
    const auto log = ten_records();
    EXPECT_TRUE(read_range(log, 0, 0).empty());
    const auto mid = read_range(log, 3, 6);
    ASSERT_EQ(mid.size(), 3u);
    EXPECT_EQ(mid[0].t, 3u);
    EXPECT_EQ(mid[2].t, 5u);
    EXPECT_TRUE(read_range(log, 10, 20).empty());
    EXPECT_THROW(read_range(log, 5, 4), ArgumentError);
}

TEST(ReadRange, AdjacentRangesReconstructLog) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto log = testing_support::random_log(rng, 1 + rng() % 200, static_cast<std::uint32_t>(rng() % 20));
        std::vector<std::uint32_t> cuts{0};
        for (int k = 0; k < 5; ++k) cuts.push_back(static_cast<std::uint32_t>(rng() % 260));
        cuts.push_back(300);
        std::sort(cuts.begin(), cuts.end());
        std::vector<EbbRecord> rebuilt;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const auto part = read_range(log, cuts[k], cuts[k + 1]);
            if (!part.empty()) {
                // Contiguous slice of the original.
                EXPECT_GE(part.data(), log.records.data());
                EXPECT_EQ(part.back().t - part.front().t + 1, part.size());
            }
            rebuilt.insert(rebuilt.end(), part.begin(), part.end());
        }
        EXPECT_EQ(rebuilt, log.records);
    }
}

TEST(ExportJson, EmptyLog) {
    EbbLog log;
    const auto j = export_json(log, {});
    EXPECT_TRUE(j["records"].empty());
    EXPECT_TRUE(j["findings"].empty());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"meta", "channels", "records", "findings"}));
}

TEST(ExportJson, ChannelsCanonicalAndRecordsInColumnOrder) {
    const auto log = ten_records();
    const auto j = export_json(log, {});
    ASSERT_EQ(j["channels"].size(), 12u);
    const auto& order = canonical_channel_order();
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(j["channels"][i], std::string(channel_info(order[i]).column));
    }
    ASSERT_EQ(j["records"].size(), 10u);
    const auto& row = j["records"][3];
    ASSERT_EQ(row.size(), 16u);
    EXPECT_EQ(row[1], 3);
    EXPECT_EQ(row[2].get<double>(), std::stod(format_value(log.records[3].values[0])));
}

TEST(ExportJson, FindingOutsideLogRejected) {
    const auto log = ten_records();
    Finding inside{FindingKind::PowerLoss, 2, 5, {ChannelId::PosLeft}, Confidence::High, "x", {}};
    Finding outside = inside;
    outside.t1 = 11;
    const auto j = export_json(log, std::vector<Finding>{inside});
    EXPECT_EQ(j["findings"][0]["kind"], "PowerLoss");
    EXPECT_EQ(j["findings"][0]["evidence"][0], "pos_l");
    EXPECT_THROW(export_json(log, std::vector<Finding>{outside}), ArgumentError);
}

TEST(SaveLoad, MetaSidecarRoundTrip) {
    const auto dir = testing_support::scratch_dir("saveload");
    const auto log = ten_records();
    save_log(log, dir / "run.ebb.csv");
    EXPECT_TRUE(std::filesystem::exists(dir / "run.meta.json"));
    EXPECT_EQ(load_log(dir / "run.ebb.csv"), log);
    std::filesystem::remove(dir / "run.meta.json");
    EXPECT_EQ(load_log(dir / "run.ebb.csv").meta.session_id, "run");
}
