#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ebb/core.hpp"

using namespace ebb;

namespace {

EbbRecord live_record() {
    EbbRecord r;
    r[ChannelId::EmgLeftBicep] = 250;
    r[ChannelId::EmgLeftTricep] = 40;
    r[ChannelId::EmgRightBicep] = 260;
    r[ChannelId::EmgRightTricep] = 35;
    r[ChannelId::DecisionLeft] = 1;
    r[ChannelId::DecisionRight] = 1;
    r[ChannelId::PosLeft] = 90;
    r[ChannelId::PosRight] = 91;
    r[ChannelId::TorqueLeft] = 19.5F;
    r[ChannelId::TorqueRight] = 19.4F;
    r[ChannelId::TempLeft] = 24;
    r[ChannelId::TempRight] = 23.5F;
    r.hb = true;
    return r;
}

}  // namespace

TEST(ChannelOrder, TwelveDistinctChannelsInTwoGroups) {
    const auto& order = canonical_channel_order();
    ASSERT_EQ(order.size(), 12u);
    EXPECT_EQ(order.front(), ChannelId::EmgLeftBicep);
    EXPECT_EQ(order.back(), ChannelId::TempRight);
    std::set<ChannelId> unique(order.begin(), order.end());
    EXPECT_EQ(unique.size(), 12u);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto g = channel_info(order[i]).group;
        EXPECT_TRUE(g == ChannelGroup::Emg || g == ChannelGroup::Decision) << i;
    }
    for (std::size_t i = 6; i < 12; ++i) {
        const auto g = channel_info(order[i]).group;
        EXPECT_TRUE(g == ChannelGroup::Position || g == ChannelGroup::Torque ||
                    g == ChannelGroup::Temperature)
            << i;
    }
    EXPECT_EQ(&canonical_channel_order(), &order);
}

TEST(ValidateRecord, InRangeRecordIsOk) { EXPECT_TRUE(validate_record(live_record()).ok()); }

TEST(ValidateRecord, FractionalDecisionIsRejected) {
    auto r = live_record();
    r[ChannelId::DecisionLeft] = 0.5F;
    const auto v = validate_record(r);
    ASSERT_EQ(v.violations.size(), 1u);
    EXPECT_EQ(v.violations[0].channel, "dec_l");
    EXPECT_EQ(v.violations[0].bound, "decision not in {0,1}");
    EXPECT_DOUBLE_EQ(v.violations[0].value, 0.5);
}

TEST(ValidateRecord, AllZeroWithoutHeartbeatIsPermitted) {
    EbbRecord r;
    r.synthesized = true;
    EXPECT_TRUE(validate_record(r).ok());
}

TEST(ValidateRecord, OutOfRangeChannelsAreNamed) {
    auto r = live_record();
    r[ChannelId::TorqueRight] = 55;
    r[ChannelId::EmgLeftBicep] = 2000;
    const auto v = validate_record(r);
    ASSERT_EQ(v.violations.size(), 2u);
    EXPECT_EQ(v.violations[0].channel, "emg_lb");
    EXPECT_EQ(v.violations[1].channel, "torque_r");
}

TEST(ValidateRecord, HeartbeatOnZeroFilledRecordIsViolation) {
    EbbRecord r;
    r.synthesized = true;
    r.hb = true;
    EXPECT_FALSE(validate_record(r).ok());
}

TEST(ValidateRecord, NonFiniteRejected) {
    auto r = live_record();
    r[ChannelId::TempLeft] = std::numeric_limits<float>::quiet_NaN();
    EXPECT_FALSE(validate_record(r).ok());
}

TEST(ClassifyZero, Examples) {
    EbbRecord zero;
    EXPECT_EQ(classify_zero(zero), ZeroClassification::PowerLoss);
    zero.hb = true;
    EXPECT_EQ(classify_zero(zero), ZeroClassification::LoggerOrSensorFault);
    EbbRecord one;
    one[ChannelId::PosLeft] = 42.0F;
    EXPECT_EQ(classify_zero(one), ZeroClassification::Normal);
}

TEST(ClassifyZero, PartitionOnRandomValidRecords) {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 5000; ++trial) {
        EbbRecord r;
        const bool make_zero = rng() % 3 == 0;
        if (!make_zero) {
            // Random subset of channels set to random in-range values.
            for (auto id : canonical_channel_order()) {
                if (rng() % 2) continue;
                const auto& info = channel_info(id);
                if (info.group == ChannelGroup::Decision) {
                    r[id] = static_cast<float>(rng() % 2);
                } else {
                    const double u = static_cast<double>(rng() % 10001) / 10000.0;
                    r[id] = static_cast<float>(info.min + u * (info.max - info.min));
                }
            }
        }
        r.hb = rng() % 2;
        ASSERT_TRUE(validate_record(r).ok());
        const auto c = classify_zero(r);
        EXPECT_EQ(c, classify_zero(r));
        const bool zero = r.all_zero();
        EXPECT_EQ(c == ZeroClassification::PowerLoss, zero && !r.hb);
        EXPECT_EQ(c == ZeroClassification::LoggerOrSensorFault, zero && r.hb);
        EXPECT_EQ(c == ZeroClassification::Normal, !zero);
    }
}
