#include <filesystem>

#include <gtest/gtest.h>

#include "uavsim/config.h"

namespace {

using namespace uavsim;

TEST(RunConfig, DefaultsFromEmptyObject) {
    const RunConfig c = parse_run_config("{}");
    EXPECT_EQ(c.mission, Mission::CPP);
    EXPECT_EQ(c.map, "builtin:manhattan32");
    EXPECT_EQ(c.observation, (ObservationSpec{17, 3}));
    EXPECT_EQ(c.train.batch_size, 128);
    EXPECT_DOUBLE_EQ(c.train.gamma, 0.95);
    EXPECT_DOUBLE_EQ(c.network.flying_time_scale, 150.0);
    EXPECT_EQ(c.network.hidden, (std::vector<int>{256, 256, 256}));
}

TEST(RunConfig, ReadsSectionsAndOverrides) {
    const RunConfig c = parse_run_config(
        R"({"mission":"dh","observation":{"local_size":9,"global_scaling":7},
            "scenario":{"movement_budget":[150,300]},"train":{"gamma":0.9}})",
        {"train.gamma=0.5", "network.hidden=[32,32]", "map=builtin:open8", "channel.step_time=2"});
    EXPECT_EQ(c.mission, Mission::DH);
    EXPECT_EQ(c.scenario.mission, Mission::DH);
    EXPECT_EQ(c.observation, (ObservationSpec{9, 7}));
    EXPECT_EQ(c.scenario.movement_budget, (Range<int>{150, 300}));
    EXPECT_DOUBLE_EQ(c.network.flying_time_scale, 300.0);
    EXPECT_DOUBLE_EQ(c.train.gamma, 0.5);
    EXPECT_EQ(c.network.hidden, (std::vector<int>{32, 32}));
    EXPECT_EQ(c.map, "builtin:open8");
    EXPECT_DOUBLE_EQ(c.channel.step_time, 2.0);
}

TEST(RunConfig, RoundTripsThroughJson) {
    const RunConfig c = parse_run_config(R"({"mission":"dh","seed":42,"train":{"tau":0.01}})", {"rewards.crash_penalty=-7"});
    const RunConfig again = parse_run_config(run_config_to_json(c));
    EXPECT_EQ(run_config_to_json(again), run_config_to_json(c));
    EXPECT_EQ(again.seed, 42u);
    EXPECT_DOUBLE_EQ(again.rewards.crash_penalty, -7.0);
}

TEST(RunConfig, RejectsBadInput) {
    EXPECT_THROW(parse_run_config("{"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"trian":{}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"train":{"gama":0.9}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"train":{"gamma":"high"}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"train":{"gamma":2}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"mission":"survey"})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"scenario":{"movement_budget":[1]}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"rewards":{"crash_penalty":1}})"), ConfigError);
    EXPECT_THROW(parse_run_config("{}", {"novalue"}), ConfigError);
    EXPECT_THROW(parse_run_config("{}", {"train.unknown=1"}), ConfigError);
    EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST(MakeSetup, LoadsMapAndChecksSpec) {
    RunConfig c = parse_run_config("{}", {"map=builtin:open8", "observation.local_size=5", "observation.global_scaling=2",
                                          "network.kernel_size=3", "network.conv_layers=1"});
    const uavsim::Setup s = make_setup(c);
    EXPECT_EQ(s.env->size(), 8);
    EXPECT_EQ(s.spec, (ObservationSpec{5, 2}));

    c.observation = {17, 3};
    EXPECT_THROW(make_setup(c), ConfigError);
    c = parse_run_config("{}", {"map=/no/such/map.json"});
    try {
        make_setup(c);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/no/such/map.json"), std::string::npos);
    }
}

}  // namespace
