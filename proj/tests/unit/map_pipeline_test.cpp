#include <random>

#include <gtest/gtest.h>

#include "support/oracles.h"
#include "uavsim/map_pipeline.h"
#include "uavsim/q_network.h"
#include "uavsim/scenarios.h"

namespace {

using namespace uavsim;

Tensor3<double> random_tensor(std::mt19937_64& rng, int channels, int m) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Tensor3<double> t(channels, m, m);
    for (double& v : t.values()) v = u(rng);
    return t;
}

TEST(CenterMap, SingleCellMapIsUnchanged) {
    Tensor3<double> t(2, 1, 1);
    t(0, 0, 0) = 3.0;
    t(1, 0, 0) = -1.0;
    const std::vector<double> pad{9.0, 9.0};
    EXPECT_EQ(center_map<double>(t, {0, 0}, pad), t);
}

TEST(CenterMap, CornerPositionPadsTopLeft) {
    Tensor3<double> t(1, 3, 3);
    for (int k = 0; k < 9; ++k) t.values()[k] = k + 1;
    const std::vector<double> pad{-1.0};
    const auto c = center_map<double>(t, {0, 0}, pad);
    ASSERT_EQ(c.height(), 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            if (i < 2 || j < 2) EXPECT_EQ(c(0, i, j), -1.0);
            else EXPECT_EQ(c(0, i, j), t(0, i - 2, j - 2));
        }
    }
}

TEST(CenterMap, RejectsPositionOffMapAndBadPad) {
    Tensor3<double> t(1, 3, 3);
    const std::vector<double> pad{0.0};
    EXPECT_THROW(center_map<double>(t, {3, 0}, pad), std::out_of_range);
    const std::vector<double> pad2{0.0, 0.0};
    EXPECT_THROW(center_map<double>(t, {0, 0}, pad2), std::invalid_argument);
}

TEST(CenterMap, MatchesOracleAndCentresUav) {
    std::mt19937_64 rng(1);
    for (int n = 0; n < 300; ++n) {
        const int m = 1 + static_cast<int>(rng() % 12);
        const auto t = random_tensor(rng, 3, m);
        const Cell p{static_cast<int>(rng() % m), static_cast<int>(rng() % m)};
        const std::vector<double> pad{0.5, 1.0, -3.0};
        const auto c = center_map<double>(t, p, pad);
        ASSERT_EQ(c, oracle::center(t, p, pad));
        for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(c(ch, m - 1, m - 1), t(ch, p.row, p.col));
    }
}

TEST(CenterMap, TranslationConsistency) {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 200; ++n) {
        const int m = 2 + static_cast<int>(rng() % 10);
        const auto t = random_tensor(rng, 1, m);
        const Cell p{static_cast<int>(rng() % m), static_cast<int>(rng() % m)};
        const Cell q{static_cast<int>(rng() % m), static_cast<int>(rng() % m)};
        const std::vector<double> pad{7.0};
        const auto a = center_map<double>(t, p, pad);
        const auto b = center_map<double>(t, q, pad);
        const int dr = q.row - p.row, dc = q.col - p.col;
        const int mc = centered_size(m);
        for (int i = 0; i < mc; ++i)
            for (int j = 0; j < mc; ++j)
                if (i + dr >= 0 && i + dr < mc && j + dc >= 0 && j + dc < mc) ASSERT_EQ(b(0, i, j), a(0, i + dr, j + dc));
    }
}

TEST(LocalMap, IdentityAndSingleCell) {
    std::mt19937_64 rng(3);
    const auto t = random_tensor(rng, 2, 6);
    const std::vector<double> pad{0.0, 1.0};
    const auto c = center_map<double>(t, {2, 4}, pad);
    EXPECT_EQ(local_map(c, 11), c);
    const auto one = local_map(c, 1);
    EXPECT_EQ(one(0, 0, 0), t(0, 2, 4));
    EXPECT_EQ(one(1, 0, 0), t(1, 2, 4));
    EXPECT_THROW(local_map(c, 13), std::invalid_argument);
}

TEST(LocalMap, MatchesOracle) {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 300; ++n) {
        const int m = 1 + static_cast<int>(rng() % 33);
        const int mc = centered_size(m);
        const auto c = random_tensor(rng, 2, mc);
        const int l = 1 + 2 * static_cast<int>(rng() % ((mc + 1) / 2));
        ASSERT_EQ(local_map(c, l), oracle::crop(c, l));
    }
}

TEST(GlobalMap, IdentityConstantAndShape) {
    std::mt19937_64 rng(5);
    const auto c = random_tensor(rng, 1, 9);
    EXPECT_EQ(global_map(c, 1), c);
    Tensor3<double> ones(1, 4, 4, 1.0);
    EXPECT_EQ(global_map(ones, 2), Tensor3<double>(1, 2, 2, 1.0));
    EXPECT_EQ(global_map(Tensor3<double>(3, 63, 63), 3).height(), 21);
}

TEST(GlobalMap, MatchesOracleAndPreservesMass) {
    std::mt19937_64 rng(6);
    for (int n = 0; n < 300; ++n) {
        const int mc = 1 + static_cast<int>(rng() % 40);
        const int g = 1 + static_cast<int>(rng() % mc);
        // Integer-valued inputs keep every sum exact.
        Tensor3<double> c(2, mc, mc);
        for (double& v : c.values()) v = static_cast<double>(static_cast<int>(rng() % 7) - 3);
        const auto out = global_map(c, g);
        ASSERT_EQ(out.height(), mc / g);
        const auto want = oracle::pool(c, g);
        for (std::size_t k = 0; k < out.size(); ++k) ASSERT_NEAR(out.values()[k], want.values()[k], 1e-12);

        const int n_out = mc / g;
        for (int ch = 0; ch < 2; ++ch) {
            double region = 0.0, pooled = 0.0;
            for (int i = 0; i < n_out * g; ++i)
                for (int j = 0; j < n_out * g; ++j) region += c(ch, i, j);
            for (double v : out.channel(ch)) pooled += v * g * g;
            EXPECT_NEAR(pooled, region, 1e-9);
        }
    }
}

TEST(GlobalMap, BooleanLayersStayInUnitInterval) {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 50; ++n) {
        const auto env = oracle::random_map(rng, 10);
        const auto c = center_map<float>(env.layers(), env.landing_cells().front(), kEnvPad);
        for (int g : {2, 3, 4, 5}) {
            const auto pooled = global_map(c, g);
            for (float v : pooled.values()) {
                EXPECT_GE(v, 0.0f);
                EXPECT_LE(v, 1.0f);
            }
        }
    }
}

TEST(ObservationSpec, Validation) {
    EXPECT_NO_THROW((ObservationSpec{0, 1}.validate(32)));
    EXPECT_NO_THROW((ObservationSpec{63, 63}.validate(32)));
    EXPECT_THROW((ObservationSpec{16, 3}.validate(32)), std::invalid_argument);
    EXPECT_THROW((ObservationSpec{65, 3}.validate(32)), std::invalid_argument);
    EXPECT_THROW((ObservationSpec{17, 0}.validate(32)), std::invalid_argument);
    EXPECT_THROW((ObservationSpec{17, 64}.validate(32)), std::invalid_argument);
    EXPECT_THROW((ObservationSpec{-1, 2}.validate(32)), std::invalid_argument);
}

TEST(AssembleObservation, ComposesCenterCropAndPool) {
    std::mt19937_64 rng(8);
    auto env = std::make_shared<const EnvironmentMap>(oracle::random_map(rng, 14));
    ScenarioConfig cfg;
    cfg.cpp_coverage_fraction = {0.05, 0.9};
    for (int n = 0; n < 40; ++n) {
        EpisodeState s = new_episode(env, cfg, rng);
        s.position = env->landing_cells()[rng() % env->landing_cells().size()];
        const ObservationSpec spec{5 + 2 * static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5)};
        const Observation obs = assemble_observation(s, spec);

        const std::vector<float> env_pad{0.0f, 1.0f, 1.0f};
        Tensor3<float> tgt(1, 14, 14);
        for (int k = 0; k < 196; ++k) tgt.values()[k] = static_cast<float>(s.target.values[k]);
        const auto env_c = oracle::center(env->layers(), s.position, env_pad);
        const auto tgt_c = oracle::center(tgt, s.position, std::vector<float>{0.0f});
        EXPECT_EQ(obs.local_env, oracle::crop(env_c, spec.local_size));
        EXPECT_EQ(obs.local_target, oracle::crop(tgt_c, spec.local_size));
        const auto ge = oracle::pool(env_c, spec.global_scaling);
        const auto gt = oracle::pool(tgt_c, spec.global_scaling);
        for (std::size_t k = 0; k < ge.size(); ++k) ASSERT_NEAR(obs.global_env.values()[k], ge.values()[k], 1e-6);
        for (std::size_t k = 0; k < gt.size(); ++k) ASSERT_NEAR(obs.global_target.values()[k], gt.values()[k], 1e-6);
        EXPECT_EQ(obs.flying_time, s.battery);
    }
}

TEST(AssembleObservation, DisabledSpecUsesFullCenteredMap) {
    auto env = std::make_shared<const EnvironmentMap>(builtin_map("manhattan32"));
    std::mt19937_64 rng(9);
    const EpisodeState s = new_episode(env, ScenarioConfig{}, rng);
    const Observation obs = assemble_observation(s, ObservationSpec{0, 1});
    EXPECT_EQ(obs.local_env.size(), 0u);
    EXPECT_EQ(obs.local_target.size(), 0u);
    EXPECT_EQ(obs.global_env, center_map<float>(env->layers(), s.position, kEnvPad));
}

TEST(AssembleObservation, EmptyDataTargetGivesZeroLayers) {
    auto env = std::make_shared<const EnvironmentMap>(builtin_map("open8"));
    TargetMap t{Mission::DH, 8, std::vector<double>(64, 0.0)};
    std::vector<IoTDevice> devices{{{5, 5}, 0.0, 3.0, 0}};
    const auto s = make_episode(env, t, devices, {0, 0}, 10);
    const auto obs = assemble_observation(s, ObservationSpec{5, 2});
    for (float v : obs.local_target.values()) EXPECT_EQ(v, 0.0f);
    for (float v : obs.global_target.values()) EXPECT_EQ(v, 0.0f);
}

TEST(FlattenSize, MatchesReferenceTable) {
    for (const auto& [lg, want] : oracle::flatten_table_m32())
        EXPECT_EQ(flatten_size({lg.first, lg.second}, 32, 16, 2, 5), want) << "l=" << lg.first << " g=" << lg.second;
    EXPECT_EQ(flatten_size({0, 1}, 32, 16, 2, 5), oracle::kFlattenDisabledM32);
    EXPECT_EQ(flatten_size({17, 5}, 50, 16, 2, 5), 3233);
}

TEST(FlattenSize, MatchesNetworkTensorLength) {
    for (const auto& [lg, want] : oracle::flatten_table_m32()) {
        const QNetwork net(NetworkConfig{}, {lg.first, lg.second}, 32);
        EXPECT_EQ(net.flattened_size(), want);
    }
    EXPECT_EQ(QNetwork(NetworkConfig{}, {0, 1}, 32).flattened_size(), oracle::kFlattenDisabledM32);
}

TEST(FlattenSize, VanishingBranchIsAnError) {
    EXPECT_THROW(flatten_size({7, 3}, 32, 16, 2, 5), std::invalid_argument);
    EXPECT_THROW(flatten_size({17, 8}, 32, 16, 2, 5), std::invalid_argument);
}

}  // namespace
