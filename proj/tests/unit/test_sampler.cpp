#include "test_support.hpp"

#include <keyclip/error.hpp>
#include <keyclip/sampler.hpp>

#include <gtest/gtest.h>

#include <numeric>

using namespace keyclip;

namespace {

using Indices = std::vector<FrameIndex>;

SimilaritySignal constant(std::size_t t, double v = 0.4) { return {std::vector<double>(t, v), 1.0}; }

void expect_partition(const SamplingPlan& plan, std::size_t t, std::size_t k) {
    EXPECT_EQ(plan.selected.size(), std::min(k, t));
    EXPECT_TRUE(std::is_sorted(plan.selected.begin(), plan.selected.end()));
    EXPECT_EQ(std::adjacent_find(plan.selected.begin(), plan.selected.end()), plan.selected.end());
    Indices both;
    std::set_union(plan.slow_indices.begin(), plan.slow_indices.end(), plan.fast_indices.begin(),
                   plan.fast_indices.end(), std::back_inserter(both));
    EXPECT_EQ(both, plan.selected);
    Indices overlap;
    std::set_intersection(plan.slow_indices.begin(), plan.slow_indices.end(), plan.fast_indices.begin(),
                          plan.fast_indices.end(), std::back_inserter(overlap));
    EXPECT_TRUE(overlap.empty());
    for (auto i : plan.selected) EXPECT_LT(i, t);
}

} // namespace

TEST(SplitBudget, Examples) {
    EXPECT_EQ(split_budget(32, 0.25), (BudgetSplit{24, 8}));
    EXPECT_EQ(split_budget(10, 0.25), (BudgetSplit{8, 2}));
    EXPECT_EQ(split_budget(16, 0.0), (BudgetSplit{16, 0}));
    EXPECT_EQ(split_budget(16, 1.0), (BudgetSplit{0, 16}));
    EXPECT_EQ(split_budget(100, 0.29), (BudgetSplit{71, 29}));
    EXPECT_THROW(split_budget(0, 0.25), InvalidParameter);
    EXPECT_THROW(split_budget(4, 1.5), InvalidParameter);
    EXPECT_THROW(split_budget(4, -0.1), InvalidParameter);
}

TEST(UniformPositions, Examples) {
    EXPECT_EQ(uniform_positions(10, 2), (std::vector<std::size_t>{2, 7}));
    EXPECT_EQ(uniform_positions(100, 4), (std::vector<std::size_t>{12, 37, 62, 87}));
    EXPECT_EQ(uniform_positions(5, 5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_EQ(uniform_positions(7, 1), (std::vector<std::size_t>{3}));
    EXPECT_THROW(uniform_positions(3, 4), InvalidInput);
    EXPECT_THROW(uniform_positions(3, 0), InvalidInput);
}

TEST(UniformPositions, StrictlyIncreasingAndInRange) {
    for (std::size_t m = 1; m <= 60; ++m) {
        for (std::size_t k = 1; k <= m; ++k) {
            const auto p = uniform_positions(m, k);
            ASSERT_EQ(p.size(), k);
            ASSERT_LT(p.back(), m);
            for (std::size_t i = 1; i < k; ++i) ASSERT_LT(p[i - 1], p[i]);
        }
    }
}

TEST(SampleRegion, Examples) {
    const Indices pool{3, 4, 5, 6, 7, 8};
    EXPECT_EQ(sample_region(pool, 3), (Indices{4, 6, 8}));
    EXPECT_EQ(sample_region(pool, 2), (Indices{4, 7}));
    EXPECT_EQ(sample_region(pool, 6), pool);
    EXPECT_TRUE(sample_region(pool, 0).empty());
    EXPECT_TRUE(sample_region(Indices{}, 0).empty());
    EXPECT_THROW(sample_region(pool, 7), InsufficientPool);
}

TEST(TopkSample, Examples) {
    EXPECT_EQ(topk_sample({{0.1, 0.9, 0.5, 0.8}, 1.0}, 2), (Indices{1, 3}));
    EXPECT_EQ(topk_sample({{0.5, 0.5, 0.5}, 1.0}, 2), (Indices{0, 1}));
    EXPECT_EQ(topk_sample({{0.3, 0.1}, 1.0}, 5), (Indices{0, 1}));
    EXPECT_THROW(topk_sample({{0.3}, 1.0}, 0), InvalidParameter);
}

TEST(UniformSample, Examples) {
    EXPECT_EQ(uniform_sample(100, 4), (Indices{12, 37, 62, 87}));
    EXPECT_EQ(uniform_sample(3, 8), (Indices{0, 1, 2}));
    EXPECT_THROW(uniform_sample(0, 4), InvalidInput);
}

TEST(SlowFastSample, MatchesReferenceGoldenPlans) {
    const auto doc = keyclip::testing::read_json(keyclip::testing::data_dir() / "golden_slow_fast.json");
    int checked = 0;
    for (const auto& set : doc["sets"]) {
        const SimilaritySignal s{set["signal"].get<std::vector<double>>(), 1.0};
        for (const auto& g : set["plans"]) {
            SCOPED_TRACE(set["name"].get<std::string>() + " k=" + g["k"].dump() + " r=" + g["fast_ratio"].dump() +
                         " a=" + g["alpha0"].dump());
            BudgetConfig cfg;
            cfg.k = g["k"].get<std::size_t>();
            cfg.fast_ratio = g["fast_ratio"].get<double>();
            cfg.alpha0 = g["alpha0"].get<double>();
            const auto plan = slow_fast_sample(s, cfg);
            EXPECT_EQ(plan.selected, g["selected"].get<Indices>());
            EXPECT_EQ(plan.slow_indices, g["slow"].get<Indices>());
            EXPECT_EQ(plan.fast_indices, g["fast"].get<Indices>());
            std::vector<std::vector<FrameIndex>> clips;
            for (const auto& c : plan.clips) clips.push_back({c.start, c.end});
            EXPECT_EQ(clips, (g["clips"].get<std::vector<std::vector<FrameIndex>>>()));
            EXPECT_EQ(plan.alpha_final, g["alpha_final"].get<double>());
            std::vector<AlphaStep> history;
            for (const auto& h : g["alpha_history"])
                history.push_back({h[0].get<double>(), h[1].get<std::size_t>(), h[2].get<std::size_t>()});
            EXPECT_EQ(plan.alpha_history, history);
            EXPECT_EQ(std::string(to_string(plan.fallback_used)), g["fallback"].get<std::string>());
            ++checked;
        }
    }
    EXPECT_EQ(checked, 14);
}

TEST(SlowFastSample, ConstantSignalFallsBackToUniform) {
    const auto plan = slow_fast_sample(constant(100), {.k = 16});
    EXPECT_EQ(plan.selected, uniform_sample(100, 16));
    EXPECT_EQ(plan.fallback_used, Fallback::uniform_fill);
    EXPECT_TRUE(plan.clips.empty());
    EXPECT_LE(plan.alpha_history.size(), 9u);
}

TEST(SlowFastSample, ShortVideoTakesEveryFrame) {
    const auto plan = slow_fast_sample(constant(10), {.k = 16});
    Indices all(10);
    std::iota(all.begin(), all.end(), FrameIndex{0});
    EXPECT_EQ(plan.selected, all);
    EXPECT_EQ(plan.fallback_used, Fallback::all_frames);
    EXPECT_TRUE(plan.alpha_history.empty());
}

TEST(SlowFastSample, RejectsBadConfig) {
    const auto s = constant(50);
    EXPECT_THROW(slow_fast_sample(s, {.k = 0}), InvalidParameter);
    EXPECT_THROW(slow_fast_sample(s, {.k = 8, .fast_ratio = 1.5}), InvalidParameter);
    EXPECT_THROW(slow_fast_sample(s, {.k = 8, .alpha0 = 0.0}), InvalidParameter);
    EXPECT_THROW(slow_fast_sample({{}, 1.0}, {.k = 8}), InvalidInput);
}

TEST(SlowFastSample, BudgetAndPartitionHoldOnRandomInputs) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t t = 1 + rng() % 500;
        const std::size_t k = 1 + rng() % 64;
        const double ratio = std::array{0.0, 1.0 / 32, 0.125, 0.25, 0.5, 1.0}[rng() % 6];
        const auto s = trial % 2 ? keyclip::testing::random_bumpy_signal(rng, t)
                                 : keyclip::testing::random_signal(rng, t);
        const auto plan = slow_fast_sample(s, {.k = k, .fast_ratio = ratio});
        SCOPED_TRACE("t=" + std::to_string(t) + " k=" + std::to_string(k));
        expect_partition(plan, t, k);
        EXPECT_LE(plan.alpha_history.size(), 9u);
        if (plan.fallback_used == Fallback::none) {
            const auto split = split_budget(k, ratio);
            EXPECT_EQ(plan.slow_indices.size(), split.k_slow);
            EXPECT_EQ(plan.fast_indices.size(), split.k_fast);
        }
        for (auto i : plan.slow_indices) {
            const bool inside = std::any_of(plan.clips.begin(), plan.clips.end(),
                                            [&](const ClipInterval& c) { return c.contains(i); });
            if (plan.fallback_used != Fallback::all_frames) {
                EXPECT_TRUE(inside);
            }
        }
        for (auto i : plan.fast_indices) {
            for (const auto& c : plan.clips) EXPECT_FALSE(c.contains(i));
        }
    }
}

TEST(SlowFastSample, DeterministicAndAffineInvariant) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = keyclip::testing::random_bumpy_signal(rng, 100 + rng() % 400);
        SimilaritySignal moved = s;
        for (auto& v : moved.values) v = 2.5 * v + 0.75;
        const BudgetConfig cfg{.k = 24};
        const auto a = slow_fast_sample(s, cfg);
        EXPECT_EQ(a, slow_fast_sample(s, cfg));
        const auto b = slow_fast_sample(moved, cfg);
        EXPECT_EQ(a.selected, b.selected);
        EXPECT_EQ(a.fallback_used, b.fallback_used);
    }
}
