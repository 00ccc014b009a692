#include "test_support.hpp"

#include "commands.hpp"

#include <keyclip/error.hpp>
#include <keyclip/scoring.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace keyclip;
using namespace keyclip::cli;
using nlohmann::json;

namespace {

std::filesystem::path data(const char* name) { return keyclip::testing::data_dir() / name; }

RunCommand mock_run() {
    RunCommand cmd;
    cmd.question = "What is poured into the cup?";
    cmd.options = {"A. water", "B. tea", "C. milk"};
    cmd.mock_mllm = data("mock_mllm_reply.txt");
    cmd.mock_scores = data("scores_t600_q4.json");
    cmd.selection.k = 16;
    return cmd;
}

} // namespace

TEST(CmdPlan, UniformPicksCentres) {
    PlanCommand cmd{data("scores_t100.json"), {}, std::nullopt};
    cmd.selection.k = 4;
    cmd.selection.strategy = "uniform";
    const auto doc = cmd_plan(cmd);
    EXPECT_EQ(doc.plan.selected, (std::vector<FrameIndex>{12, 37, 62, 87}));
    EXPECT_EQ(doc.plan.fast_indices, doc.plan.selected);
    EXPECT_FALSE(doc.alpha_final.has_value());
    EXPECT_EQ(doc.video_id, "scores_t100");
    EXPECT_EQ(doc.queries.source, QuerySource::precomputed);
}

TEST(CmdPlan, TcsOnConstantScoresEqualsUniform) {
    PlanCommand cmd{data("constant_t100.json"), {}, std::nullopt};
    cmd.selection.k = 16;
    const auto tcs = cmd_plan(cmd);
    cmd.selection.strategy = "uniform";
    const auto uni = cmd_plan(cmd);
    EXPECT_EQ(tcs.plan.selected, uni.plan.selected);
    EXPECT_EQ(tcs.plan.fallback_used, Fallback::uniform_fill);
}

TEST(CmdPlan, TcsFindsBothEvents) {
    PlanCommand cmd{data("scores_t100.json"), {}, std::nullopt};
    cmd.selection.k = 16;
    const auto doc = cmd_plan(cmd);
    EXPECT_EQ(doc.plan.fallback_used, Fallback::none);
    EXPECT_EQ(doc.plan.slow_indices.size(), 12u);
    EXPECT_EQ(doc.plan.fast_indices.size(), 4u);
    ASSERT_EQ(doc.plan.clips.size(), 2u);
    EXPECT_TRUE(doc.plan.clips[0].contains(25));
    EXPECT_TRUE(doc.plan.clips[1].contains(67));
}

TEST(CmdPlan, InvalidSelectionMapsToUsageExit) {
    PlanCommand cmd{data("scores_t100.json"), {}, std::nullopt};
    cmd.selection.k = 0;
    try {
        cmd_plan(cmd);
        FAIL();
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), kUsage);
    }
    cmd.selection.k = 4;
    cmd.selection.strategy = "random";
    EXPECT_THROW(cmd_plan(cmd), InvalidParameter);
    cmd.selection.strategy = "tcs";
    cmd.selection.fast_ratio = 2.0;
    EXPECT_THROW(cmd_plan(cmd), InvalidParameter);
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(FormatError("x")), kUsage);
    EXPECT_EQ(exit_code_for(ConfigError("x")), kUsage);
    EXPECT_EQ(exit_code_for(ScoringError("x")), kRuntime);
    EXPECT_EQ(exit_code_for(IoError("x")), kRuntime);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), kRuntime);
}

TEST(CmdRun, MockPipelineMatchesFrozenPlan) {
    const auto doc = cmd_run(mock_run());
    EXPECT_EQ(doc.queries.source, QuerySource::generated);
    EXPECT_EQ(doc.queries.queries.size(), 4u);
    EXPECT_EQ(dump_plan_json(doc), keyclip::testing::read_text(data("golden_run_plan.json")));
}

TEST(CmdRun, ByteIdenticalAcrossRunsAndThreads) {
    const auto first = dump_plan_json(cmd_run(mock_run()));
    for (std::size_t threads : {1u, 2u, 4u, 8u}) {
        auto cmd = mock_run();
        cmd.threads = threads;
        EXPECT_EQ(dump_plan_json(cmd_run(cmd)), first) << "threads=" << threads;
    }
}

TEST(CmdRun, SeededMockOverFramesIsDeterministic) {
    keyclip::testing::TempDir tmp;
    keyclip::testing::write_frames(tmp.path / "clip", 80, 320, 240, "jpg");
    auto cmd = mock_run();
    cmd.mock_scores.reset();
    cmd.mock_scorer_seed = 5;
    cmd.frames_dir = tmp.path / "clip";
    const auto a = dump_plan_json(cmd_run(cmd));
    cmd.threads = 4;
    EXPECT_EQ(dump_plan_json(cmd_run(cmd)), a);
    EXPECT_EQ(json::parse(a)["video_id"], "clip");
    EXPECT_EQ(json::parse(a)["num_frames"], 80);
}

TEST(CmdRun, PromptImagesAreDownscaled) {
    keyclip::testing::TempDir tmp;
    keyclip::testing::write_frames(tmp.path / "clip", 40, 640, 360, "png");
    const auto manifest = build_manifest(tmp.path / "clip");
    const auto picks = select_prompt_frames(manifest.size(), 16);
    ASSERT_EQ(picks.size(), 4u);
    for (auto i : picks) {
        const auto img = downscale_for_prompt(manifest.entries[i], kPromptImageSide);
        EXPECT_EQ(img.width, 224);
        EXPECT_EQ(img.height, 126);
    }
}

TEST(CmdRun, PrecomputedScoresSkipQueries) {
    RunCommand cmd;
    cmd.scores = data("scores_t100.json");
    cmd.selection.k = 8;
    const auto doc = cmd_run(cmd);
    EXPECT_EQ(doc.queries.source, QuerySource::precomputed);
    EXPECT_EQ(doc.queries.queries.size(), 2u);
    EXPECT_EQ(doc.num_frames, 100u);
}

TEST(CmdRun, FailingEndpointStillProducesPlan) {
    auto cmd = mock_run();
    cmd.mock_mllm.reset();
    cmd.mock_mllm_fail = true;
    const auto doc = cmd_run(cmd);
    EXPECT_EQ(doc.queries.source, QuerySource::fallback_question);
    EXPECT_EQ(doc.queries.queries, (std::vector<std::string>{cmd.question}));
    EXPECT_EQ(doc.plan.selected.size(), 16u);
}

TEST(CmdRun, MissingCredentialFailsBeforeRequests) {
    ::unsetenv("KEYCLIP_TEST_UNSET_RUN_KEY");
    auto cmd = mock_run();
    cmd.mock_mllm.reset();
    cmd.endpoint_url = "http://127.0.0.1:1/v1";
    cmd.api_key_env = "KEYCLIP_TEST_UNSET_RUN_KEY";
    try {
        cmd_run(cmd);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(exit_code_for(e), kUsage);
    }
}

TEST(CmdRun, NeedsScorerAndQuestion) {
    RunCommand cmd;
    cmd.question = "q";
    EXPECT_THROW(cmd_run(cmd), InvalidParameter);
    cmd.question.clear();
    cmd.mock_scorer_seed = 1;
    EXPECT_THROW(cmd_run(cmd), InvalidParameter);
    cmd.question = "q";
    EXPECT_THROW(cmd_run(cmd), InvalidParameter); // seeded mock needs frames
}
