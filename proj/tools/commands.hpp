#pragma once

#include <keyclip/bench.hpp>
#include <keyclip/plan_io.hpp>
#include <keyclip/queries.hpp>
#include <keyclip/signal.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace keyclip::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3 };

/// 2 for validation problems (bad flags, malformed files, missing
/// credentials), 3 for runtime failures (I/O, scoring service).
int exit_code_for(const std::exception& e);

struct SelectionOptions {
    std::size_t k = 32;
    double alpha = 0.5;
    double fast_ratio = 0.25;
    std::string strategy = "tcs";
    SmoothingParams smoothing{};
    int max_adaptations = 8;
};

/// Runs the chosen strategy on a pooled signal and wraps the result.
PlanDocument make_plan(const SimilaritySignal& signal, const SelectionOptions& opts, std::string video_id,
                       QuerySet queries);

struct PlanCommand {
    std::filesystem::path scores;
    SelectionOptions selection;
    std::optional<std::filesystem::path> output;
};

/// scores file -> pool -> strategy -> plan document.
PlanDocument cmd_plan(const PlanCommand& cmd);

struct RunCommand {
    std::string question;
    std::vector<std::string> options;

    // Frame source: a frame directory, a manifest, or neither (index-only).
    std::optional<std::filesystem::path> frames_dir;
    std::optional<std::filesystem::path> manifest;
    double fps = 1.0;

    // Precomputed scores skip the query and scoring stages.
    std::optional<std::filesystem::path> scores;

    // Query generation.
    std::optional<std::string> endpoint_url;
    std::string model = "default";
    std::string api_key_env = "OPENAI_API_KEY";
    std::optional<std::filesystem::path> mock_mllm; // file holding the canned reply
    bool mock_mllm_fail = false;
    std::size_t n_q = kMaxQueries;

    // Scoring.
    std::optional<std::string> embedding_url;
    std::string embedding_key_env;
    std::size_t embedding_batch = 32;
    std::optional<std::filesystem::path> mock_scores; // fixture matrix
    std::optional<std::uint64_t> mock_scorer_seed;

    int max_retries = 2;
    int timeout_ms = 30000;
    std::size_t threads = 1;

    SelectionOptions selection;
    std::optional<std::filesystem::path> output;
};

/// queries -> scores -> pool -> plan. Query generation failures degrade to
/// the question as the only query; scoring failures throw.
PlanDocument cmd_run(const RunCommand& cmd);

struct BenchCommand {
    std::size_t seeds = 10;
    std::uint64_t first_seed = 0;
    std::size_t t = 600;
    std::size_t k = 16;
    std::vector<std::string> strategies{"tcs", "topk", "uniform"};
    std::string sweep = "none";
    double alpha = 0.5;
    double fast_ratio = 0.25;
    std::size_t threads = 1;
    bool timing = true;
    std::optional<std::filesystem::path> output; // CSV
};

BenchSpec make_bench_spec(const BenchCommand& cmd);
BenchReport cmd_bench(const BenchCommand& cmd);

/// Writes the plan to `output`, or to stdout when unset.
void emit_plan(const PlanDocument& doc, const std::optional<std::filesystem::path>& output);

} // namespace keyclip::cli
