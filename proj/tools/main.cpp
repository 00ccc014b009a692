#include "commands.hpp"

#include <keyclip/frames.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <sstream>

namespace {

using namespace keyclip;
using namespace keyclip::cli;

void add_selection_flags(CLI::App& app, SelectionOptions& sel) {
    app.add_option("--k", sel.k, "Frame budget K")->capture_default_str();
    app.add_option("--alpha", sel.alpha, "Initial peak threshold multiplier")->capture_default_str();
    app.add_option("--fast-ratio", sel.fast_ratio, "Share of the budget sampled outside clips")->capture_default_str();
    app.add_option("--strategy", sel.strategy, "tcs | topk | uniform")->capture_default_str();
    app.add_option("--radius", sel.smoothing.radius, "Gaussian kernel radius (frames)")->capture_default_str();
    app.add_option("--sigma", sel.smoothing.sigma, "Gaussian kernel width")->capture_default_str();
    app.add_option("--max-adaptations", sel.max_adaptations, "Cap on alpha adjustments")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"keyclip: query-aware keyframe selection for long videos"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    PlanCommand plan;
    auto* plan_cmd = app.add_subcommand("plan", "Select frames from a precomputed score file");
    plan_cmd->add_option("--scores", plan.scores, "Score file (JSON)")->required()->check(CLI::ExistingFile);
    std::string plan_output;
    plan_cmd->add_option("--output", plan_output, "Plan file to write (stdout when omitted)");
    add_selection_flags(*plan_cmd, plan.selection);

    RunCommand run;
    auto* run_cmd = app.add_subcommand("run", "Generate queries, score frames and select a plan");
    std::string frames_dir, manifest, scores, endpoint, mock_mllm, embedding, mock_scores, run_output;
    std::uint64_t mock_seed = 0;
    run_cmd->add_option("--question", run.question, "Question about the video");
    run_cmd->add_option("--options", run.options, "Answer options, in order");
    run_cmd->add_option("--frames-dir", frames_dir, "Directory of frame_NNNNNN.(jpg|png) at --fps")
        ->check(CLI::ExistingDirectory);
    run_cmd->add_option("--manifest", manifest, "Frame manifest JSON")->check(CLI::ExistingFile);
    run_cmd->add_option("--fps", run.fps, "Frame rate of the frame directory")->capture_default_str();
    run_cmd->add_option("--scores", scores, "Precomputed score file; skips queries and scoring")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--endpoint-url", endpoint, "Chat-completions base URL, e.g. http://localhost:8000/v1");
    run_cmd->add_option("--model", run.model, "Model name sent to the chat endpoint")->capture_default_str();
    run_cmd->add_option("--api-key-env", run.api_key_env, "Env var holding the chat credential ('' for none)")
        ->capture_default_str();
    run_cmd->add_option("--mock-mllm", mock_mllm, "File whose contents stand in for the chat reply")
        ->check(CLI::ExistingFile);
    run_cmd->add_flag("--mock-mllm-fail", run.mock_mllm_fail, "Simulate a chat endpoint that always fails");
    run_cmd->add_option("--num-queries", run.n_q, "Maximum number of generated queries")->capture_default_str();
    run_cmd->add_option("--embedding-url", embedding, "Embedding service URL");
    run_cmd->add_option("--embedding-key-env", run.embedding_key_env, "Env var holding the embedding credential");
    run_cmd->add_option("--embedding-batch", run.embedding_batch, "Images per embedding request")
        ->capture_default_str();
    run_cmd->add_option("--mock-scores", mock_scores, "Score fixture returned by the mock scorer")
        ->check(CLI::ExistingFile);
    auto* seed_opt = run_cmd->add_option("--mock-scorer-seed,--seed", mock_seed, "Seed for the synthetic mock scorer");
    run_cmd->add_option("--max-retries", run.max_retries, "Retries per request")->capture_default_str();
    run_cmd->add_option("--timeout-ms", run.timeout_ms, "Per-request timeout")->capture_default_str();
    run_cmd->add_option("--threads", run.threads, "Worker threads")->capture_default_str();
    run_cmd->add_option("--output", run_output, "Plan file to write (stdout when omitted)");
    add_selection_flags(*run_cmd, run.selection);

    BenchCommand bench;
    auto* bench_cmd = app.add_subcommand("bench", "Compare strategies on seeded synthetic signals");
    std::string strategies = "tcs,topk,uniform", bench_output;
    bool no_timing = false;
    bench_cmd->add_option("--seeds", bench.seeds, "Number of scenarios")->capture_default_str();
    bench_cmd->add_option("--seed", bench.first_seed, "First scenario seed")->capture_default_str();
    bench_cmd->add_option("--t", bench.t, "Timeline length (frames)")->capture_default_str();
    bench_cmd->add_option("--k", bench.k, "Frame budget K")->capture_default_str();
    bench_cmd->add_option("--strategies", strategies, "Comma-separated strategies")->capture_default_str();
    bench_cmd->add_option("--sweep", bench.sweep, "none | fast_ratio | alpha | grid | axis=v1,v2[;axis=...]")
        ->capture_default_str();
    bench_cmd->add_option("--alpha", bench.alpha, "Alpha when not swept")->capture_default_str();
    bench_cmd->add_option("--fast-ratio", bench.fast_ratio, "Fast ratio when not swept")->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads, "Worker threads")->capture_default_str();
    bench_cmd->add_flag("--no-timing", no_timing, "Write runtime as 0 for reproducible CSV");
    bench_cmd->add_option("--output", bench_output, "CSV report path");

    std::string manifest_dir, manifest_out;
    double manifest_fps = 1.0;
    auto* manifest_cmd = app.add_subcommand("manifest", "Index a frame directory into a manifest JSON");
    manifest_cmd->add_option("--frames-dir", manifest_dir)->required()->check(CLI::ExistingDirectory);
    manifest_cmd->add_option("--fps", manifest_fps)->capture_default_str();
    manifest_cmd->add_option("--output", manifest_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    spdlog::set_default_logger(spdlog::stderr_logger_mt("keyclip"));
    spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

    auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
    };

    try {
        if (*plan_cmd) {
            plan.output = opt_path(plan_output);
            emit_plan(cmd_plan(plan), plan.output);
        } else if (*run_cmd) {
            run.frames_dir = opt_path(frames_dir);
            run.manifest = opt_path(manifest);
            run.scores = opt_path(scores);
            run.mock_mllm = opt_path(mock_mllm);
            run.mock_scores = opt_path(mock_scores);
            run.output = opt_path(run_output);
            if (!endpoint.empty()) run.endpoint_url = endpoint;
            if (!embedding.empty()) run.embedding_url = embedding;
            if (seed_opt->count() > 0) run.mock_scorer_seed = mock_seed;
            emit_plan(cmd_run(run), run.output);
        } else if (*bench_cmd) {
            bench.strategies.clear();
            std::stringstream in(strategies);
            for (std::string s; std::getline(in, s, ',');) {
                if (!s.empty()) bench.strategies.push_back(s);
            }
            bench.timing = !no_timing;
            bench.output = opt_path(bench_output);
            write_bench_table(cmd_bench(bench), std::cout);
        } else if (*manifest_cmd) {
            save_manifest(build_manifest(manifest_dir, manifest_fps), manifest_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "keyclip: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kOk;
}
