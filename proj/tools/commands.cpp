#include "commands.hpp"

#include <keyclip/error.hpp>
#include <keyclip/frames.hpp>
#include <keyclip/parallel.hpp>
#include <keyclip/sampler.hpp>
#include <keyclip/scoring.hpp>

#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <memory>

namespace keyclip::cli {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (err == nullptr) return kRuntime;
    switch (err->kind()) {
    case ErrorKind::invalid_input:
    case ErrorKind::invalid_parameter:
    case ErrorKind::insufficient_pool:
    case ErrorKind::format:
    case ErrorKind::configuration:
        return kUsage;
    case ErrorKind::transport:
    case ErrorKind::scoring:
    case ErrorKind::io:
        return kRuntime;
    }
    return kRuntime;
}

PlanDocument make_plan(const SimilaritySignal& signal, const SelectionOptions& opts, std::string video_id,
                       QuerySet queries) {
    if (opts.k < 1) throw InvalidParameter("--k must be >= 1");
    const Strategy strategy = strategy_from_string(opts.strategy);

    PlanDocument doc;
    doc.video_id = std::move(video_id);
    doc.k = opts.k;
    doc.num_frames = signal.size();
    doc.strategy = to_string(strategy);
    doc.queries = std::move(queries);

    switch (strategy) {
    case Strategy::tcs: {
        const BudgetConfig cfg{opts.k, opts.fast_ratio, opts.alpha, opts.max_adaptations, opts.smoothing};
        doc.plan = slow_fast_sample(signal, cfg);
        doc.alpha_final = doc.plan.alpha_final;
        break;
    }
    case Strategy::topk:
        doc.plan.selected = topk_sample(signal, opts.k);
        doc.plan.slow_indices = doc.plan.selected;
        break;
    case Strategy::uniform:
        validate_signal(signal);
        doc.plan.selected = uniform_sample(signal.size(), opts.k);
        doc.plan.fast_indices = doc.plan.selected;
        break;
    }
    return doc;
}

namespace {

QuerySet precomputed_queries(const ScoreMatrix& m) {
    QuerySet q;
    q.queries = m.query_labels;
    q.n_q_max = m.query_labels.size();
    q.source = QuerySource::precomputed;
    return q;
}

std::string video_id_from_scores(const fs::path& p) { return p.stem().string(); }

} // namespace

PlanDocument cmd_plan(const PlanCommand& cmd) {
    const ScoreMatrix matrix = load_score_file(cmd.scores);
    return make_plan(pool_scores(matrix), cmd.selection, video_id_from_scores(cmd.scores), precomputed_queries(matrix));
}

PlanDocument cmd_run(const RunCommand& cmd) {
    if (cmd.selection.k < 1) throw InvalidParameter("--k must be >= 1");
    strategy_from_string(cmd.selection.strategy);

    if (cmd.scores) {
        spdlog::info("precomputed scores supplied; skipping query generation and scoring");
        const ScoreMatrix matrix = load_score_file(*cmd.scores);
        return make_plan(pool_scores(matrix), cmd.selection, video_id_from_scores(*cmd.scores),
                         precomputed_queries(matrix));
    }

    if (cmd.question.empty()) throw InvalidParameter("--question is required unless --scores is given");
    const Question question{cmd.question, cmd.options};
    const auto timeout = std::chrono::milliseconds(cmd.timeout_ms);

    // Build every client first so configuration problems surface before any
    // request goes out.
    std::unique_ptr<ChatClient> chat;
    if (cmd.mock_mllm_fail) {
        chat = std::make_unique<MockChatClient>(MockChatClient::failing());
    } else if (cmd.mock_mllm) {
        chat = std::make_unique<MockChatClient>(read_file_bytes(*cmd.mock_mllm));
    } else if (cmd.endpoint_url) {
        chat = std::make_unique<HttpChatClient>(
            ChatEndpointConfig{*cmd.endpoint_url, cmd.model, cmd.api_key_env, timeout, cmd.max_retries});
    }

    std::optional<ScorerBackend> scorer;
    if (cmd.embedding_url) {
        EmbeddingServiceConfig ecfg{*cmd.embedding_url, cmd.embedding_key_env, cmd.embedding_batch, timeout,
                                    cmd.max_retries, cmd.threads};
        scorer = backend::EmbeddingService{ecfg, std::make_shared<HttpEmbeddingClient>(ecfg)};
    } else if (cmd.mock_scores) {
        scorer = backend::DeterministicMock{0, load_score_file(*cmd.mock_scores)};
    } else if (cmd.mock_scorer_seed) {
        scorer = backend::DeterministicMock{*cmd.mock_scorer_seed, std::nullopt};
    } else {
        throw InvalidParameter("no scorer configured: pass --scores, --embedding-url, --mock-scores or --mock-scorer-seed");
    }

    std::optional<FrameManifest> manifest;
    if (cmd.frames_dir) manifest = build_manifest(*cmd.frames_dir, cmd.fps);
    else if (cmd.manifest) manifest = load_manifest(*cmd.manifest);

    std::size_t num_frames = 0;
    std::string video_id;
    if (manifest) {
        num_frames = manifest->size();
        video_id = manifest->video_id;
    } else if (const auto* mock = std::get_if<backend::DeterministicMock>(&*scorer); mock && mock->fixture) {
        num_frames = mock->fixture->num_frames();
        video_id = cmd.mock_scores->stem().string();
    } else {
        throw InvalidParameter("--frames-dir or --manifest is required for this scorer");
    }

    QuerySet queries;
    if (chat) {
        std::vector<PromptImage> images;
        if (manifest) {
            const auto picks = select_prompt_frames(num_frames, cmd.selection.k);
            images.resize(picks.size());
            parallel_for(picks.size(), cmd.threads, [&](std::size_t i) {
                images[i] = downscale_for_prompt(manifest->entries[picks[i]], kPromptImageSide);
            });
        }
        queries = generate_queries(question, images, *chat, cmd.max_retries, cmd.n_q);
    } else {
        spdlog::info("no chat endpoint configured; scoring with the question text");
        queries = fallback_query_set(question, cmd.n_q);
    }

    const ScoreMatrix matrix = manifest ? score_frames(queries, *manifest, *scorer, cmd.threads)
                                        : score_timeline(queries, num_frames, cmd.fps, *scorer, cmd.threads);
    return make_plan(pool_scores(matrix), cmd.selection, std::move(video_id), std::move(queries));
}

BenchSpec make_bench_spec(const BenchCommand& cmd) {
    if (cmd.seeds < 1) throw InvalidParameter("--seeds must be >= 1");
    if (cmd.strategies.empty()) throw InvalidParameter("--strategies must name at least one strategy");
    BenchSpec spec;
    for (std::size_t i = 0; i < cmd.seeds; ++i) spec.seeds.push_back(cmd.first_seed + i);
    spec.t = cmd.t;
    spec.k = cmd.k;
    for (const auto& s : cmd.strategies) spec.strategies.push_back(strategy_from_string(s));
    spec.sweep = parse_sweep(cmd.sweep, {cmd.fast_ratio, cmd.alpha});
    spec.threads = cmd.threads;
    spec.timing = cmd.timing;
    return spec;
}

BenchReport cmd_bench(const BenchCommand& cmd) {
    const BenchReport report = run_bench(make_bench_spec(cmd));
    if (cmd.output) {
        std::ofstream out(*cmd.output);
        if (!out) throw IoError("cannot write " + cmd.output->string());
        write_bench_csv(report, out);
    }
    return report;
}

void emit_plan(const PlanDocument& doc, const std::optional<fs::path>& output) {
    if (output) save_plan(doc, *output);
    else std::cout << dump_plan_json(doc);
}

} // namespace keyclip::cli
