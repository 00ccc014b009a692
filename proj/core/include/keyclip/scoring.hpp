#pragma once

#include "keyclip/frames.hpp"
#include "keyclip/queries.hpp"
#include "keyclip/signal.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace keyclip {

/// Per-query similarity rows over the 1 FPS timeline; rows[q][t] scores
/// query q against frame t.
struct ScoreMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> query_labels;
    double fps = 1.0;

    std::size_t num_queries() const noexcept { return rows.size(); }
    std::size_t num_frames() const noexcept { return rows.empty() ? 0 : rows.front().size(); }

    friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

/// Throws FormatError naming the first offending row/column.
void validate_matrix(const ScoreMatrix& matrix);

/// Per-frame arithmetic mean across query rows. Each column is summed in
/// sorted order, so the result does not depend on row order and N copies of
/// one row pool back to that row exactly.
SimilaritySignal pool_scores(const ScoreMatrix& matrix);

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Score file: {"fps", "num_frames", "queries": [...], "scores": [[...], ...]}.
ScoreMatrix load_score_file(const std::filesystem::path& path);
void save_score_file(const ScoreMatrix& matrix, const std::filesystem::path& path);
ScoreMatrix parse_score_json(const std::string& text, const std::string& origin = "<memory>");
std::string dump_score_json(const ScoreMatrix& matrix);

enum class Modality { text, image };

/// Embedding transport: one vector per input, in input order. Image inputs
/// are base64-encoded file bytes.
class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs, Modality modality) = 0;
};

struct EmbeddingServiceConfig {
    std::string url;
    std::string api_key_env; // empty: send no credential
    std::size_t batch_size = 32;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 2;
    std::size_t max_parallel = 1;
};

/// POST {"inputs": [...], "modality": "text"|"image"} -> {"embeddings": [[...], ...]}.
class HttpEmbeddingClient final : public EmbeddingClient {
public:
    explicit HttpEmbeddingClient(EmbeddingServiceConfig config);
    std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs, Modality modality) override;

private:
    EmbeddingServiceConfig config_;
    std::string credential_;
};

std::string build_embedding_request_body(const std::vector<std::string>& inputs, Modality modality);
std::vector<std::vector<double>> parse_embedding_response(const std::string& body, std::size_t expected);

namespace backend {

struct PrecomputedFile {
    std::filesystem::path path;
};

struct EmbeddingService {
    EmbeddingServiceConfig config;
    // Optional injected transport; when null an HttpEmbeddingClient is built
    // from `config`.
    std::shared_ptr<EmbeddingClient> client;
};

/// Deterministic offline scorer. A fixture matrix is returned as is;
/// otherwise rows are synthesised from the seed and each query string.
struct DeterministicMock {
    std::uint64_t seed = 0;
    std::optional<ScoreMatrix> fixture;
};

} // namespace backend

using ScorerBackend = std::variant<backend::PrecomputedFile, backend::EmbeddingService, backend::DeterministicMock>;

/// Scores every manifest frame against every query. `threads` bounds
/// concurrency (embedding batches, mock rows); row and frame order never
/// depend on it. Service failure after retries throws ScoringError.
ScoreMatrix score_frames(const QuerySet& queries, const FrameManifest& manifest, const ScorerBackend& backend,
                         std::size_t threads = 1);

/// Index-only variant for backends that need no pixels (mock, precomputed):
/// `num_frames` stands in for the manifest.
ScoreMatrix score_timeline(const QuerySet& queries, std::size_t num_frames, double fps,
                           const ScorerBackend& backend, std::size_t threads = 1);

/// Row the deterministic mock produces for one query.
std::vector<double> mock_score_row(std::uint64_t seed, const std::string& query, std::size_t num_frames);

} // namespace keyclip
