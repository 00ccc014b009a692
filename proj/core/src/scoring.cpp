#include "keyclip/scoring.hpp"

#include "http_util.hpp"
#include "keyclip/error.hpp"
#include "keyclip/parallel.hpp"
#include "keyclip/random.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace keyclip {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void validate_matrix(const ScoreMatrix& m) {
    if (!(m.fps > 0.0) || !std::isfinite(m.fps)) throw FormatError("score matrix fps must be > 0");
    if (m.rows.empty()) throw FormatError("score matrix has no query rows");
    if (m.query_labels.size() != m.rows.size()) {
        throw FormatError("score matrix has " + std::to_string(m.rows.size()) + " rows but " +
                          std::to_string(m.query_labels.size()) + " query labels");
    }
    const std::size_t t = m.rows.front().size();
    if (t == 0) throw FormatError("score matrix row 0 is empty");
    for (std::size_t q = 0; q < m.rows.size(); ++q) {
        if (m.rows[q].size() != t) {
            throw FormatError("score row " + std::to_string(q) + " has " + std::to_string(m.rows[q].size()) +
                              " values, expected " + std::to_string(t));
        }
        for (std::size_t i = 0; i < t; ++i) {
            if (!std::isfinite(m.rows[q][i])) {
                throw FormatError("score row " + std::to_string(q) + ", frame " + std::to_string(i) +
                                  " is not finite");
            }
        }
    }
}

SimilaritySignal pool_scores(const ScoreMatrix& matrix) {
    if (matrix.rows.empty() || matrix.rows.front().empty()) throw InvalidInput("cannot pool an empty score matrix");
    validate_matrix(matrix);

    const std::size_t t = matrix.num_frames();
    SimilaritySignal out;
    out.fps = matrix.fps;
    out.values.resize(t);
    std::vector<double> column(matrix.num_queries());
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t q = 0; q < column.size(); ++q) column[q] = matrix.rows[q][i];
        std::sort(column.begin(), column.end());
        // Running mean: stays inside [min, max] and is exact for equal inputs.
        double mean = column.front();
        for (std::size_t q = 1; q < column.size(); ++q) {
            mean += (column[q] - mean) / static_cast<double>(q + 1);
        }
        out.values[i] = mean;
    }
    return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || a.size() != b.size()) {
        throw InvalidInput("cosine similarity needs equal non-zero lengths, got " + std::to_string(a.size()) +
                           " and " + std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw InvalidInput("cosine similarity of a zero-norm vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

ScoreMatrix parse_score_json(const std::string& text, const std::string& origin) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw FormatError(origin + ": not valid JSON");
    if (!doc.is_object()) throw FormatError(origin + ": top level must be an object");
    for (const char* key : {"fps", "num_frames", "queries", "scores"}) {
        if (!doc.contains(key)) throw FormatError(origin + ": missing field '" + key + "'");
    }
    if (!doc["fps"].is_number()) throw FormatError(origin + ": 'fps' must be a number");
    if (!doc["num_frames"].is_number_integer() || doc["num_frames"].get<long long>() < 1) {
        throw FormatError(origin + ": 'num_frames' must be a positive integer");
    }
    if (!doc["queries"].is_array()) throw FormatError(origin + ": 'queries' must be an array");
    if (!doc["scores"].is_array()) throw FormatError(origin + ": 'scores' must be an array");

    ScoreMatrix m;
    m.fps = doc["fps"].get<double>();
    const auto t = doc["num_frames"].get<std::size_t>();
    for (std::size_t q = 0; q < doc["queries"].size(); ++q) {
        const json& label = doc["queries"][q];
        if (!label.is_string()) throw FormatError(origin + ": queries[" + std::to_string(q) + "] is not a string");
        m.query_labels.push_back(label.get<std::string>());
    }
    const json& scores = doc["scores"];
    for (std::size_t q = 0; q < scores.size(); ++q) {
        const json& row = scores[q];
        if (!row.is_array()) throw FormatError(origin + ": scores[" + std::to_string(q) + "] is not an array");
        if (row.size() != t) {
            throw FormatError(origin + ": scores[" + std::to_string(q) + "] has " + std::to_string(row.size()) +
                              " values, expected num_frames=" + std::to_string(t));
        }
        std::vector<double> values;
        values.reserve(t);
        for (std::size_t i = 0; i < t; ++i) {
            if (!row[i].is_number()) {
                throw FormatError(origin + ": scores[" + std::to_string(q) + "][" + std::to_string(i) +
                                  "] is not a finite number");
            }
            values.push_back(row[i].get<double>());
        }
        m.rows.push_back(std::move(values));
    }
    try {
        validate_matrix(m);
    } catch (const FormatError& e) {
        throw FormatError(origin + ": " + e.what());
    }
    return m;
}

std::string dump_score_json(const ScoreMatrix& matrix) {
    validate_matrix(matrix);
    ordered_json doc;
    doc["fps"] = matrix.fps;
    doc["num_frames"] = matrix.num_frames();
    doc["queries"] = matrix.query_labels;
    doc["scores"] = matrix.rows;
    return doc.dump() + "\n";
}

ScoreMatrix load_score_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open score file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_score_json(buf.str(), path.string());
}

void save_score_file(const ScoreMatrix& matrix, const std::filesystem::path& path) {
    const std::string text = dump_score_json(matrix);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write score file " + path.string());
    out << text;
}

std::string build_embedding_request_body(const std::vector<std::string>& inputs, Modality modality) {
    ordered_json body;
    body["inputs"] = inputs;
    body["modality"] = modality == Modality::text ? "text" : "image";
    return body.dump();
}

std::vector<std::vector<double>> parse_embedding_response(const std::string& body, std::size_t expected) {
    const json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("embeddings") || !doc["embeddings"].is_array()) {
        throw TransportError("embedding response lacks an 'embeddings' array");
    }
    const json& rows = doc["embeddings"];
    if (rows.size() != expected) {
        throw TransportError("embedding response has " + std::to_string(rows.size()) + " vectors, expected " +
                             std::to_string(expected));
    }
    std::vector<std::vector<double>> out;
    out.reserve(expected);
    for (const auto& row : rows) {
        if (!row.is_array() || row.empty()) throw TransportError("embedding vector is not a non-empty array");
        std::vector<double> v;
        v.reserve(row.size());
        for (const auto& x : row) {
            if (!x.is_number()) throw TransportError("embedding vector has a non-numeric entry");
            v.push_back(x.get<double>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

HttpEmbeddingClient::HttpEmbeddingClient(EmbeddingServiceConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw ConfigError("embedding service url is empty");
    if (config_.timeout.count() <= 0) throw ConfigError("embedding service timeout must be > 0");
    detail::split_url(config_.url);
    credential_ = detail::read_credential(config_.api_key_env);
}

std::vector<std::vector<double>> HttpEmbeddingClient::embed(const std::vector<std::string>& inputs,
                                                            Modality modality) {
    const std::string reply =
        detail::post_json(config_.url, build_embedding_request_body(inputs, modality), credential_, config_.timeout);
    return parse_embedding_response(reply, inputs.size());
}

std::vector<double> mock_score_row(std::uint64_t seed, const std::string& query, std::size_t num_frames) {
    std::mt19937_64 rng(seed ^ fnv1a(query));
    const double t = static_cast<double>(num_frames);
    struct Bump {
        double center, width, amplitude;
    };
    Bump bumps[3];
    for (auto& b : bumps) {
        b.center = uniform_between(rng, 0.0, t);
        b.width = uniform_between(rng, 2.0, 3.0 + t / 40.0);
        b.amplitude = uniform_between(rng, 0.05, 0.15);
    }
    std::vector<double> row(num_frames);
    for (std::size_t i = 0; i < num_frames; ++i) {
        double v = 0.18;
        for (const auto& b : bumps) {
            const double d = (static_cast<double>(i) - b.center) / b.width;
            v += b.amplitude * std::exp(-0.5 * d * d);
        }
        row[i] = v + 0.01 * (unit_uniform(rng) - 0.5);
    }
    return row;
}

namespace {

std::vector<std::vector<double>> embed_with_retry(EmbeddingClient& client, const std::vector<std::string>& inputs,
                                                  Modality modality, int max_retries) {
    const int attempts = 1 + std::max(0, max_retries);
    for (int attempt = 1;; ++attempt) {
        try {
            auto out = client.embed(inputs, modality);
            if (out.size() != inputs.size()) {
                throw TransportError("embedding client returned " + std::to_string(out.size()) + " vectors for " +
                                     std::to_string(inputs.size()) + " inputs");
            }
            return out;
        } catch (const TransportError& e) {
            if (attempt >= attempts) {
                throw ScoringError("embedding service failed after " + std::to_string(attempts) +
                                   " attempts: " + e.what());
            }
            spdlog::warn("embedding attempt {}/{} failed: {}", attempt, attempts, e.what());
        }
    }
}

ScoreMatrix score_with_service(const QuerySet& queries, const FrameManifest& manifest,
                               const backend::EmbeddingService& svc, std::size_t threads) {
    std::shared_ptr<EmbeddingClient> client = svc.client;
    if (!client) client = std::make_shared<HttpEmbeddingClient>(svc.config);
    const std::size_t batch = std::max<std::size_t>(1, svc.config.batch_size);
    const std::size_t t = manifest.size();

    const auto text_vecs = embed_with_retry(*client, queries.queries, Modality::text, svc.config.max_retries);

    const std::size_t num_batches = (t + batch - 1) / batch;
    std::vector<std::vector<std::vector<double>>> batches(num_batches);
    parallel_for(num_batches, std::max(threads, svc.config.max_parallel), [&](std::size_t b) {
        std::vector<std::string> inputs;
        for (std::size_t i = b * batch; i < std::min(t, (b + 1) * batch); ++i) {
            inputs.push_back(detail::encode_base64(read_file_bytes(manifest.entries[i].path)));
        }
        batches[b] = embed_with_retry(*client, inputs, Modality::image, svc.config.max_retries);
    });

    ScoreMatrix m;
    m.fps = manifest.fps;
    m.query_labels = queries.queries;
    m.rows.assign(queries.queries.size(), std::vector<double>(t));
    try {
        for (std::size_t b = 0; b < num_batches; ++b) {
            for (std::size_t j = 0; j < batches[b].size(); ++j) {
                for (std::size_t q = 0; q < text_vecs.size(); ++q) {
                    m.rows[q][b * batch + j] = cosine_similarity(text_vecs[q], batches[b][j]);
                }
            }
        }
    } catch (const InvalidInput& e) {
        throw ScoringError(std::string("embedding service returned unusable vectors: ") + e.what());
    }
    return m;
}

ScoreMatrix checked_fixture(const ScoreMatrix& fixture, std::size_t num_frames) {
    validate_matrix(fixture);
    if (fixture.num_frames() != num_frames) {
        throw FormatError("score fixture has " + std::to_string(fixture.num_frames()) + " frames, manifest has " +
                          std::to_string(num_frames));
    }
    return fixture;
}

ScoreMatrix score_mock(const QuerySet& queries, std::size_t num_frames, double fps,
                       const backend::DeterministicMock& mock, std::size_t threads) {
    if (mock.fixture) return checked_fixture(*mock.fixture, num_frames);
    ScoreMatrix m;
    m.fps = fps;
    m.query_labels = queries.queries;
    m.rows.resize(queries.queries.size());
    parallel_for(m.rows.size(), threads,
                 [&](std::size_t q) { m.rows[q] = mock_score_row(mock.seed, queries.queries[q], num_frames); });
    return m;
}

void require_queries(const QuerySet& queries) {
    if (queries.queries.empty()) throw InvalidInput("no queries to score");
}

} // namespace

ScoreMatrix score_timeline(const QuerySet& queries, std::size_t num_frames, double fps,
                           const ScorerBackend& backend, std::size_t threads) {
    if (num_frames == 0) throw InvalidInput("cannot score an empty timeline");
    if (const auto* file = std::get_if<backend::PrecomputedFile>(&backend)) {
        return checked_fixture(load_score_file(file->path), num_frames);
    }
    if (const auto* mock = std::get_if<backend::DeterministicMock>(&backend)) {
        if (!mock->fixture) require_queries(queries);
        return score_mock(queries, num_frames, fps, *mock, threads);
    }
    throw InvalidInput("the embedding-service scorer needs frame images; use score_frames with a manifest");
}

ScoreMatrix score_frames(const QuerySet& queries, const FrameManifest& manifest, const ScorerBackend& backend,
                         std::size_t threads) {
    if (manifest.empty()) throw InvalidInput("frame manifest is empty");
    if (const auto* svc = std::get_if<backend::EmbeddingService>(&backend)) {
        require_queries(queries);
        return score_with_service(queries, manifest, *svc, threads);
    }
    return score_timeline(queries, manifest.size(), manifest.fps, backend, threads);
}

} // namespace keyclip
