#pragma once

#include "keyclip/frames.hpp"

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace keyclip {

inline constexpr std::size_t kMaxQueries = 4;
inline constexpr int kPromptImageSide = 224;

struct Question {
    std::string text;
    std::vector<std::string> options;
};

enum class QuerySource { generated, fallback_question, precomputed };

std::string_view to_string(QuerySource s) noexcept;
QuerySource query_source_from_string(std::string_view s);

struct QuerySet {
    std::vector<std::string> queries;
    std::size_t n_q_max = kMaxQueries;
    QuerySource source = QuerySource::generated;
    std::string raw_response;

    friend bool operator==(const QuerySet&, const QuerySet&) = default;
};

struct ChatEndpointConfig {
    std::string base_url;
    std::string model_name;
    std::string api_key_env = "OPENAI_API_KEY"; // empty: send no credential
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
};

/// Indices of the low-resolution frames shown to the model alongside the
/// question: max(1, k / 4) evenly spaced frames, clamped to t.
std::vector<std::size_t> select_prompt_frames(std::size_t t, std::size_t k);

/// Deterministic instruction asking for a JSON array of at most `n_q` short
/// visual descriptions (objects, scenes, actions). Options are embedded
/// verbatim, one per line.
std::string build_query_prompt(const Question& question, std::size_t n_q = kMaxQueries);

/// Total parser for model replies. Tries, in order: the first JSON array of
/// strings in the text; numbered or bulleted lines; the question itself.
/// Reasoning blocks (<think>...</think>) are removed first. Blank entries are
/// dropped and the result is truncated to n_q.
QuerySet parse_queries(std::string_view response_text, std::size_t n_q, const Question& fallback);

/// Single-query set holding the question text.
QuerySet fallback_query_set(const Question& question, std::size_t n_q, std::string raw_response = {});

/// Chat-completion transport. Implementations throw TransportError on any
/// failure so callers can retry.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& prompt, const std::vector<PromptImage>& images) = 0;
};

/// JSON body for an OpenAI-style /chat/completions request: one user
/// message whose content is the text part followed by base64 data-URL images.
std::string build_chat_request_body(const std::string& model, const std::string& prompt,
                                    const std::vector<PromptImage>& images);

/// Text of choices[0].message.content (string, or concatenated text parts).
std::string parse_chat_response(const std::string& body);

/// POSTs to `<base_url>/chat/completions`. The bearer credential is read
/// from the environment at construction; a configured but unset variable
/// throws ConfigError before any request is made.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(ChatEndpointConfig config);
    std::string complete(const std::string& prompt, const std::vector<PromptImage>& images) override;

private:
    ChatEndpointConfig config_;
    std::string credential_;
};

/// Canned replies for tests and offline runs. With `fail` set every call
/// throws TransportError.
class MockChatClient final : public ChatClient {
public:
    explicit MockChatClient(std::string reply, bool fail = false) : reply_(std::move(reply)), fail_(fail) {}
    static MockChatClient failing() { return MockChatClient({}, true); }

    std::string complete(const std::string& prompt, const std::vector<PromptImage>& images) override;

    std::size_t calls() const noexcept { return calls_; }
    const std::string& last_prompt() const noexcept { return last_prompt_; }
    std::size_t last_image_count() const noexcept { return last_image_count_; }

private:
    std::string reply_;
    bool fail_ = false;
    std::size_t calls_ = 0;
    std::string last_prompt_;
    std::size_t last_image_count_ = 0;
};

/// One request carrying the prompt and images; up to `max_retries` retries on
/// transport failure, after which the question becomes the only query.
QuerySet generate_queries(const Question& question, const std::vector<PromptImage>& prompt_images,
                          ChatClient& client, int max_retries = 2, std::size_t n_q = kMaxQueries);

QuerySet generate_queries(const Question& question, const std::vector<PromptImage>& prompt_images,
                          const ChatEndpointConfig& endpoint, std::size_t n_q = kMaxQueries);

} // namespace keyclip
