#include "keyclip/queries.hpp"

#include "http_util.hpp"
#include "keyclip/error.hpp"
#include "keyclip/sampler.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace keyclip {

using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

// Trim and collapse internal whitespace runs to one space.
std::string normalize_query(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
        } else {
            if (space) out.push_back(' ');
            out.push_back(c);
            space = false;
        }
    }
    return out;
}

std::string strip_reasoning(std::string_view text) {
    std::string out(text);
    for (;;) {
        const auto open = out.find("<think>");
        if (open == std::string::npos) break;
        const auto close = out.find("</think>", open);
        if (close == std::string::npos) break;
        out.erase(open, close + 8 - open);
    }
    return out;
}

// End of the bracketed span starting at `open`, skipping brackets inside
// string literals. npos when unbalanced.
std::size_t matching_bracket(const std::string& s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '[') ++depth;
        else if (c == ']' && --depth == 0) return i;
    }
    return std::string::npos;
}

std::vector<std::string> from_json_array(const std::string& text) {
    for (std::size_t open = text.find('['); open != std::string::npos; open = text.find('[', open + 1)) {
        const std::size_t close = matching_bracket(text, open);
        if (close == std::string::npos) continue;
        const json doc = json::parse(text.begin() + static_cast<std::ptrdiff_t>(open),
                                     text.begin() + static_cast<std::ptrdiff_t>(close) + 1, nullptr, false);
        if (doc.is_discarded() || !doc.is_array() || doc.empty()) continue;
        if (!std::all_of(doc.begin(), doc.end(), [](const json& v) { return v.is_string(); })) continue;
        std::vector<std::string> out;
        for (const auto& v : doc) {
            std::string q = normalize_query(v.get<std::string>());
            if (!q.empty()) out.push_back(std::move(q));
        }
        if (!out.empty()) return out;
    }
    return {};
}

std::vector<std::string> from_list_lines(const std::string& text) {
    static const std::regex kItem(R"(^\s*(?:\d+[.)]|[-*])\s+(.*)$)");
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        // Unicode bullet (U+2022) reads as a dash.
        for (auto pos = line.find("\xE2\x80\xA2"); pos != std::string::npos; pos = line.find("\xE2\x80\xA2"))
            line.replace(pos, 3, "-");
        std::smatch m;
        if (!std::regex_match(line, m, kItem)) continue;
        std::string item = trim(m[1].str());
        while (item.size() >= 2 && item.starts_with("**") && item.ends_with("**")) item = item.substr(2, item.size() - 4);
        if (item.size() >= 2 && item.front() == '"' && item.back() == '"') item = item.substr(1, item.size() - 2);
        item = normalize_query(item);
        if (!item.empty()) out.push_back(std::move(item));
    }
    return out;
}

} // namespace

std::string_view to_string(QuerySource s) noexcept {
    switch (s) {
    case QuerySource::generated: return "generated";
    case QuerySource::fallback_question: return "fallback_question";
    case QuerySource::precomputed: return "precomputed";
    }
    return "generated";
}

QuerySource query_source_from_string(std::string_view s) {
    if (s == "generated") return QuerySource::generated;
    if (s == "fallback_question") return QuerySource::fallback_question;
    if (s == "precomputed") return QuerySource::precomputed;
    throw FormatError("unknown query source '" + std::string(s) + "'");
}

std::vector<std::size_t> select_prompt_frames(std::size_t t, std::size_t k) {
    return uniform_sample(t, std::max<std::size_t>(1, k / 4));
}

std::string build_query_prompt(const Question& question, std::size_t n_q) {
    std::ostringstream p;
    p << "You are given a few frames sampled from a long video and a question about it.\n"
      << "Question: " << question.text << '\n';
    if (!question.options.empty()) {
        p << "Options:\n";
        for (const auto& opt : question.options) p << opt << '\n';
    }
    p << "Write at most " << n_q
      << " short visual descriptions of what video frames that help answer the question would show. "
         "Each description should take a different perspective: the objects, the scene, or the actions "
         "involved. Describe what is visible; do not ask questions or answer the question.\n"
         "Reply with only a JSON array of strings, for example: "
         "[\"a person lifting a heavy log\", \"two teams on a sandy beach\"]";
    return p.str();
}

QuerySet fallback_query_set(const Question& question, std::size_t n_q, std::string raw_response) {
    std::string text = normalize_query(question.text);
    if (text.empty()) throw InvalidInput("question text is empty");
    return {{std::move(text)}, std::max<std::size_t>(1, n_q), QuerySource::fallback_question,
            std::move(raw_response)};
}

QuerySet parse_queries(std::string_view response_text, std::size_t n_q, const Question& fallback) {
    n_q = std::max<std::size_t>(1, n_q);
    const std::string text = strip_reasoning(response_text);

    std::vector<std::string> queries = from_json_array(text);
    if (queries.empty()) queries = from_list_lines(text);
    if (queries.empty()) return fallback_query_set(fallback, n_q, std::string(response_text));

    if (queries.size() > n_q) queries.resize(n_q);
    return {std::move(queries), n_q, QuerySource::generated, std::string(response_text)};
}

std::string build_chat_request_body(const std::string& model, const std::string& prompt,
                                    const std::vector<PromptImage>& images) {
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", prompt}});
    for (const auto& img : images) {
        content.push_back({{"type", "image_url"},
                           {"image_url", {{"url", "data:" + img.mime_type + ";base64," + detail::encode_base64(img.bytes)}}}});
    }
    json body = {{"model", model}, {"messages", json::array({json{{"role", "user"}, {"content", content}}})}};
    return body.dump();
}

std::string parse_chat_response(const std::string& body) {
    const json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw TransportError("chat response is not JSON");
    try {
        const json& content = doc.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        if (content.is_array()) {
            std::string text;
            for (const auto& part : content) {
                if (part.value("type", "") == "text") text += part.value("text", "");
            }
            return text;
        }
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected chat response shape: ") + e.what());
    }
    throw TransportError("chat response content is neither text nor parts");
}

HttpChatClient::HttpChatClient(ChatEndpointConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("chat endpoint base_url is empty");
    if (config_.timeout.count() <= 0) throw ConfigError("chat endpoint timeout must be > 0");
    detail::split_url(config_.base_url);
    credential_ = detail::read_credential(config_.api_key_env);
}

std::string HttpChatClient::complete(const std::string& prompt, const std::vector<PromptImage>& images) {
    const std::string url = detail::join_path(config_.base_url, "chat/completions");
    const std::string reply =
        detail::post_json(url, build_chat_request_body(config_.model_name, prompt, images), credential_, config_.timeout);
    return parse_chat_response(reply);
}

std::string MockChatClient::complete(const std::string& prompt, const std::vector<PromptImage>& images) {
    ++calls_;
    last_prompt_ = prompt;
    last_image_count_ = images.size();
    if (fail_) throw TransportError("mock chat endpoint configured to fail");
    return reply_;
}

QuerySet generate_queries(const Question& question, const std::vector<PromptImage>& prompt_images,
                          ChatClient& client, int max_retries, std::size_t n_q) {
    if (normalize_query(question.text).empty()) throw InvalidInput("question text is empty");
    const std::string prompt = build_query_prompt(question, n_q);
    const int attempts = 1 + std::max(0, max_retries);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            return parse_queries(client.complete(prompt, prompt_images), n_q, question);
        } catch (const TransportError& e) {
            spdlog::warn("query generation attempt {}/{} failed: {}", attempt, attempts, e.what());
        }
    }
    spdlog::warn("query generation unavailable; using the question as the only query");
    return fallback_query_set(question, n_q);
}

QuerySet generate_queries(const Question& question, const std::vector<PromptImage>& prompt_images,
                          const ChatEndpointConfig& endpoint, std::size_t n_q) {
    HttpChatClient client(endpoint);
    return generate_queries(question, prompt_images, client, endpoint.max_retries, n_q);
}

} // namespace keyclip
