#include "keyclip/plan_io.hpp"

#include "keyclip/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace keyclip {

using json = nlohmann::ordered_json;

namespace {

std::vector<FrameIndex> read_indices(const json& doc, const char* key, std::size_t num_frames) {
    std::vector<FrameIndex> out = doc.at(key).get<std::vector<FrameIndex>>();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] >= num_frames) {
            throw FormatError(std::string(key) + "[" + std::to_string(i) + "] = " + std::to_string(out[i]) +
                              " is outside [0, " + std::to_string(num_frames) + ")");
        }
        if (i > 0 && out[i] <= out[i - 1]) throw FormatError(std::string(key) + " is not strictly increasing");
    }
    return out;
}

} // namespace

std::string dump_plan_json(const PlanDocument& d) {
    json doc;
    doc["video_id"] = d.video_id;
    doc["k"] = d.k;
    doc["num_frames"] = d.num_frames;
    doc["strategy"] = d.strategy;
    doc["alpha_final"] = d.alpha_final ? json(*d.alpha_final) : json(nullptr);
    json history = json::array();
    for (const auto& step : d.plan.alpha_history) {
        history.push_back(json::array({step.alpha, step.clip_frames, step.nonclip_frames}));
    }
    doc["alpha_history"] = std::move(history);
    json clips = json::array();
    for (const auto& c : d.plan.clips) clips.push_back(json::array({c.start, c.end}));
    doc["clips"] = std::move(clips);
    doc["slow_indices"] = d.plan.slow_indices;
    doc["fast_indices"] = d.plan.fast_indices;
    doc["selected"] = d.plan.selected;
    doc["queries"] = {{"source", std::string(to_string(d.queries.source))},
                      {"n_q_max", d.queries.n_q_max},
                      {"items", d.queries.queries},
                      {"raw_response", d.queries.raw_response}};
    doc["fallback_used"] = std::string(to_string(d.plan.fallback_used));
    return doc.dump(2) + "\n";
}

PlanDocument parse_plan_json(const std::string& text, const std::string& origin) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw FormatError(origin + ": plan is not a JSON object");

    PlanDocument d;
    try {
        d.video_id = doc.at("video_id").get<std::string>();
        d.k = doc.at("k").get<std::size_t>();
        d.num_frames = doc.at("num_frames").get<std::size_t>();
        d.strategy = doc.at("strategy").get<std::string>();
        if (!doc.at("alpha_final").is_null()) {
            d.alpha_final = doc["alpha_final"].get<double>();
            d.plan.alpha_final = *d.alpha_final;
        }
        for (const auto& step : doc.at("alpha_history")) {
            d.plan.alpha_history.push_back(
                {step.at(0).get<double>(), step.at(1).get<std::size_t>(), step.at(2).get<std::size_t>()});
        }
        for (const auto& c : doc.at("clips")) {
            d.plan.clips.push_back({c.at(0).get<FrameIndex>(), c.at(1).get<FrameIndex>(), std::nullopt});
        }
        d.plan.slow_indices = read_indices(doc, "slow_indices", d.num_frames);
        d.plan.fast_indices = read_indices(doc, "fast_indices", d.num_frames);
        d.plan.selected = read_indices(doc, "selected", d.num_frames);
        const json& q = doc.at("queries");
        d.queries.source = query_source_from_string(q.at("source").get<std::string>());
        d.queries.n_q_max = q.at("n_q_max").get<std::size_t>();
        d.queries.queries = q.at("items").get<std::vector<std::string>>();
        d.queries.raw_response = q.at("raw_response").get<std::string>();
        d.plan.fallback_used = fallback_from_string(doc.at("fallback_used").get<std::string>());
    } catch (const json::exception& e) {
        throw FormatError(origin + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(origin + ": " + e.what());
    }

    std::vector<FrameIndex> joined;
    std::merge(d.plan.slow_indices.begin(), d.plan.slow_indices.end(), d.plan.fast_indices.begin(),
               d.plan.fast_indices.end(), std::back_inserter(joined));
    if (joined != d.plan.selected) throw FormatError(origin + ": selected is not the union of slow and fast indices");
    for (const auto& c : d.plan.clips) {
        if (c.start > c.end || c.end >= d.num_frames) throw FormatError(origin + ": clip out of range");
    }
    return d;
}

void save_plan(const PlanDocument& doc, const std::filesystem::path& path) {
    const std::string text = dump_plan_json(doc);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plan " + path.string());
    out << text;
}

PlanDocument load_plan(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open plan " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan_json(buf.str(), path.string());
}

} // namespace keyclip
