#pragma once

#include "keyclip/queries.hpp"
#include "keyclip/sampler.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

namespace keyclip {

/// Everything a plan file records: the sampling result plus the context it
/// was produced in. `alpha_final` is empty for the non-adaptive baselines.
struct PlanDocument {
    std::string video_id;
    std::size_t k = 0;
    std::size_t num_frames = 0;
    std::string strategy;
    std::optional<double> alpha_final;
    SamplingPlan plan;
    QuerySet queries;

    friend bool operator==(const PlanDocument&, const PlanDocument&) = default;
};

/// Stable pretty-printed JSON with a trailing newline; key order is fixed so
/// identical documents serialise to identical bytes.
std::string dump_plan_json(const PlanDocument& doc);

/// Parses and checks a plan: indices sorted, unique and inside [0, num_frames),
/// selected == slow U fast.
PlanDocument parse_plan_json(const std::string& text, const std::string& origin = "<memory>");

void save_plan(const PlanDocument& doc, const std::filesystem::path& path);
PlanDocument load_plan(const std::filesystem::path& path);

} // namespace keyclip
