#pragma once

#include "keyclip/signal.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace keyclip {

struct BudgetConfig {
    std::size_t k = 32;
    double fast_ratio = 0.25;
    double alpha0 = 0.5;
    int max_adaptations = 8;
    SmoothingParams smoothing{};
};

void validate_budget(const BudgetConfig& cfg);

enum class Fallback {
    none,
    all_frames,   // T <= K: the whole video is the plan
    uniform_fill, // adaptation cap reached, or no clips at any alpha
};

std::string_view to_string(Fallback f) noexcept;
Fallback fallback_from_string(std::string_view s);

/// One clipping attempt of the adaptive loop.
struct AlphaStep {
    double alpha = 0.0;
    std::size_t clip_frames = 0;
    std::size_t nonclip_frames = 0;

    friend bool operator==(const AlphaStep&, const AlphaStep&) = default;
};

struct SamplingPlan {
    std::vector<FrameIndex> selected;
    std::vector<FrameIndex> slow_indices;
    std::vector<FrameIndex> fast_indices;
    std::vector<ClipInterval> clips;
    double alpha_final = 0.0;
    std::vector<AlphaStep> alpha_history;
    Fallback fallback_used = Fallback::none;

    friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

struct BudgetSplit {
    std::size_t k_slow = 0;
    std::size_t k_fast = 0;

    friend bool operator==(const BudgetSplit&, const BudgetSplit&) = default;
};

/// k_fast = floor(k * fast_ratio), the rest goes to the slow path.
BudgetSplit split_budget(std::size_t k, double fast_ratio);

/// Positions floor((i + 0.5) * m / k) for i in [0, k). Requires 1 <= k <= m.
std::vector<std::size_t> uniform_positions(std::size_t m, std::size_t k);

/// Evenly spaced draw of `k` entries from a sorted pool. k == 0 yields an
/// empty result; k > pool.size() throws InsufficientPool.
std::vector<FrameIndex> sample_region(std::span<const FrameIndex> pool, std::size_t k);

/// Clip-level slow-fast sampling with adaptive alpha.
///
/// The signal is smoothed once. Each round clips it at the current alpha:
/// too few clip frames for the slow budget halves alpha, too few frames
/// outside the clips for the fast budget doubles it. After
/// `max_adaptations` changes the last clipping is used as far as it goes and
/// the rest of the budget is filled uniformly from the other region.
SamplingPlan slow_fast_sample(const SimilaritySignal& signal, const BudgetConfig& cfg);

/// Highest min(k, T) scores, ties to the lower index, returned in index order.
std::vector<FrameIndex> topk_sample(const SimilaritySignal& signal, std::size_t k);

/// uniform_positions(t, min(k, t)).
std::vector<FrameIndex> uniform_sample(std::size_t t, std::size_t k);

} // namespace keyclip
