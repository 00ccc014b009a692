#include "keyclip/sampler.hpp"

#include "keyclip/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace keyclip {

namespace {

// Guards floor(k * ratio) against products like 100 * 0.29 = 28.999999999999996.
constexpr double kSplitEpsilon = 1e-9;

std::vector<FrameIndex> merge_sorted(const std::vector<FrameIndex>& a, const std::vector<FrameIndex>& b) {
    std::vector<FrameIndex> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

void validate_budget(const BudgetConfig& cfg) {
    if (cfg.k < 1) throw InvalidParameter("frame budget k must be >= 1");
    if (!(cfg.fast_ratio >= 0.0 && cfg.fast_ratio <= 1.0)) {
        throw InvalidParameter("fast_ratio must lie in [0, 1], got " + std::to_string(cfg.fast_ratio));
    }
    if (!(cfg.alpha0 > 0.0) || !std::isfinite(cfg.alpha0)) {
        throw InvalidParameter("alpha must be > 0, got " + std::to_string(cfg.alpha0));
    }
    if (cfg.max_adaptations < 0) throw InvalidParameter("max_adaptations must be >= 0");
    validate_smoothing(cfg.smoothing);
}

std::string_view to_string(Fallback f) noexcept {
    switch (f) {
    case Fallback::none: return "none";
    case Fallback::all_frames: return "all_frames";
    case Fallback::uniform_fill: return "uniform_fill";
    }
    return "none";
}

Fallback fallback_from_string(std::string_view s) {
    if (s == "none") return Fallback::none;
    if (s == "all_frames") return Fallback::all_frames;
    if (s == "uniform_fill") return Fallback::uniform_fill;
    throw FormatError("unknown fallback value '" + std::string(s) + "'");
}

BudgetSplit split_budget(std::size_t k, double fast_ratio) {
    if (k < 1) throw InvalidParameter("frame budget k must be >= 1");
    if (!(fast_ratio >= 0.0 && fast_ratio <= 1.0)) {
        throw InvalidParameter("fast_ratio must lie in [0, 1], got " + std::to_string(fast_ratio));
    }
    auto k_fast = static_cast<std::size_t>(std::floor(static_cast<double>(k) * fast_ratio + kSplitEpsilon));
    k_fast = std::min(k_fast, k);
    return {k - k_fast, k_fast};
}

std::vector<std::size_t> uniform_positions(std::size_t m, std::size_t k) {
    if (k < 1 || k > m) {
        throw InvalidInput("uniform_positions needs 1 <= k <= m, got k=" + std::to_string(k) +
                           " m=" + std::to_string(m));
    }
    // floor((i + 0.5) * m / k) == floor((2i + 1) * m / 2k), exact in integers.
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[i] = ((2 * i + 1) * m) / (2 * k);
    return pos;
}

std::vector<FrameIndex> sample_region(std::span<const FrameIndex> pool, std::size_t k) {
    if (k == 0) return {};
    if (k > pool.size()) {
        throw InsufficientPool("cannot draw " + std::to_string(k) + " frames from a pool of " +
                               std::to_string(pool.size()));
    }
    std::vector<FrameIndex> out;
    out.reserve(k);
    for (std::size_t p : uniform_positions(pool.size(), k)) out.push_back(pool[p]);
    return out;
}

SamplingPlan slow_fast_sample(const SimilaritySignal& signal, const BudgetConfig& cfg) {
    validate_signal(signal);
    validate_budget(cfg);

    const std::size_t t = signal.size();
    SamplingPlan plan;
    plan.alpha_final = cfg.alpha0;

    if (t <= cfg.k) {
        plan.selected.resize(t);
        std::iota(plan.selected.begin(), plan.selected.end(), FrameIndex{0});
        plan.slow_indices = plan.selected;
        plan.fallback_used = Fallback::all_frames;
        return plan;
    }

    const auto [k_slow, k_fast] = split_budget(cfg.k, cfg.fast_ratio);
    const SimilaritySignal smoothed = gaussian_smooth(signal, cfg.smoothing);

    double alpha = cfg.alpha0;
    int adaptations = 0;
    std::vector<ClipInterval> clips;
    bool settled = false;
    for (;;) {
        clips = clips_from_smoothed(smoothed, alpha);
        const std::size_t c = union_size(clips);
        const std::size_t n = t - c;
        plan.alpha_history.push_back({alpha, c, n});

        if (c >= k_slow && n >= k_fast) {
            settled = true;
            break;
        }
        if (adaptations == cfg.max_adaptations) break;
        alpha = c < k_slow ? alpha / 2.0 : alpha * 2.0;
        ++adaptations;
    }

    plan.clips = clips;
    plan.alpha_final = alpha;
    const std::vector<FrameIndex> inside = clip_frames(clips, t, true);
    const std::vector<FrameIndex> outside = clip_frames(clips, t, false);

    std::size_t n_slow = k_slow;
    std::size_t n_fast = k_fast;
    if (!settled) {
        // Use as much of the last clipping as it offers; the other region
        // makes up the difference. inside + outside == t > k, so this
        // always reaches k.
        n_slow = std::min(inside.size(), k_slow);
        n_fast = std::min(outside.size(), cfg.k - n_slow);
        n_slow = std::min(inside.size(), cfg.k - n_fast);
        plan.fallback_used = Fallback::uniform_fill;
    }

    plan.slow_indices = sample_region(inside, n_slow);
    plan.fast_indices = sample_region(outside, n_fast);
    plan.selected = merge_sorted(plan.slow_indices, plan.fast_indices);
    return plan;
}

std::vector<FrameIndex> topk_sample(const SimilaritySignal& signal, std::size_t k) {
    validate_signal(signal);
    if (k < 1) throw InvalidParameter("frame budget k must be >= 1");
    const std::size_t t = signal.size();
    std::vector<FrameIndex> order(t);
    std::iota(order.begin(), order.end(), FrameIndex{0});
    const std::size_t take = std::min(k, t);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](FrameIndex a, FrameIndex b) {
                          if (signal[a] != signal[b]) return signal[a] > signal[b];
                          return a < b;
                      });
    order.resize(take);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<FrameIndex> uniform_sample(std::size_t t, std::size_t k) {
    if (t < 1) throw InvalidInput("cannot sample from an empty timeline");
    if (k < 1) throw InvalidParameter("frame budget k must be >= 1");
    return uniform_positions(t, std::min(k, t));
}

} // namespace keyclip
