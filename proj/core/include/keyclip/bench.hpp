#pragma once

#include "keyclip/sampler.hpp"
#include "keyclip/signal.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace keyclip {

using TruthInterval = std::pair<FrameIndex, FrameIndex>; // inclusive

/// Synthetic stand-in for a scored video: Gaussian bumps over the truth
/// intervals plus seeded noise.
struct BenchScenario {
    std::size_t t = 600;
    std::vector<TruthInterval> truth_intervals;
    std::vector<double> bump_amplitudes; // one per interval; missing entries default to 1
    double noise_std = 0.0;
    double baseline = 0.0;
    std::uint64_t seed = 0;
};

struct SyntheticSignal {
    SimilaritySignal signal;
    std::vector<TruthInterval> truth;
};

/// Each interval [a, b] contributes amplitude * exp(-(i - c)^2 / (2 w^2)) with
/// c = (a + b) / 2 and w = max(1, (b - a + 1) / 4). Noise is N(0, noise_std^2)
/// from mt19937_64(seed); the sum is clamped to [0, 1].
SyntheticSignal synth_signal(const BenchScenario& scenario);

/// Two informative intervals, one per half of the timeline, placed from `seed`.
BenchScenario two_bump_scenario(std::uint64_t seed, std::size_t t = 600);

struct SelectionMetrics {
    double hit_rate = 0.0;          // truth intervals holding >= 1 selected frame
    double in_interval_share = 0.0; // selected frames that fall in some truth interval
    std::size_t max_gap = 0;        // widest stretch without a selected frame, boundaries included
};

SelectionMetrics evaluate_selection(const std::vector<FrameIndex>& selected,
                                    const std::vector<TruthInterval>& truth, std::size_t t);

enum class Strategy { tcs, topk, uniform };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct SweepPoint {
    double fast_ratio = 0.25;
    double alpha = 0.5;

    friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

/// Fast-path proportions and thresholds of the sensitivity study.
inline const std::vector<double> kFastRatioGrid{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
inline const std::vector<double> kAlphaGrid{0.25, 0.5, 0.75, 1.0};

/// Accepts "none", "fast_ratio", "alpha", "grid" (both presets crossed) or
/// explicit lists such as "fast_ratio=0,0.5" and "alpha=0.25,1;fast_ratio=0.25".
/// Unset axes keep `base`. Throws InvalidParameter on bad input.
std::vector<SweepPoint> parse_sweep(const std::string& spec, SweepPoint base = {});

struct BenchSpec {
    std::vector<std::uint64_t> seeds;
    std::size_t t = 600;
    std::size_t k = 16;
    std::vector<Strategy> strategies;
    std::vector<SweepPoint> sweep{SweepPoint{}};
    SmoothingParams smoothing{};
    int max_adaptations = 8;
    std::size_t threads = 1;
    bool timing = true;
};

struct BenchRow {
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::uniform;
    SweepPoint point;
    std::size_t k = 0;
    SelectionMetrics metrics;
    std::size_t initial_clip_frames = 0; // clip union at the sweep alpha, before adaptation
    std::size_t slow = 0;
    std::size_t fast = 0;
    Fallback fallback = Fallback::none;
    double runtime_us = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

/// Rows come out ordered by seed, then strategy, then sweep point, whatever
/// the thread count. Timing is zeroed when spec.timing is false.
BenchReport run_bench(const BenchSpec& spec);

void write_bench_csv(const BenchReport& report, std::ostream& out);

/// Per (strategy, sweep point) means across seeds, as an aligned text table.
void write_bench_table(const BenchReport& report, std::ostream& out);

} // namespace keyclip
