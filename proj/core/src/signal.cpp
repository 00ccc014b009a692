#include "keyclip/signal.hpp"

#include "keyclip/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace keyclip {

void validate_signal(const SimilaritySignal& signal) {
    if (signal.values.empty()) {
        throw InvalidInput("similarity signal is empty");
    }
    for (std::size_t i = 0; i < signal.values.size(); ++i) {
        if (!std::isfinite(signal.values[i])) {
            throw InvalidInput("similarity signal has a non-finite value at frame " + std::to_string(i));
        }
    }
}

void validate_smoothing(const SmoothingParams& params) {
    if (params.radius < 0) {
        throw InvalidParameter("smoothing radius must be >= 0, got " + std::to_string(params.radius));
    }
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
        throw InvalidParameter("smoothing sigma must be > 0");
    }
}

std::vector<double> gaussian_kernel(const SmoothingParams& params) {
    validate_smoothing(params);
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * params.sigma);
    const double denom = 2.0 * params.sigma * params.sigma;
    std::vector<double> kernel(static_cast<std::size_t>(2 * params.radius + 1));
    for (int j = -params.radius; j <= params.radius; ++j) {
        kernel[static_cast<std::size_t>(j + params.radius)] =
            norm * std::exp(-static_cast<double>(j) * j / denom);
    }
    return kernel;
}

SimilaritySignal gaussian_smooth(const SimilaritySignal& signal, const SmoothingParams& params) {
    validate_signal(signal);
    const std::vector<double> kernel = gaussian_kernel(params);
    const auto& s = signal.values;
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    const std::ptrdiff_t r = params.radius;

    SimilaritySignal out;
    out.fps = signal.fps;
    out.values.resize(s.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        if (i - r >= 0 && i + r < n) {
            const double* window = s.data() + (i - r);
            for (std::size_t k = 0; k < kernel.size(); ++k) acc += window[k] * kernel[k];
        } else {
            for (std::ptrdiff_t j = -r; j <= r; ++j) {
                const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(i + j, 0, n - 1);
                acc += s[static_cast<std::size_t>(idx)] * kernel[static_cast<std::size_t>(j + r)];
            }
        }
        out.values[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

SignalStats signal_stats(const SimilaritySignal& signal) {
    if (signal.values.empty()) throw InvalidInput("cannot compute statistics of an empty signal");
    const auto n = static_cast<double>(signal.values.size());
    double sum = 0.0;
    for (double v : signal.values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : signal.values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

double dynamic_threshold(const SignalStats& stats, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidParameter("peak threshold alpha must be > 0, got " + std::to_string(alpha));
    }
    return stats.mean + alpha * stats.std;
}

std::vector<FrameIndex> detect_peaks(const SimilaritySignal& smoothed, double tau) {
    validate_signal(smoothed);
    const auto& s = smoothed.values;
    const std::size_t n = s.size();
    std::vector<FrameIndex> peaks;

    std::size_t a = 0;
    while (a < n) {
        std::size_t b = a;
        while (b + 1 < n && s[b + 1] == s[a]) ++b;

        const double v = s[a];
        const bool has_left = a > 0;
        const bool has_right = b + 1 < n;
        const bool left_ok = !has_left || s[a - 1] < v;
        const bool right_ok = !has_right || s[b + 1] < v;
        if ((has_left || has_right) && left_ok && right_ok && v > tau) {
            peaks.push_back(a + (b - a) / 2);
        }
        a = b + 1;
    }
    return peaks;
}

ClipInterval expand_clip(const SimilaritySignal& smoothed, FrameIndex peak) {
    const auto& s = smoothed.values;
    if (peak >= s.size()) {
        throw InvalidInput("peak index " + std::to_string(peak) + " outside signal of length " +
                           std::to_string(s.size()));
    }
    FrameIndex start = peak;
    while (start > 0 && s[start - 1] <= s[start]) --start;
    FrameIndex end = peak;
    while (end + 1 < s.size() && s[end + 1] <= s[end]) ++end;
    return {start, end, peak};
}

std::vector<ClipInterval> merge_clips(std::vector<ClipInterval> clips) {
    if (clips.empty()) return clips;
    std::sort(clips.begin(), clips.end(), [](const ClipInterval& x, const ClipInterval& y) {
        return x.start != y.start ? x.start < y.start : x.end < y.end;
    });

    std::vector<ClipInterval> merged;
    merged.push_back(clips.front());
    for (std::size_t i = 1; i < clips.size(); ++i) {
        ClipInterval& cur = merged.back();
        const ClipInterval& next = clips[i];
        if (next.start <= cur.end + 1) {
            cur.end = std::max(cur.end, next.end);
            if (cur.peak != next.peak) cur.peak.reset();
        } else {
            merged.push_back(next);
        }
    }
    return merged;
}

std::vector<ClipInterval> clips_from_smoothed(const SimilaritySignal& smoothed, double alpha) {
    const double tau = dynamic_threshold(signal_stats(smoothed), alpha);
    std::vector<ClipInterval> clips;
    for (FrameIndex p : detect_peaks(smoothed, tau)) clips.push_back(expand_clip(smoothed, p));
    return merge_clips(std::move(clips));
}

std::vector<ClipInterval> clip_pipeline(const SimilaritySignal& signal, double alpha,
                                        const SmoothingParams& params) {
    return clips_from_smoothed(gaussian_smooth(signal, params), alpha);
}

std::size_t union_size(std::span<const ClipInterval> merged) {
    std::size_t total = 0;
    for (const auto& c : merged) total += c.length();
    return total;
}

std::vector<FrameIndex> clip_frames(std::span<const ClipInterval> merged, std::size_t num_frames,
                                    bool inside) {
    std::vector<FrameIndex> out;
    out.reserve(inside ? union_size(merged) : num_frames);
    FrameIndex cursor = 0;
    for (const auto& c : merged) {
        if (!inside) {
            for (FrameIndex i = cursor; i < c.start && i < num_frames; ++i) out.push_back(i);
        } else {
            for (FrameIndex i = c.start; i <= c.end && i < num_frames; ++i) out.push_back(i);
        }
        cursor = c.end + 1;
    }
    if (!inside) {
        for (FrameIndex i = cursor; i < num_frames; ++i) out.push_back(i);
    }
    return out;
}

} // namespace keyclip
