#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace keyclip {

using FrameIndex = std::size_t;

/// Per-frame relevance scores on the 1 FPS timeline. One value per frame;
/// used for raw, pooled and smoothed signals alike.
struct SimilaritySignal {
    std::vector<double> values;
    double fps = 1.0;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Truncated Gaussian kernel: `radius` frames on each side, width `sigma`.
struct SmoothingParams {
    int radius = 4;
    double sigma = 1.0;
};

struct SignalStats {
    double mean = 0.0;
    double std = 0.0; // population
};

/// Inclusive frame range [start, end]. `peak` is the local maximum the clip
/// grew from; it is dropped when merging fuses clips from different peaks.
struct ClipInterval {
    FrameIndex start = 0;
    FrameIndex end = 0;
    std::optional<FrameIndex> peak;

    std::size_t length() const noexcept { return end - start + 1; }
    bool contains(FrameIndex i) const noexcept { return i >= start && i <= end; }

    friend bool operator==(const ClipInterval&, const ClipInterval&) = default;
};

// Throws InvalidInput on an empty signal or a non-finite value.
void validate_signal(const SimilaritySignal& signal);
void validate_smoothing(const SmoothingParams& params);

/// Gaussian smoothing with edge-replicated padding:
///   out[i] = 1/(sqrt(2*pi)*sigma) * sum_{j=-r..r} s[clamp(i+j)] * exp(-j^2 / (2 sigma^2))
/// The normalisation constant is the analytic one, so the truncated kernel
/// sums to slightly less than 1 (about 0.99997 for r=4, sigma=1).
SimilaritySignal gaussian_smooth(const SimilaritySignal& signal, const SmoothingParams& params = {});

/// The kernel weights for offsets -r..r, exposed for benchmarks and tests.
std::vector<double> gaussian_kernel(const SmoothingParams& params);

SignalStats signal_stats(const SimilaritySignal& signal);

/// tau = mean + alpha * std. alpha must be positive and finite.
double dynamic_threshold(const SignalStats& stats, double alpha);

/// Local maxima strictly above `tau`, in increasing order.
///
/// A maximal run of equal values is a maximum when every neighbour that
/// exists is strictly smaller; the run reports its centre index (left-centre
/// for even lengths). Runs touching the first or last frame only need to beat
/// their one inner neighbour. A signal that is a single constant run has no
/// maximum.
std::vector<FrameIndex> detect_peaks(const SimilaritySignal& smoothed, double tau);

/// Grows [peak, peak] outwards while the next value is <= the current one.
/// Stops at the first strict increase or at the signal boundary.
ClipInterval expand_clip(const SimilaritySignal& smoothed, FrameIndex peak);

/// Sorted, disjoint, non-adjacent union of `clips`. Intervals that overlap or
/// touch (end + 1 == next.start) are fused.
std::vector<ClipInterval> merge_clips(std::vector<ClipInterval> clips);

/// threshold -> peaks -> expand -> merge on an already smoothed signal. The
/// slow-fast sampler reuses one smoothed signal across alpha adjustments.
std::vector<ClipInterval> clips_from_smoothed(const SimilaritySignal& smoothed, double alpha);

/// smooth -> stats -> threshold -> peaks -> expand -> merge.
std::vector<ClipInterval> clip_pipeline(const SimilaritySignal& signal, double alpha,
                                        const SmoothingParams& params = {});

/// Number of frames covered by a merged clip list.
std::size_t union_size(std::span<const ClipInterval> merged);

/// Frame indices covered by (inside == true) or outside of a merged clip list.
std::vector<FrameIndex> clip_frames(std::span<const ClipInterval> merged, std::size_t num_frames,
                                    bool inside);

} // namespace keyclip
