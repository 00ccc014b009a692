#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace keyclip {

struct FrameEntry {
    std::size_t index = 0;
    std::filesystem::path path;
    int width = 0;
    int height = 0;

    friend bool operator==(const FrameEntry&, const FrameEntry&) = default;
};

/// Ordered frames of one video on a fixed-rate timeline. Indices run 0..T-1.
struct FrameManifest {
    std::vector<FrameEntry> entries;
    double fps = 1.0;
    std::string video_id;

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }

    friend bool operator==(const FrameManifest&, const FrameManifest&) = default;
};

struct ImageSize {
    int width = 0;
    int height = 0;

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Width/height from a PNG IHDR chunk or a JPEG SOFn marker without decoding
/// pixels. Throws IoError if the file cannot be read, FormatError otherwise.
ImageSize read_image_size(const std::filesystem::path& path);

/// Scans `dir` for frame_NNNNNN.jpg / frame_NNNNNN.png (six digits). Frames
/// are ordered by their number and re-indexed from 0; the numbering must be
/// contiguous. The manifest's video_id is the directory name.
FrameManifest build_manifest(const std::filesystem::path& dir, double fps = 1.0);

/// Checks contiguous indices, unique paths and fps > 0.
void validate_manifest(const FrameManifest& manifest);

FrameManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const FrameManifest& manifest, const std::filesystem::path& path);

/// Encoded image ready to attach to a chat request.
struct PromptImage {
    std::string bytes;
    std::string mime_type;
    int width = 0;
    int height = 0;
};

/// Target size for an image whose longer side must not exceed `max_side`.
/// Aspect ratio is kept; the shorter side is rounded to the nearest pixel.
ImageSize fit_within(ImageSize in, int max_side);

/// Longer side capped at `max_side` (aspect preserved), re-encoded as JPEG.
/// Images already within the cap are passed through byte for byte.
PromptImage downscale_for_prompt(const FrameEntry& entry, int max_side = 224);

std::string read_file_bytes(const std::filesystem::path& path);

} // namespace keyclip
