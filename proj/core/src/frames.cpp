#include "keyclip/frames.hpp"

#include "keyclip/error.hpp"

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace keyclip {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

std::uint16_t be16(const unsigned char* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

ImageSize png_size(const std::string& bytes, const fs::path& path) {
    // 8-byte signature, 4-byte length, "IHDR", width, height.
    if (bytes.size() < 24 || bytes.compare(12, 4, "IHDR") != 0) {
        throw FormatError("truncated PNG header in " + path.string());
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    return {static_cast<int>(be32(p + 16)), static_cast<int>(be32(p + 20))};
}

ImageSize jpeg_size(const std::string& bytes, const fs::path& path) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    std::size_t pos = 2;
    while (pos + 4 <= bytes.size()) {
        if (p[pos] != 0xFF) {
            ++pos;
            continue;
        }
        const unsigned char marker = p[pos + 1];
        if (marker == 0xFF) {
            ++pos;
            continue;
        }
        if (marker == 0xD8 || marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) {
            pos += 2;
            continue;
        }
        const std::uint16_t len = be16(p + pos + 2);
        const bool is_sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC;
        if (is_sof) {
            if (pos + 9 > bytes.size()) break;
            return {static_cast<int>(be16(p + pos + 7)), static_cast<int>(be16(p + pos + 5))};
        }
        if (marker == 0xD9 || marker == 0xDA) break;
        pos += 2 + len;
    }
    throw FormatError("no frame header found in JPEG " + path.string());
}

} // namespace

std::string read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImageSize read_image_size(const fs::path& path) {
    const std::string bytes = read_file_bytes(path);
    static constexpr std::array<unsigned char, 8> kPngSig{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= 8 && std::equal(kPngSig.begin(), kPngSig.end(),
                                        reinterpret_cast<const unsigned char*>(bytes.data()))) {
        return png_size(bytes, path);
    }
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xD8) {
        return jpeg_size(bytes, path);
    }
    throw FormatError("not a PNG or JPEG image: " + path.string());
}

FrameManifest build_manifest(const fs::path& dir, double fps) {
    if (!(fps > 0.0)) throw InvalidParameter("fps must be > 0");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());

    static const std::regex kPattern(R"(frame_(\d{6})\.(jpg|png))");
    std::map<std::size_t, fs::path> numbered;
    for (const auto& item : fs::directory_iterator(dir)) {
        if (!item.is_regular_file()) continue;
        std::smatch m;
        const std::string name = item.path().filename().string();
        if (!std::regex_match(name, m, kPattern)) continue;
        const auto number = static_cast<std::size_t>(std::stoul(m[1].str()));
        if (!numbered.emplace(number, item.path()).second) {
            throw InvalidInput("duplicate frame number " + std::to_string(number) + " in " + dir.string());
        }
    }
    if (numbered.empty()) throw InvalidInput("no frame_NNNNNN.(jpg|png) files in " + dir.string());

    const std::size_t first = numbered.begin()->first;
    const std::size_t last = numbered.rbegin()->first;
    if (last - first + 1 != numbered.size()) {
        std::ostringstream missing;
        std::size_t listed = 0;
        for (std::size_t n = first; n <= last && listed < 20; ++n) {
            if (!numbered.count(n)) missing << (listed++ ? ", " : "") << n;
        }
        throw InvalidInput("frame numbering in " + dir.string() + " has gaps; missing: " + missing.str());
    }

    FrameManifest manifest;
    manifest.fps = fps;
    manifest.video_id = fs::absolute(dir).lexically_normal().filename().string();
    if (manifest.video_id.empty()) manifest.video_id = fs::absolute(dir).parent_path().filename().string();
    manifest.entries.reserve(numbered.size());
    for (const auto& [number, path] : numbered) {
        const ImageSize size = read_image_size(path);
        manifest.entries.push_back({number - first, path, size.width, size.height});
    }
    return manifest;
}

void validate_manifest(const FrameManifest& manifest) {
    if (!(manifest.fps > 0.0)) throw FormatError("manifest fps must be > 0");
    if (manifest.entries.empty()) throw InvalidInput("manifest has no frames");
    std::set<fs::path> seen;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        if (e.index != i) {
            throw FormatError("manifest frame " + std::to_string(i) + " has index " + std::to_string(e.index));
        }
        if (!seen.insert(e.path).second) throw FormatError("duplicate frame path " + e.path.string());
    }
}

FrameManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw FormatError("manifest is not a JSON object: " + path.string());

    FrameManifest manifest;
    try {
        manifest.video_id = doc.at("video_id").get<std::string>();
        manifest.fps = doc.at("fps").get<double>();
        const fs::path base = path.parent_path();
        for (const auto& f : doc.at("frames")) {
            fs::path p = f.at("path").get<std::string>();
            if (p.is_relative()) p = base / p;
            manifest.entries.push_back(
                {f.at("index").get<std::size_t>(), p, f.at("width").get<int>(), f.at("height").get<int>()});
        }
    } catch (const json::exception& e) {
        throw FormatError("bad manifest " + path.string() + ": " + e.what());
    }
    validate_manifest(manifest);
    return manifest;
}

void save_manifest(const FrameManifest& manifest, const fs::path& path) {
    json doc;
    doc["video_id"] = manifest.video_id;
    doc["fps"] = manifest.fps;
    json frames = json::array();
    for (const auto& e : manifest.entries) {
        frames.push_back({{"index", e.index}, {"path", e.path.string()}, {"width", e.width}, {"height", e.height}});
    }
    doc["frames"] = std::move(frames);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << doc.dump(2) << '\n';
}

ImageSize fit_within(ImageSize in, int max_side) {
    if (max_side < 1) throw InvalidParameter("max_side must be >= 1");
    const int longer = std::max(in.width, in.height);
    if (longer <= max_side) return in;
    const double scale = static_cast<double>(max_side) / longer;
    auto shrink = [&](int v) { return std::max(1, static_cast<int>(std::lround(v * scale))); };
    if (in.width >= in.height) return {max_side, shrink(in.height)};
    return {shrink(in.width), max_side};
}

PromptImage downscale_for_prompt(const FrameEntry& entry, int max_side) {
    std::string bytes = read_file_bytes(entry.path);
    const std::vector<unsigned char> buf(bytes.begin(), bytes.end());
    cv::Mat img = cv::imdecode(buf, cv::IMREAD_COLOR);
    if (img.empty()) throw FormatError("cannot decode image " + entry.path.string());

    const ImageSize target = fit_within({img.cols, img.rows}, max_side);
    if (target.width == img.cols && target.height == img.rows) {
        const bool png = entry.path.extension() == ".png";
        return {std::move(bytes), png ? "image/png" : "image/jpeg", img.cols, img.rows};
    }

    cv::Mat small;
    cv::resize(img, small, cv::Size(target.width, target.height), 0, 0, cv::INTER_AREA);
    std::vector<unsigned char> encoded;
    if (!cv::imencode(".jpg", small, encoded, {cv::IMWRITE_JPEG_QUALITY, 90})) {
        throw FormatError("cannot encode downscaled image for " + entry.path.string());
    }
    return {std::string(encoded.begin(), encoded.end()), "image/jpeg", small.cols, small.rows};
}

} // namespace keyclip
