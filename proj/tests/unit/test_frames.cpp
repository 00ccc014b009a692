#include "test_support.hpp"

#include <keyclip/error.hpp>
#include <keyclip/frames.hpp>

#include <gtest/gtest.h>

#include <opencv2/imgcodecs.hpp>

using namespace keyclip;
namespace fs = std::filesystem;

TEST(BuildManifest, IndexesContiguousFrames) {
    keyclip::testing::TempDir tmp;
    const auto dir = tmp.path / "video_a";
    keyclip::testing::write_frames(dir, 10, 40, 30, "jpg");
    std::ofstream(dir / "notes.txt") << "ignored";
    const auto m = build_manifest(dir, 1.0);
    ASSERT_EQ(m.size(), 10u);
    EXPECT_EQ(m.video_id, "video_a");
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(m.entries[i].index, i);
        EXPECT_EQ(m.entries[i].width, 40);
        EXPECT_EQ(m.entries[i].height, 30);
    }
    EXPECT_EQ(m.entries[3].path.filename(), "frame_000003.jpg");
}

TEST(BuildManifest, ReindexesFromFirstNumber) {
    keyclip::testing::TempDir tmp;
    keyclip::testing::write_frames(tmp.path / "v", 3, 8, 8, "png", 1);
    const auto m = build_manifest(tmp.path / "v");
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m.entries[0].index, 0u);
    EXPECT_EQ(m.entries[0].path.filename(), "frame_000001.png");
}

TEST(BuildManifest, GapNamesMissingFrame) {
    keyclip::testing::TempDir tmp;
    const auto dir = tmp.path / "v";
    keyclip::testing::write_frames(dir, 10);
    fs::remove(dir / "frame_000004.png");
    try {
        build_manifest(dir);
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find("missing: 4"), std::string::npos) << e.what();
    }
}

TEST(BuildManifest, EmptyDirectoryAndBadFps) {
    keyclip::testing::TempDir tmp;
    EXPECT_THROW(build_manifest(tmp.path), InvalidInput);
    EXPECT_THROW(build_manifest(tmp.path / "absent"), IoError);
    EXPECT_THROW(build_manifest(tmp.path, 0.0), InvalidParameter);
}

TEST(ReadImageSize, PngAndJpegHeaders) {
    keyclip::testing::TempDir tmp;
    cv::imwrite((tmp.path / "a.png").string(), cv::Mat(17, 33, CV_8UC3, cv::Scalar(1, 2, 3)));
    cv::imwrite((tmp.path / "b.jpg").string(), cv::Mat(21, 45, CV_8UC3, cv::Scalar(1, 2, 3)));
    EXPECT_EQ(read_image_size(tmp.path / "a.png"), (ImageSize{33, 17}));
    EXPECT_EQ(read_image_size(tmp.path / "b.jpg"), (ImageSize{45, 21}));
    std::ofstream(tmp.path / "c.png") << "not an image";
    EXPECT_THROW(read_image_size(tmp.path / "c.png"), FormatError);
    EXPECT_THROW(read_image_size(tmp.path / "missing.png"), IoError);
}

TEST(FitWithin, Examples) {
    EXPECT_EQ(fit_within({1920, 1080}, 224), (ImageSize{224, 126}));
    EXPECT_EQ(fit_within({1080, 1920}, 224), (ImageSize{126, 224}));
    EXPECT_EQ(fit_within({200, 100}, 224), (ImageSize{200, 100}));
    EXPECT_EQ(fit_within({224, 224}, 224), (ImageSize{224, 224}));
    EXPECT_EQ(fit_within({5000, 1}, 224), (ImageSize{224, 1}));
}

TEST(DownscaleForPrompt, ShrinksLargeFrames) {
    keyclip::testing::TempDir tmp;
    const auto p = tmp.path / "big.png";
    cv::imwrite(p.string(), cv::Mat(1080, 1920, CV_8UC3, cv::Scalar(10, 200, 30)));
    const auto img = downscale_for_prompt({0, p, 1920, 1080});
    EXPECT_EQ(img.width, 224);
    EXPECT_EQ(img.height, 126);
    EXPECT_EQ(img.mime_type, "image/jpeg");
    const std::vector<unsigned char> buf(img.bytes.begin(), img.bytes.end());
    const cv::Mat decoded = cv::imdecode(buf, cv::IMREAD_COLOR);
    EXPECT_EQ(decoded.cols, 224);
    EXPECT_EQ(decoded.rows, 126);
}

TEST(DownscaleForPrompt, SmallFramesPassThrough) {
    keyclip::testing::TempDir tmp;
    for (auto [w, h] : {std::pair{200, 100}, std::pair{224, 224}}) {
        const auto p = tmp.path / ("f" + std::to_string(w) + ".png");
        cv::imwrite(p.string(), cv::Mat(h, w, CV_8UC3, cv::Scalar(5, 6, 7)));
        const auto img = downscale_for_prompt({0, p, w, h});
        EXPECT_EQ(img.width, w);
        EXPECT_EQ(img.height, h);
        EXPECT_EQ(img.mime_type, "image/png");
        EXPECT_EQ(img.bytes, read_file_bytes(p));
    }
}

TEST(Manifest, RoundTripAndValidation) {
    keyclip::testing::TempDir tmp;
    keyclip::testing::write_frames(tmp.path / "v", 5);
    const auto m = build_manifest(tmp.path / "v", 2.0);
    save_manifest(m, tmp.path / "m.json");
    EXPECT_EQ(load_manifest(tmp.path / "m.json"), m);

    auto broken = m;
    broken.entries[2].index = 7;
    EXPECT_THROW(validate_manifest(broken), FormatError);
    std::ofstream(tmp.path / "bad.json") << "[1,2]";
    EXPECT_THROW(load_manifest(tmp.path / "bad.json"), FormatError);
}
