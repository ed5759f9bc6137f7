#include <gtest/gtest.h>
#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lrrfuse/image.hpp"
#include "lrrfuse/image_io.hpp"
#include "lrrfuse/patch.hpp"
#include "oracles.hpp"

namespace lrrfuse {
namespace {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("lrrfuse_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

void write_rgb_png(const std::string& path, std::size_t w, std::size_t h,
                   const std::vector<unsigned char>& rgb) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = PNG_FORMAT_RGB;
    ASSERT_TRUE(png_image_write_to_file(&png, path.c_str(), 0, rgb.data(), 0, nullptr));
}

TEST(Plane, RejectsInconsistentData) {
    EXPECT_THROW(Image(2, 2, std::vector<double>(3)), Error);
    EXPECT_THROW(Image(0, 3), Error);
    Image img(3, 2, 0.25);
    EXPECT_EQ(img.size(), 6U);
    EXPECT_DOUBLE_EQ(img(2, 1), 0.25);
}

TEST(ImageIo, BinaryPgmScalesBytes) {
    TempDir dir;
    const std::string path = dir.file("tiny.pgm");
    write_bytes(path, std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x40", 4));
    const Image img = load_image(path);
    ASSERT_EQ(img.width(), 2U);
    ASSERT_EQ(img.height(), 2U);
    EXPECT_DOUBLE_EQ(img(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(img(1, 0), 1.0);
    EXPECT_NEAR(img(0, 1), 0.50196, 1e-5);
    EXPECT_NEAR(img(1, 1), 0.25098, 1e-5);
}

TEST(ImageIo, AsciiPgmWithComments) {
    TempDir dir;
    const std::string path = dir.file("ascii.pgm");
    write_bytes(path, "P2\n# comment\n2 1\n255\n0 255\n");
    const Image img = load_image(path);
    EXPECT_DOUBLE_EQ(img(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(img(1, 0), 1.0);
}

TEST(ImageIo, RgbPngCollapsesToLuminance) {
    TempDir dir;
    const std::string path = dir.file("rgb.png");
    write_rgb_png(path, 2, 1, {255, 255, 255, 255, 0, 0});
    const Image img = load_image(path);
    EXPECT_DOUBLE_EQ(img(0, 0), 1.0);
    EXPECT_NEAR(img(1, 0), 0.299, 1e-15);
}

TEST(ImageIo, SaveRoundsToBytes) {
    TempDir dir;
    const std::string path = dir.file("q.pgm");
    save_image(Image(3, 1, std::vector<double>{1.0, 0.0, 0.5}), path);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    ASSERT_GE(bytes.size(), 3U);
    const auto tail = bytes.substr(bytes.size() - 3);
    EXPECT_EQ(static_cast<unsigned char>(tail[0]), 255);
    EXPECT_EQ(static_cast<unsigned char>(tail[1]), 0);
    EXPECT_EQ(static_cast<unsigned char>(tail[2]), 128);
}

TEST(ImageIo, EightBitRoundTripIsLossless) {
    TempDir dir;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t w = 1 + rng() % 40, h = 1 + rng() % 40;
        Image img(w, h);
        for (double& v : img.pixels()) v = static_cast<double>(rng() % 256) / 255.0;
        for (const char* ext : {".png", ".pgm"}) {
            const std::string path = dir.file("rt" + std::to_string(trial) + ext);
            save_image(img, path);
            const Image back = load_image(path);
            EXPECT_EQ(back, img) << ext;
            const std::string path2 = dir.file("rt2_" + std::to_string(trial) + ext);
            save_image(back, path2);
            std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
            EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}),
                      std::string(std::istreambuf_iterator<char>(b), {}));
        }
    }
}

TEST(ImageIo, Errors) {
    TempDir dir;
    EXPECT_THROW(load_image(dir.file("missing.png")), Error);
    const std::string junk = dir.file("junk.bmp");
    write_bytes(junk, "BM not an image");
    EXPECT_THROW(load_image(junk), Error);
    const std::string zero = dir.file("zero.pgm");
    write_bytes(zero, "P5\n0 4\n255\n");
    EXPECT_THROW(load_image(zero), Error);
    const std::string deep = dir.file("deep.pgm");
    write_bytes(deep, "P2\n1 1\n65535\n7\n");
    EXPECT_THROW(load_image(deep), Error);
    EXPECT_THROW(save_image(Image(1, 1), dir.file("out.tiff")), Error);
    EXPECT_THROW(save_image(Image(1, 1), dir.file("no/such/dir/out.png")), Error);
}

TEST(Tile, Examples) {
    EXPECT_EQ(tile(32, 32, 16), (PatchGrid{16, 16, 2, 2, 0, 0}));
    const PatchGrid g = tile(33, 32, 16);
    EXPECT_EQ(g.rows, 2U);
    EXPECT_EQ(g.cols, 3U);
    EXPECT_EQ(g.pad_right, 15U);
    EXPECT_EQ(g.pad_bottom, 0U);
    const PatchGrid h = tile(100, 70, 16);
    EXPECT_EQ(h.rows, 5U);
    EXPECT_EQ(h.cols, 7U);
    EXPECT_EQ(h.pad_right, 12U);
    EXPECT_EQ(h.pad_bottom, 10U);
    EXPECT_THROW(tile(10, 10, 1), Error);
}

TEST(Tile, CoversExactlyOnce) {
    for (std::size_t n = 2; n <= 33; ++n)
        for (std::size_t w = 1; w <= 80; w += 3)
            for (std::size_t h = 1; h <= 80; h += 7) {
                const PatchGrid g = tile(w, h, n);
                EXPECT_GE(g.cols * n, w);
                EXPECT_LT((g.cols - 1) * n, w);
                EXPECT_GE(g.rows * n, h);
                EXPECT_LT((g.rows - 1) * n, h);
                EXPECT_EQ(g.padded_width() % n, 0U);
                EXPECT_EQ(g.padded_height() % n, 0U);
            }
}

TEST(Tile, ExtractAndReassembleIsExact) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t w = 1 + rng() % 70, h = 1 + rng() % 70, n = 2 + rng() % 20;
        const Band src = retag<BandTag>(oracle::random_image(w, h, rng()));
        const PatchGrid g = tile(w, h, n);
        Band out(w, h, -1.0);
        for (std::size_t r = 0; r < g.rows; ++r)
            for (std::size_t c = 0; c < g.cols; ++c) place_patch(out, g, r, c, extract_patch(src, g, r, c));
        EXPECT_EQ(out, src);
    }
}

TEST(Tile, PaddingIsSymmetricReflection) {
    const Band src(3, 1, std::vector<double>{1, 2, 3});
    const PatchGrid g = tile(3, 1, 8);
    const Band p = extract_patch(src, g, 0, 0);
    const std::vector<double> expected{1, 2, 3, 3, 2, 1, 1, 2};
    for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(p(x, 0), expected[x]) << x;
    for (std::size_t y = 1; y < 8; ++y) EXPECT_EQ(p(0, y), 1.0);
}

TEST(Tile, ReflectIndex) {
    EXPECT_EQ(reflect_index(-1, 4), 0U);
    EXPECT_EQ(reflect_index(-2, 4), 1U);
    EXPECT_EQ(reflect_index(4, 4), 3U);
    EXPECT_EQ(reflect_index(9, 4), 1U);
    EXPECT_EQ(reflect_index(5, 1), 0U);
}

TEST(Image, CenterCrop) {
    const Image img = oracle::random_image(10, 7, 1);
    const Image c = center_crop(img, 4, 4);
    ASSERT_EQ(c.width(), 4U);
    EXPECT_EQ(c(0, 0), img(3, 1));
    EXPECT_EQ(center_crop(img, 100, 100), img);
}

}  // namespace
}  // namespace lrrfuse
