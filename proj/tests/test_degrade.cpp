#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lrrfuse/degrade.hpp"
#include "lrrfuse/fusion.hpp"
#include "oracles.hpp"

namespace lrrfuse {
namespace {

TEST(GaussianKernel, SigmaSevenValues) {
    const Matrix k = gaussian_kernel(3, 7.0);
    // exp(-r^2 / 98) at r^2 = 0, 1, 2, normalised.
    const double total = 1 + 4 * std::exp(-1.0 / 98) + 4 * std::exp(-2.0 / 98);
    EXPECT_NEAR(k(1, 1), 1 / total, 1e-15);
    EXPECT_NEAR(k(0, 1), std::exp(-1.0 / 98) / total, 1e-15);
    EXPECT_NEAR(k(0, 0), std::exp(-2.0 / 98) / total, 1e-15);
    EXPECT_NEAR(k(1, 1), 0.11263054840683998, 1e-15);
    EXPECT_NEAR(k(0, 1), 0.1114871009338527, 1e-15);
    EXPECT_NEAR(k(0, 0), 0.11035526196443726, 1e-15);
    for (double v : k.reshaped()) {
        EXPECT_GE(v, 0.1103);
        EXPECT_LE(v, 0.1127);
    }
}

TEST(GaussianKernel, NormalisedAndSymmetric) {
    for (std::size_t size : {3, 5, 7, 11})
        for (double sigma : {0.3, 1.0, 7.0, 40.0}) {
            const Matrix k = gaussian_kernel(size, sigma);
            EXPECT_NEAR(k.sum(), 1.0, 1e-12);
            EXPECT_LT((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-18);
            EXPECT_LT((k - k.rowwise().reverse()).cwiseAbs().maxCoeff(), 1e-18);
            EXPECT_LT((k - k.colwise().reverse()).cwiseAbs().maxCoeff(), 1e-18);
        }
}

TEST(GaussianKernel, Errors) {
    EXPECT_THROW(gaussian_kernel(4, 1.0), Error);
    EXPECT_THROW(gaussian_kernel(3, 0.0), Error);
    EXPECT_THROW(gaussian_kernel(3, -2.0), Error);
}

TEST(FocusPair, ConstantImageUnchanged) {
    const Image c(20, 10, 0.4);
    const FocusPair p = make_focus_pair(c, FocusSpec{});
    for (double v : p.focus_right.pixels()) EXPECT_NEAR(v, 0.4, 1e-15);
    for (double v : p.focus_left.pixels()) EXPECT_NEAR(v, 0.4, 1e-15);
}

TEST(FocusPair, SharpHalvesAreUntouched) {
    const Image g = oracle::random_image(21, 9, 5);
    const FocusPair p = make_focus_pair(g, FocusSpec{});
    const std::size_t split = 21 / 2;
    for (std::size_t y = 0; y < 9; ++y)
        for (std::size_t x = 0; x < 21; ++x) {
            if (x >= split)
                EXPECT_EQ(p.focus_right(x, y), g(x, y));
            else
                EXPECT_EQ(p.focus_left(x, y), g(x, y));
        }
    EXPECT_NE(p.focus_right, g);
    EXPECT_NE(p.focus_left, g);
}

TEST(FocusPair, BlurredHalfHasLowerSpatialFrequency) {
    Image stripes(32, 16);
    for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 32; ++x) stripes(x, y) = x % 2 == 0 ? 0.8 : 0.2;
    const FocusPair p = make_focus_pair(stripes, FocusSpec{});
    auto half = [](const Image& img, std::size_t x0) {
        Band b(16, 16);
        for (std::size_t y = 0; y < 16; ++y)
            for (std::size_t x = 0; x < 16; ++x) b(x, y) = img(x0 + x, y);
        return spatial_frequency(b).value;
    };
    EXPECT_LT(half(p.focus_right, 0), half(p.focus_right, 16));
    EXPECT_LT(half(p.focus_left, 16), half(p.focus_left, 0));
}

TEST(FocusPair, OrderedFollowsSide) {
    const FocusPair p = make_focus_pair(oracle::random_image(8, 8, 1), FocusSpec{});
    EXPECT_EQ(&p.ordered(FocusSide::right).first, &p.focus_right);
    EXPECT_EQ(&p.ordered(FocusSide::left).first, &p.focus_left);
    EXPECT_EQ(parse_focus_side("left"), FocusSide::left);
    EXPECT_THROW(parse_focus_side("up"), Error);
}

TEST(Noise, DegenerateSettingsAreIdentity) {
    const Image g = oracle::random_image(30, 30, 2);
    EXPECT_EQ(add_noise(g, parse_noise_spec("gaussian:0", 7)), g);
    EXPECT_EQ(add_noise(g, parse_noise_spec("sp:0", 7)), g);
}

TEST(Noise, SaltAndPepperFraction) {
    const Image gray(512, 512, 0.5);
    const Image out = add_noise(gray, parse_noise_spec("sp:0.02", 21));
    std::size_t hit = 0, salt = 0;
    for (double v : out.pixels()) {
        if (v == 0.0 || v == 1.0) ++hit;
        if (v == 1.0) ++salt;
        EXPECT_TRUE(v == 0.0 || v == 1.0 || v == 0.5);
    }
    const double fraction = static_cast<double>(hit) / (512.0 * 512.0);
    EXPECT_GE(fraction, 0.015);
    EXPECT_LE(fraction, 0.025);
    EXPECT_NEAR(static_cast<double>(salt) / static_cast<double>(hit), 0.5, 0.05);
}

TEST(Noise, GaussianSampleVariance) {
    const Image gray(512, 512, 0.5);
    const Image out = add_noise(gray, parse_noise_spec("gaussian:0.01", 22));
    double mean = 0, var = 0;
    for (double v : out.pixels()) mean += v - 0.5;
    mean /= static_cast<double>(out.size());
    for (double v : out.pixels()) var += (v - 0.5 - mean) * (v - 0.5 - mean);
    var /= static_cast<double>(out.size() - 1);
    EXPECT_NEAR(var, 0.01, 0.001);
    EXPECT_NEAR(mean, 0.0, 0.001);
}

TEST(Noise, GaussianMeanShift) {
    const Image gray(256, 256, 0.3);
    const Image out = add_noise(gray, parse_noise_spec("gaussian:0.0001:0.2", 4));
    double mean = 0;
    for (double v : out.pixels()) mean += v;
    EXPECT_NEAR(mean / static_cast<double>(out.size()), 0.5, 0.002);
}

TEST(Noise, PoissonPreservesMean) {
    for (double c : {0.1, 0.5, 0.9}) {
        const Image flat(512, 512, c);
        const Image out = add_noise(flat, parse_noise_spec("poisson", 23));
        double mean = 0, var = 0;
        for (double v : out.pixels()) mean += v;
        mean /= static_cast<double>(out.size());
        for (double v : out.pixels()) var += (v - mean) * (v - mean);
        var /= static_cast<double>(out.size() - 1);
        EXPECT_NEAR(mean, c, 0.02 * c);
        // Counts are Poisson(255 c): variance of count/255 is c/255.
        EXPECT_NEAR(var, c / 255.0, 0.1 * c / 255.0);
        for (double v : out.pixels()) EXPECT_EQ(std::round(v * 255.0), v * 255.0);
    }
}

TEST(Noise, SeedDeterminism) {
    const Image g = oracle::random_image(40, 30, 9);
    for (const char* spec : {"gaussian:0.005", "sp:0.01", "poisson"}) {
        EXPECT_EQ(add_noise(g, parse_noise_spec(spec, 77)), add_noise(g, parse_noise_spec(spec, 77)));
        EXPECT_NE(add_noise(g, parse_noise_spec(spec, 77)), add_noise(g, parse_noise_spec(spec, 78)));
    }
}

TEST(Noise, OutputsAreClamped) {
    const Image g = oracle::random_image(64, 64, 10);
    for (const char* spec : {"gaussian:1", "gaussian:0.01:0.9", "sp:0.5", "poisson"})
        for (double v : add_noise(g, parse_noise_spec(spec, 5)).pixels()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
}

TEST(Noise, StreamsDependOnlyOnSeedAndIndex) {
    // A pixel's noise is the same whatever the image size around it.
    const Image small(10, 1, 0.5), large(100, 1, 0.5);
    const Image a = add_noise(small, parse_noise_spec("gaussian:0.01", 3));
    const Image b = add_noise(large, parse_noise_spec("gaussian:0.01", 3));
    for (std::size_t x = 0; x < 10; ++x) EXPECT_EQ(a(x, 0), b(x, 0));
}

TEST(PixelRng, UniformAndNormalMoments) {
    double su = 0, sn = 0, sn2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        PixelRng rng(42, static_cast<std::uint64_t>(i));
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.005);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(NoiseSpecText, ParseAndFormat) {
    const NoiseSpec g = parse_noise_spec("gaussian:0.001", 5);
    EXPECT_EQ(g.kind, NoiseKind::gaussian);
    EXPECT_EQ(g.variance, 0.001);
    EXPECT_EQ(g.mean, 0.0);
    EXPECT_EQ(g.seed, 5U);
    EXPECT_EQ(parse_noise_spec("gaussian:0.01:0.1").mean, 0.1);
    EXPECT_EQ(parse_noise_spec("sp:0.02").density, 0.02);
    EXPECT_EQ(parse_noise_spec("salt_pepper:0.02").kind, NoiseKind::salt_pepper);
    EXPECT_EQ(parse_noise_spec("poisson").kind, NoiseKind::poisson);
    for (const char* text : {"gaussian:0.001", "gaussian:0.01:0.1", "sp:0.02", "poisson"})
        EXPECT_EQ(format_noise_spec(parse_noise_spec(text)), text);
    for (const char* bad : {"gaussian", "gaussian:-1", "gaussian:x", "sp:1.5", "poisson:3", "speckle:0.1", ""})
        EXPECT_THROW(parse_noise_spec(bad), Error) << bad;
}

TEST(SyntheticScene, DeterministicAndQuantised) {
    const Image a = synthetic_scene(64, 48, 7);
    EXPECT_EQ(a, synthetic_scene(64, 48, 7));
    EXPECT_NE(a, synthetic_scene(64, 48, 8));
    std::set<double> levels;
    for (double v : a.pixels()) {
        EXPECT_EQ(std::round(v * 255.0), v * 255.0);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
        levels.insert(v);
    }
    EXPECT_GT(levels.size(), 50U);
}

}  // namespace
}  // namespace lrrfuse
