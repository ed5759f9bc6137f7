#pragma once

// Synthetic degradations: half-plane defocus blur and seeded noise.
//
// Randomness is counter-based: pixel i of an image draws from its own
// SplitMix64 stream whose state is splitmix_mix(seed ^ splitmix_mix(i + 1)).
// The result therefore depends only on (seed, pixel index), never on
// evaluation order or thread count.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "image.hpp"
#include "lrr.hpp"
#include "patch.hpp"

namespace lrrfuse {

enum class NoiseKind { gaussian, salt_pepper, poisson };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double variance = 0.0;  // gaussian
    double mean = 0.0;      // gaussian
    double density = 0.0;   // salt_pepper
    std::uint64_t seed = 0;

    void validate() const {
        if (!(variance >= 0.0) || !std::isfinite(variance))
            throw Error("noise variance must be finite and non-negative");
        if (!std::isfinite(mean)) throw Error("noise mean must be finite");
        if (!(density >= 0.0 && density <= 1.0)) throw Error("noise density must lie in [0,1]");
    }

    /// The kind-specific parameter (Poisson has none and reports 0).
    [[nodiscard]] double parameter() const noexcept {
        switch (kind) {
            case NoiseKind::gaussian: return variance;
            case NoiseKind::salt_pepper: return density;
            default: return 0.0;
        }
    }

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

inline const char* noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::salt_pepper: return "sp";
        case NoiseKind::poisson: return "poisson";
    }
    return "?";
}

inline double parse_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw Error("invalid " + what + " '" + std::string(text) + "'");
    return v;
}

/// Parse `gaussian:<variance>[:<mean>]`, `sp:<density>` or `poisson`.
inline NoiseSpec parse_noise_spec(std::string_view text, std::uint64_t seed = 0) {
    NoiseSpec spec;
    spec.seed = seed;
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    const std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
    if (kind == "gaussian") {
        spec.kind = NoiseKind::gaussian;
        const auto second = rest.find(':');
        spec.variance = parse_double(rest.substr(0, second), "gaussian variance");
        if (second != std::string_view::npos)
            spec.mean = parse_double(rest.substr(second + 1), "gaussian mean");
    } else if (kind == "sp" || kind == "salt_pepper") {
        spec.kind = NoiseKind::salt_pepper;
        spec.density = parse_double(rest, "salt & pepper density");
    } else if (kind == "poisson") {
        if (!rest.empty()) throw Error("poisson noise takes no parameter");
        spec.kind = NoiseKind::poisson;
    } else {
        throw Error("unknown noise kind in '" + std::string(text) +
                    "' (expected gaussian:<var>, sp:<density> or poisson)");
    }
    spec.validate();
    return spec;
}

/// Inverse of parse_noise_spec (seed not included).
inline std::string format_noise_spec(const NoiseSpec& spec) {
    auto num = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
        return std::string(buf, r.ptr);
    };
    switch (spec.kind) {
        case NoiseKind::gaussian:
            return "gaussian:" + num(spec.variance) +
                   (spec.mean != 0.0 ? ":" + num(spec.mean) : std::string());
        case NoiseKind::salt_pepper: return "sp:" + num(spec.density);
        case NoiseKind::poisson: return "poisson";
    }
    return {};
}

enum class FocusSide { left, right };

struct FocusSpec {
    FocusSide side = FocusSide::right;  // which focus image is listed as source 1
    std::size_t kernel_size = 3;
    double kernel_sigma = 7.0;

    void validate() const {
        if (kernel_size < 3 || kernel_size % 2 == 0)
            throw Error("blur kernel size must be odd and at least 3");
        if (!(kernel_sigma > 0.0)) throw Error("blur sigma must be positive");
    }
};

inline FocusSide parse_focus_side(std::string_view text) {
    if (text == "left") return FocusSide::left;
    if (text == "right") return FocusSide::right;
    throw Error("focus side must be left or right, got '" + std::string(text) + "'");
}

// --- counter-based random numbers -------------------------------------------

[[nodiscard]] constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class PixelRng {
public:
    PixelRng(std::uint64_t seed, std::uint64_t index) noexcept
        : state_{splitmix_mix(seed ^ splitmix_mix(index + 1))} {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix_mix(state_);
    }
    /// Uniform in [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform in (0,1].
    double uniform_open_low() noexcept { return 1.0 - uniform(); }

    double normal() noexcept {
        const double u1 = uniform_open_low();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Poisson draw by sequential CDF inversion (rate up to a few hundred).
    std::uint64_t poisson(double rate) noexcept {
        if (!(rate > 0.0)) return 0;
        const double u = uniform();
        double p = std::exp(-rate);
        double cdf = p;
        std::uint64_t k = 0;
        const auto limit = static_cast<std::uint64_t>(rate + 40.0 * std::sqrt(rate) + 100.0);
        while (u > cdf && k < limit) {
            ++k;
            p *= rate / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

private:
    std::uint64_t state_;
};

// --- blur --------------------------------------------------------------------

/// Normalised size x size Gaussian on the centred integer grid.
inline Matrix gaussian_kernel(std::size_t size, double sigma) {
    if (size % 2 == 0 || size == 0) throw Error("gaussian kernel size must be odd");
    if (!(sigma > 0.0)) throw Error("gaussian kernel sigma must be positive");
    const auto n = static_cast<Eigen::Index>(size);
    const double c = static_cast<double>(size / 2);
    Matrix k(n, n);
    for (Eigen::Index y = 0; y < n; ++y)
        for (Eigen::Index x = 0; x < n; ++x) {
            const double dx = static_cast<double>(x) - c;
            const double dy = static_cast<double>(y) - c;
            k(y, x) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    return k / k.sum();
}

/// 2-D correlation with half-sample symmetric boundary extension.
inline Image convolve_symmetric(const Image& img, const Matrix& kernel) {
    const auto kh = static_cast<std::int64_t>(kernel.rows());
    const auto kw = static_cast<std::int64_t>(kernel.cols());
    Image out(img.width(), img.height());
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (std::int64_t dy = 0; dy < kh; ++dy) {
                const std::size_t sy =
                    reflect_index(static_cast<std::int64_t>(y) + dy - kh / 2, img.height());
                for (std::int64_t dx = 0; dx < kw; ++dx) {
                    const std::size_t sx =
                        reflect_index(static_cast<std::int64_t>(x) + dx - kw / 2, img.width());
                    acc += kernel(dy, dx) * img(sx, sy);
                }
            }
            out(x, y) = acc;
        }
    return out;
}

struct FocusPair {
    Image focus_right;  // left half blurred
    Image focus_left;   // right half blurred

    /// (source 1, source 2) with the requested focus side first.
    [[nodiscard]] std::pair<const Image&, const Image&> ordered(FocusSide first) const {
        if (first == FocusSide::left) return {focus_left, focus_right};
        return {focus_right, focus_left};
    }
};

/// Blur one half-plane of `gt` at a hard split at column width/2.
inline FocusPair make_focus_pair(const Image& gt, const FocusSpec& spec) {
    spec.validate();
    const Image blurred = convolve_symmetric(gt, gaussian_kernel(spec.kernel_size, spec.kernel_sigma));
    FocusPair pair{gt, gt};
    const std::size_t split = gt.width() / 2;
    for (std::size_t y = 0; y < gt.height(); ++y)
        for (std::size_t x = 0; x < gt.width(); ++x) {
            if (x < split)
                pair.focus_right(x, y) = blurred(x, y);
            else
                pair.focus_left(x, y) = blurred(x, y);
        }
    return pair;
}

// --- noise -------------------------------------------------------------------

inline Image add_noise(const Image& img, const NoiseSpec& spec) {
    spec.validate();
    Image out = img;
    auto px = out.pixels();
    switch (spec.kind) {
        case NoiseKind::gaussian: {
            if (spec.variance == 0.0 && spec.mean == 0.0) return out;
            const double sd = std::sqrt(spec.variance);
            for (std::size_t i = 0; i < px.size(); ++i) {
                PixelRng rng(spec.seed, i);
                px[i] += spec.mean + sd * rng.normal();
            }
            break;
        }
        case NoiseKind::salt_pepper: {
            if (spec.density == 0.0) return out;
            for (std::size_t i = 0; i < px.size(); ++i) {
                PixelRng rng(spec.seed, i);
                const double hit = rng.uniform();
                const double salt = rng.uniform();
                if (hit < spec.density) px[i] = salt < 0.5 ? 0.0 : 1.0;
            }
            break;
        }
        case NoiseKind::poisson:
            for (std::size_t i = 0; i < px.size(); ++i) {
                PixelRng rng(spec.seed, i);
                px[i] = static_cast<double>(rng.poisson(std::max(px[i], 0.0) * 255.0)) / 255.0;
            }
            break;
    }
    return clamp_unit(std::move(out));
}

// --- synthetic scenes ----------------------------------------------------------

/// Deterministic test pattern with flat regions, hard edges, gratings and
/// fine texture, quantised to 8-bit levels. Stands in for natural photos.
inline Image synthetic_scene(std::size_t width, std::size_t height, std::uint64_t seed) {
    Image img(width, height);
    PixelRng rng(seed, 0xC0FFEEULL);
    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);

    const double gx = rng.uniform() - 0.5;
    const double gy = rng.uniform() - 0.5;
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            img(x, y) = 0.5 + 0.25 * (gx * static_cast<double>(x) / w + gy * static_cast<double>(y) / h);

    // Filled ellipses and rectangles.
    for (int s = 0; s < 8; ++s) {
        const double cx = rng.uniform() * w;
        const double cy = rng.uniform() * h;
        const double rx = (0.06 + 0.2 * rng.uniform()) * w;
        const double ry = (0.06 + 0.2 * rng.uniform()) * h;
        const double level = 0.1 + 0.8 * rng.uniform();
        const bool ellipse = rng.uniform() < 0.5;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                const double u = (static_cast<double>(x) - cx) / rx;
                const double v = (static_cast<double>(y) - cy) / ry;
                const bool inside = ellipse ? u * u + v * v <= 1.0 : std::abs(u) <= 1 && std::abs(v) <= 1;
                if (inside) img(x, y) = 0.35 * img(x, y) + 0.65 * level;
            }
    }

    // Oriented gratings, each confined to a random disc.
    for (int g = 0; g < 4; ++g) {
        const double theta = std::numbers::pi * rng.uniform();
        const double period = 3.0 + 9.0 * rng.uniform();
        const double amp = 0.06 + 0.08 * rng.uniform();
        const double cx = rng.uniform() * w;
        const double cy = rng.uniform() * h;
        const double radius = (0.15 + 0.25 * rng.uniform()) * std::min(w, h);
        const double kx = std::cos(theta) * 2.0 * std::numbers::pi / period;
        const double ky = std::sin(theta) * 2.0 * std::numbers::pi / period;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                const double dx = static_cast<double>(x) - cx;
                const double dy = static_cast<double>(y) - cy;
                if (dx * dx + dy * dy <= radius * radius)
                    img(x, y) += amp * std::sin(kx * dx + ky * dy);
            }
    }

    // Bilinear value noise on a 4-pixel lattice.
    const std::size_t cell = 4;
    const std::size_t lw = width / cell + 2;
    const std::size_t lh = height / cell + 2;
    std::vector<double> lattice(lw * lh);
    for (std::size_t i = 0; i < lattice.size(); ++i) lattice[i] = PixelRng(seed ^ 0xABCDEFULL, i).uniform() - 0.5;
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t ix = x / cell, iy = y / cell;
            const double fx = static_cast<double>(x % cell) / cell;
            const double fy = static_cast<double>(y % cell) / cell;
            auto at = [&](std::size_t a, std::size_t b) { return lattice[b * lw + a]; };
            const double v = (1 - fy) * ((1 - fx) * at(ix, iy) + fx * at(ix + 1, iy)) +
                             fy * ((1 - fx) * at(ix, iy + 1) + fx * at(ix + 1, iy + 1));
            img(x, y) += 0.08 * v;
        }

    for (double& v : img.pixels()) v = std::round(std::clamp(v, 0.02, 0.98) * 255.0) / 255.0;
    return img;
}

}  // namespace lrrfuse
