#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "image.hpp"

namespace lrrfuse {

/// PSNR reported for identical images.
inline constexpr double kPsnrCap = 99.0;

struct MetricsReport {
    double rmse = 0.0;
    double psnr = kPsnrCap;
    double ssim = 1.0;
};

namespace detail {

inline void require_same_size(const Image& a, const Image& b, const char* metric) {
    if (!a.same_shape(b))
        throw Error(std::string(metric) + ": image sizes differ: " + shape_string(a) + " vs " +
                    shape_string(b));
}

inline double mse(const Image& a, const Image& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels()[i] - b.pixels()[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

// Separable 'valid' filtering with a normalised 1-D kernel.
inline std::vector<double> filter_valid(const Image& img, const std::vector<double>& k) {
    const std::size_t n = k.size();
    const std::size_t ow = img.width() - n + 1;
    const std::size_t oh = img.height() - n + 1;
    std::vector<double> tmp(ow * img.height());
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) acc += k[t] * img(x + t, y);
            tmp[y * ow + x] = acc;
        }
    std::vector<double> out(ow * oh);
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) acc += k[t] * tmp[(y + t) * ow + x];
            out[y * ow + x] = acc;
        }
    return out;
}

}  // namespace detail

inline double rmse(const Image& a, const Image& b) {
    detail::require_same_size(a, b, "rmse");
    return std::sqrt(detail::mse(a, b));
}

/// Peak 1.0; identical images report kPsnrCap.
inline double psnr(const Image& a, const Image& b) {
    detail::require_same_size(a, b, "psnr");
    const double m = detail::mse(a, b);
    if (m == 0.0) return kPsnrCap;
    return 10.0 * std::log10(1.0 / m);
}

struct SsimParams {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM over all window positions fully inside the image.
inline double ssim(const Image& a, const Image& b, const SsimParams& p = {}) {
    detail::require_same_size(a, b, "ssim");
    if (a.width() < p.window || a.height() < p.window)
        throw Error("ssim: image " + shape_string(a) + " is smaller than the " +
                    std::to_string(p.window) + "x" + std::to_string(p.window) + " window");
    std::vector<double> k(p.window);
    const double c = static_cast<double>(p.window / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.window; ++i) {
        const double d = static_cast<double>(i) - c;
        k[i] = std::exp(-d * d / (2.0 * p.sigma * p.sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;

    Image aa(a.width(), a.height()), bb(a.width(), a.height()), ab(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a.pixels()[i], y = b.pixels()[i];
        aa.pixels()[i] = x * x;
        bb.pixels()[i] = y * y;
        ab.pixels()[i] = x * y;
    }
    const auto mu_a = detail::filter_valid(a, k);
    const auto mu_b = detail::filter_valid(b, k);
    const auto e_aa = detail::filter_valid(aa, k);
    const auto e_bb = detail::filter_valid(bb, k);
    const auto e_ab = detail::filter_valid(ab, k);

    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

inline MetricsReport evaluate(const Image& candidate, const Image& reference) {
    return {rmse(candidate, reference), psnr(candidate, reference), ssim(candidate, reference)};
}

}  // namespace lrrfuse
