#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrrfuse {

/// Thrown for malformed inputs and failed I/O throughout the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ImageTag {};
struct BandTag {};

/// Row-major single-channel raster of doubles.
///
/// The tag separates pixel images (nominal range [0,1]) from transform
/// coefficient bands (unbounded) so the two cannot be mixed by accident.
template <class Tag>
class Plane {
public:
    Plane() = default;

    Plane(std::size_t width, std::size_t height, double fill = 0.0)
        : width_{width}, height_{height}, data_(checked_size(width, height), fill) {}

    Plane(std::size_t width, std::size_t height, std::vector<double> data)
        : width_{width}, height_{height}, data_{std::move(data)} {
        if (data_.size() != checked_size(width, height))
            throw Error("plane data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] double operator()(std::size_t x, std::size_t y) const noexcept {
        return data_[y * width_ + x];
    }
    [[nodiscard]] double& operator()(std::size_t x, std::size_t y) noexcept {
        return data_[y * width_ + x];
    }

    [[nodiscard]] std::span<const double> pixels() const noexcept { return data_; }
    [[nodiscard]] std::span<double> pixels() noexcept { return data_; }

    [[nodiscard]] std::span<const double> row(std::size_t y) const noexcept {
        return std::span<const double>(data_).subspan(y * width_, width_);
    }
    [[nodiscard]] std::span<double> row(std::size_t y) noexcept {
        return std::span<double>(data_).subspan(y * width_, width_);
    }

    [[nodiscard]] bool same_shape(const Plane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    static std::size_t checked_size(std::size_t width, std::size_t height) {
        if (width == 0 || height == 0)
            throw Error("plane dimensions must be at least 1x1");
        return width * height;
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> data_;
};

using Image = Plane<ImageTag>;
using Band = Plane<BandTag>;

template <class To, class From>
[[nodiscard]] Plane<To> retag(const Plane<From>& p) {
    return Plane<To>(p.width(), p.height(),
                     std::vector<double>(p.pixels().begin(), p.pixels().end()));
}

inline Image clamp_unit(Image img) {
    for (double& v : img.pixels()) v = std::clamp(v, 0.0, 1.0);
    return img;
}

inline std::string shape_string(std::size_t width, std::size_t height) {
    return std::to_string(width) + "x" + std::to_string(height);
}

template <class Tag>
std::string shape_string(const Plane<Tag>& p) {
    return shape_string(p.width(), p.height());
}

/// Centered crop to at most (width, height); smaller inputs are returned whole.
template <class Tag>
[[nodiscard]] Plane<Tag> center_crop(const Plane<Tag>& src, std::size_t width,
                                     std::size_t height) {
    const std::size_t w = std::min(width, src.width());
    const std::size_t h = std::min(height, src.height());
    const std::size_t x0 = (src.width() - w) / 2;
    const std::size_t y0 = (src.height() - h) / 2;
    Plane<Tag> out(w, h);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) out(x, y) = src(x0 + x, y0 + y);
    return out;
}

}  // namespace lrrfuse
