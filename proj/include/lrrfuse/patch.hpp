#pragma once

#include <cstddef>
#include <cstdint>

#include "image.hpp"

namespace lrrfuse {

/// Non-overlapping tiling of a raster into patches (stride = patch size).
/// Rasters whose size is not a multiple of the patch are padded on the
/// right and bottom by symmetric reflection.
struct PatchGrid {
    std::size_t patch_width = 0;
    std::size_t patch_height = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t pad_right = 0;
    std::size_t pad_bottom = 0;

    [[nodiscard]] std::size_t count() const noexcept { return rows * cols; }
    [[nodiscard]] std::size_t padded_width() const noexcept { return cols * patch_width; }
    [[nodiscard]] std::size_t padded_height() const noexcept { return rows * patch_height; }

    friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

/// Square n x n tiling of a width x height raster.
inline PatchGrid tile(std::size_t width, std::size_t height, std::size_t n) {
    if (n < 2) throw Error("patch size must be at least 2, got " + std::to_string(n));
    if (width == 0 || height == 0) throw Error("cannot tile an empty raster");
    PatchGrid g;
    g.patch_width = g.patch_height = n;
    g.cols = (width + n - 1) / n;
    g.rows = (height + n - 1) / n;
    g.pad_right = g.cols * n - width;
    g.pad_bottom = g.rows * n - height;
    return g;
}

/// Single patch spanning the whole raster.
inline PatchGrid whole_grid(std::size_t width, std::size_t height) {
    return PatchGrid{width, height, 1, 1, 0, 0};
}

/// Half-sample symmetric reflection of an arbitrary index into [0, n):
/// ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
[[nodiscard]] inline std::size_t reflect_index(std::int64_t i, std::size_t n) noexcept {
    const auto len = static_cast<std::int64_t>(n);
    const std::int64_t period = 2 * len;
    std::int64_t m = i % period;
    if (m < 0) m += period;
    return static_cast<std::size_t>(m < len ? m : period - 1 - m);
}

/// Copy patch (row, col) out of `src`, reflecting where it overhangs the edge.
template <class Tag>
[[nodiscard]] Plane<Tag> extract_patch(const Plane<Tag>& src, const PatchGrid& grid,
                                       std::size_t row, std::size_t col) {
    Plane<Tag> patch(grid.patch_width, grid.patch_height);
    const std::size_t x0 = col * grid.patch_width;
    const std::size_t y0 = row * grid.patch_height;
    for (std::size_t y = 0; y < grid.patch_height; ++y) {
        const std::size_t sy = reflect_index(static_cast<std::int64_t>(y0 + y), src.height());
        for (std::size_t x = 0; x < grid.patch_width; ++x) {
            const std::size_t sx =
                reflect_index(static_cast<std::int64_t>(x0 + x), src.width());
            patch(x, y) = src(sx, sy);
        }
    }
    return patch;
}

/// Write `patch` into tile (row, col) of `dst`, dropping the padded part.
template <class Tag>
void place_patch(Plane<Tag>& dst, const PatchGrid& grid, std::size_t row, std::size_t col,
                 const Plane<Tag>& patch) {
    const std::size_t x0 = col * grid.patch_width;
    const std::size_t y0 = row * grid.patch_height;
    for (std::size_t y = 0; y < grid.patch_height && y0 + y < dst.height(); ++y)
        for (std::size_t x = 0; x < grid.patch_width && x0 + x < dst.width(); ++x)
            dst(x0 + x, y0 + y) = patch(x, y);
}

}  // namespace lrrfuse
