#pragma once

// Two-source multi-focus fusion in the wavelet domain.
//
//   1. both sources are decomposed by dwt2;
//   2. the low bands are tiled and each tile is copied from the source with
//      the larger spatial frequency;
//   3. every detail band is tiled, each tile of each source is represented by
//      LRR with itself as dictionary, and the tile whose coefficient matrix Z
//      has the larger nuclear norm wins; the written tile is the low-rank part
//      X Z of the winner (the noise term E is dropped);
//   4. idwt2 and clamping to [0,1].

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "image.hpp"
#include "lrr.hpp"
#include "parallel.hpp"
#include "patch.hpp"
#include "wavelet.hpp"

namespace lrrfuse {

enum class TieBreak {
    second,  // source 1 only on a strict win
    first,   // source 1 on ties as well
};

enum class HighPatchOutput {
    reconstruction,  // X Z of the winning tile
    raw,             // the winning tile unchanged
};

struct FusionConfig {
    double lambda = 4.5;
    std::size_t patch_size = 16;
    std::size_t levels = 2;
    std::string basis = "db2";
    AlmParams alm{};
    TieBreak tie_break = TieBreak::second;
    HighPatchOutput high_output = HighPatchOutput::reconstruction;
    std::size_t threads = 0;  // 0 = hardware concurrency; output does not depend on it

    void validate() const {
        if (!(lambda > 0.0)) throw Error("fusion lambda must be positive");
        if (patch_size < 2) throw Error("fusion patch_size must be at least 2");
        if (levels < 1) throw Error("fusion levels must be at least 1");
        (void)basis_by_name(basis);
        lrr_params().validate();
    }

    [[nodiscard]] AlmParams lrr_params() const {
        AlmParams p = alm;
        p.lambda = lambda;
        return p;
    }
};

struct SfValue {
    double value = 0.0;
    double fx = 0.0;
    double fy = 0.0;
};

/// Root-mean-square of first differences along x (fx) and y (fy), both
/// normalised by the full patch area; value = sqrt(fx^2 + fy^2).
inline SfValue spatial_frequency(const Band& patch) {
    const std::size_t cols = patch.width();
    const std::size_t rows = patch.height();
    if (cols < 2 || rows < 2)
        throw Error("spatial_frequency needs at least a 2x2 patch, got " + shape_string(patch));
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 1; j < cols; ++j) {
            const double d = patch(j, i) - patch(j - 1, i);
            sx += d * d;
        }
    for (std::size_t i = 1; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double d = patch(j, i) - patch(j, i - 1);
            sy += d * d;
        }
    const double area = static_cast<double>(rows * cols);
    SfValue sf;
    sf.fx = std::sqrt(sx / area);
    sf.fy = std::sqrt(sy / area);
    sf.value = std::sqrt(sf.fx * sf.fx + sf.fy * sf.fy);
    return sf;
}

/// Patch grid used for a band: n x n tiles, or the whole band as a single
/// tile when n exceeds either side.
inline PatchGrid band_grid(const Band& band, std::size_t n) {
    if (n > band.width() || n > band.height()) return whole_grid(band.width(), band.height());
    return tile(band.width(), band.height(), n);
}

/// 1 when source 1 wins the comparison, 2 otherwise.
inline std::uint8_t choose_source(double score1, double score2, TieBreak tie) {
    const bool first = tie == TieBreak::second ? score1 > score2 : score1 >= score2;
    return first ? 1 : 2;
}

/// Per-tile outcome of fusing one band pair, in row-major tile order.
struct BandDecision {
    PatchGrid grid;
    std::vector<std::uint8_t> source;  // 1 or 2
    std::vector<double> score1;
    std::vector<double> score2;
};

struct BandFusion {
    Band fused;
    BandDecision decision;
};

namespace detail {

inline void require_same_shape(const Band& a, const Band& b, const char* where) {
    if (!a.same_shape(b))
        throw Error(std::string(where) + ": band size mismatch " + shape_string(a) + " vs " +
                    shape_string(b));
}

inline Matrix to_matrix(const Band& patch) {
    Matrix m(patch.height(), patch.width());
    for (std::size_t y = 0; y < patch.height(); ++y)
        for (std::size_t x = 0; x < patch.width(); ++x)
            m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = patch(x, y);
    return m;
}

inline Band to_band(const Matrix& m) {
    Band b(static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.rows()));
    for (std::size_t y = 0; y < b.height(); ++y)
        for (std::size_t x = 0; x < b.width(); ++x)
            b(x, y) = m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
    return b;
}

}  // namespace detail

/// Low-band rule: copy whole tiles from the source with larger spatial frequency.
inline BandFusion fuse_low_detailed(const Band& l1, const Band& l2, const FusionConfig& cfg) {
    detail::require_same_shape(l1, l2, "fuse_low");
    if (cfg.patch_size < 2) throw Error("fusion patch_size must be at least 2");
    BandFusion out{Band(l1.width(), l1.height()), {band_grid(l1, cfg.patch_size), {}, {}, {}}};
    const PatchGrid& grid = out.decision.grid;
    for (std::size_t r = 0; r < grid.rows; ++r)
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const Band p1 = extract_patch(l1, grid, r, c);
            const Band p2 = extract_patch(l2, grid, r, c);
            const double sf1 = spatial_frequency(p1).value;
            const double sf2 = spatial_frequency(p2).value;
            const std::uint8_t src = choose_source(sf1, sf2, cfg.tie_break);
            place_patch(out.fused, grid, r, c, src == 1 ? p1 : p2);
            out.decision.source.push_back(src);
            out.decision.score1.push_back(sf1);
            out.decision.score2.push_back(sf2);
        }
    return out;
}

inline Band fuse_low(const Band& l1, const Band& l2, const FusionConfig& cfg) {
    return fuse_low_detailed(l1, l2, cfg).fused;
}

/// Detail-band rule: per tile, LRR of each source against itself; the larger
/// ||Z||_* wins and contributes X Z (or the raw tile, if configured).
inline BandFusion fuse_high_detailed(const Band& h1, const Band& h2, const FusionConfig& cfg) {
    detail::require_same_shape(h1, h2, "fuse_high");
    cfg.validate();
    const AlmParams params = cfg.lrr_params();
    const PatchGrid grid = band_grid(h1, cfg.patch_size);
    const std::size_t count = grid.count();

    std::vector<Band> winners(count);
    BandDecision decision{grid, std::vector<std::uint8_t>(count), std::vector<double>(count),
                          std::vector<double>(count)};
    parallel_for(count, cfg.threads, [&](std::size_t k) {
        const std::size_t r = k / grid.cols;
        const std::size_t c = k % grid.cols;
        const Matrix x1 = detail::to_matrix(extract_patch(h1, grid, r, c));
        const Matrix x2 = detail::to_matrix(extract_patch(h2, grid, r, c));
        const LrrSolution s1 = lrr_solve(x1, params);
        const LrrSolution s2 = lrr_solve(x2, params);
        const double n1 = nuclear_norm(s1.z);
        const double n2 = nuclear_norm(s2.z);
        const std::uint8_t src = choose_source(n1, n2, cfg.tie_break);
        const Matrix& x = src == 1 ? x1 : x2;
        const Matrix& z = src == 1 ? s1.z : s2.z;
        winners[k] = detail::to_band(cfg.high_output == HighPatchOutput::raw ? x : Matrix(x * z));
        decision.source[k] = src;
        decision.score1[k] = n1;
        decision.score2[k] = n2;
    });

    BandFusion out{Band(h1.width(), h1.height()), std::move(decision)};
    for (std::size_t k = 0; k < count; ++k)
        place_patch(out.fused, grid, k / grid.cols, k % grid.cols, winners[k]);
    return out;
}

inline Band fuse_high(const Band& h1, const Band& h2, const FusionConfig& cfg) {
    return fuse_high_detailed(h1, h2, cfg).fused;
}

struct FusionResult {
    Image fused;
    BandDecision low;
    std::vector<std::vector<BandDecision>> highs;  // [level-1][orientation]
};

namespace detail {

inline void require_fusable(const Image& i1, const Image& i2, const char* where) {
    if (!i1.same_shape(i2))
        throw Error(std::string(where) + ": source sizes differ: " + shape_string(i1) + " vs " +
                    shape_string(i2));
}

}  // namespace detail

inline FusionResult fuse_detailed(const Image& i1, const Image& i2, const FusionConfig& cfg) {
    detail::require_fusable(i1, i2, "fuse");
    cfg.validate();
    const WaveletBasis basis = basis_by_name(cfg.basis);
    const WaveletPyramid p1 = dwt2(i1, cfg.levels, basis);
    const WaveletPyramid p2 = dwt2(i2, cfg.levels, basis);

    FusionResult result;
    WaveletPyramid fused;
    BandFusion low = fuse_low_detailed(p1.low, p2.low, cfg);
    fused.low = std::move(low.fused);
    result.low = std::move(low.decision);
    for (std::size_t level = 1; level <= cfg.levels; ++level) {
        DetailBands bands;
        std::vector<BandDecision> decisions;
        for (Orientation o : kOrientations) {
            BandFusion h = fuse_high_detailed(p1.high(level, o), p2.high(level, o), cfg);
            bands[o] = std::move(h.fused);
            decisions.push_back(std::move(h.decision));
        }
        fused.highs.push_back(std::move(bands));
        result.highs.push_back(std::move(decisions));
    }
    result.fused = clamp_unit(idwt2(fused, basis, i1.width(), i1.height()));
    return result;
}

inline Image fuse(const Image& i1, const Image& i2, const FusionConfig& cfg) {
    return fuse_detailed(i1, i2, cfg).fused;
}

/// Abs-max selection of one coefficient pair (ties keep source 1).
inline double abs_max(double a, double b) { return std::abs(b) > std::abs(a) ? b : a; }

/// Plain wavelet fusion: averaged low band, coefficient-wise abs-max details.
inline Image fuse_dwt_baseline(const Image& i1, const Image& i2, const FusionConfig& cfg) {
    detail::require_fusable(i1, i2, "fuse_dwt_baseline");
    if (cfg.levels < 1) throw Error("fusion levels must be at least 1");
    const WaveletBasis basis = basis_by_name(cfg.basis);
    WaveletPyramid p1 = dwt2(i1, cfg.levels, basis);
    const WaveletPyramid p2 = dwt2(i2, cfg.levels, basis);
    for (std::size_t i = 0; i < p1.low.size(); ++i)
        p1.low.pixels()[i] = 0.5 * (p1.low.pixels()[i] + p2.low.pixels()[i]);
    for (std::size_t level = 1; level <= cfg.levels; ++level)
        for (Orientation o : kOrientations) {
            auto dst = p1.high(level, o).pixels();
            const auto src = p2.high(level, o).pixels();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = abs_max(dst[i], src[i]);
        }
    return clamp_unit(idwt2(p1, basis, i1.width(), i1.height()));
}

}  // namespace lrrfuse
