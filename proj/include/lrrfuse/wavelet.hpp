#pragma once

// Separable 2-D discrete wavelet transform built from lifting steps.
//
// Each 1-D pass splits a line into even/odd samples, applies the basis'
// lifting steps and scales the two halves. Odd-length lines are first
// extended by one mirrored sample so both halves have ceil(n/2) entries, and
// lifting neighbours that fall off either end are mirrored (half-sample
// symmetric). Because each lifting step is undone exactly by subtracting the
// same prediction, reconstruction is exact whatever the boundary rule.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "image.hpp"
#include "patch.hpp"

namespace lrrfuse {

/// target[n] += sum_k taps[k] * source[n + offset + k], where target/source
/// are the even and odd polyphase halves.
struct LiftingStep {
    bool updates_even = false;
    std::ptrdiff_t offset = 0;
    std::vector<double> taps;
};

struct WaveletBasis {
    std::string name;
    // Analysis filters in correlation form: low[n] = sum_k lowpass[k] * x[2n + lowpass_offset + k].
    std::vector<double> analysis_lowpass;
    std::vector<double> analysis_highpass;
    std::ptrdiff_t lowpass_offset = 0;
    std::ptrdiff_t highpass_offset = 0;
    // Orthogonal bases: a unit coefficient at index n synthesises the
    // filter placed at 2n + offset.
    std::vector<double> synthesis_lowpass;
    std::vector<double> synthesis_highpass;

    std::vector<LiftingStep> steps;
    double even_scale = 1.0;
    double odd_scale = 1.0;
};

inline WaveletBasis haar_basis() {
    const double r = 1.0 / std::numbers::sqrt2;
    WaveletBasis b;
    b.name = "haar";
    b.analysis_lowpass = {r, r};
    b.analysis_highpass = {-r, r};
    b.synthesis_lowpass = b.analysis_lowpass;
    b.synthesis_highpass = b.analysis_highpass;
    b.steps = {{false, 0, {-1.0}}, {true, 0, {0.5}}};
    b.even_scale = std::numbers::sqrt2;
    b.odd_scale = r;
    return b;
}

/// Daubechies 4-tap (two vanishing moments) via the Daubechies-Sweldens factorisation.
inline WaveletBasis db2_basis() {
    const double s3 = std::numbers::sqrt3;
    const double d = 4.0 * std::numbers::sqrt2;
    const std::vector<double> h{(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
    WaveletBasis b;
    b.name = "db2";
    b.analysis_lowpass = h;
    b.analysis_highpass = {-h[3], h[2], -h[1], h[0]};
    b.lowpass_offset = 0;
    b.highpass_offset = -2;
    b.synthesis_lowpass = b.analysis_lowpass;
    b.synthesis_highpass = b.analysis_highpass;
    b.steps = {
        {true, 0, {s3}},
        {false, -1, {-(s3 - 2) / 4, -s3 / 4}},
        {true, 1, {-1.0}},
    };
    b.even_scale = (s3 - 1) / std::numbers::sqrt2;
    b.odd_scale = (s3 + 1) / std::numbers::sqrt2;
    return b;
}

inline WaveletBasis basis_by_name(const std::string& name) {
    if (name == "haar") return haar_basis();
    if (name == "db2") return db2_basis();
    throw Error("unknown wavelet basis '" + name + "' (expected haar or db2)");
}

enum class Orientation { horizontal, vertical, diagonal };

inline constexpr std::array<Orientation, 3> kOrientations{
    Orientation::horizontal, Orientation::vertical, Orientation::diagonal};

inline const char* orientation_label(Orientation o) {
    switch (o) {
        case Orientation::horizontal: return "H";
        case Orientation::vertical: return "V";
        case Orientation::diagonal: return "D";
    }
    return "?";
}

/// The three detail bands of one level.
/// horizontal: highpass along x (responds to variation across columns),
/// vertical: highpass along y, diagonal: highpass along both.
struct DetailBands {
    Band horizontal;
    Band vertical;
    Band diagonal;

    [[nodiscard]] const Band& operator[](Orientation o) const {
        switch (o) {
            case Orientation::horizontal: return horizontal;
            case Orientation::vertical: return vertical;
            default: return diagonal;
        }
    }
    [[nodiscard]] Band& operator[](Orientation o) {
        return const_cast<Band&>(std::as_const(*this)[o]);
    }
};

/// highs[0] is level 1 (finest); low is the approximation after the last level.
struct WaveletPyramid {
    Band low;
    std::vector<DetailBands> highs;

    [[nodiscard]] std::size_t levels() const noexcept { return highs.size(); }
    [[nodiscard]] const Band& high(std::size_t level, Orientation o) const {
        return highs.at(level - 1)[o];
    }
    [[nodiscard]] Band& high(std::size_t level, Orientation o) { return highs.at(level - 1)[o]; }
};

[[nodiscard]] constexpr std::size_t half_length(std::size_t n) noexcept { return (n + 1) / 2; }

namespace detail {

inline void apply_lifting(const LiftingStep& step, std::span<double> even,
                          std::span<double> odd, double sign) {
    std::span<double> target = step.updates_even ? even : odd;
    std::span<const double> source = step.updates_even ? odd : even;
    const std::size_t m = source.size();
    for (std::size_t n = 0; n < target.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < step.taps.size(); ++k) {
            const auto idx = static_cast<std::int64_t>(n) + step.offset +
                             static_cast<std::int64_t>(k);
            acc += step.taps[k] * source[reflect_index(idx, m)];
        }
        target[n] += sign * acc;
    }
}

/// Forward 1-D pass. `low` and `high` must have half_length(in.size()) entries.
inline void forward_line(const WaveletBasis& basis, std::span<const double> in,
                         std::span<double> low, std::span<double> high) {
    const std::size_t n = in.size();
    const std::size_t m = half_length(n);
    for (std::size_t i = 0; i < m; ++i) {
        low[i] = in[2 * i];
        high[i] = 2 * i + 1 < n ? in[2 * i + 1] : in[n - 1];
    }
    for (const LiftingStep& s : basis.steps) apply_lifting(s, low, high, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        low[i] *= basis.even_scale;
        high[i] *= basis.odd_scale;
    }
}

/// Inverse 1-D pass; writes out.size() samples (the odd-length tail is cropped).
inline void inverse_line(const WaveletBasis& basis, std::span<const double> low,
                         std::span<const double> high, std::span<double> out,
                         std::vector<double>& scratch) {
    const std::size_t m = low.size();
    scratch.resize(2 * m);
    std::span<double> even(scratch.data(), m);
    std::span<double> odd(scratch.data() + m, m);
    for (std::size_t i = 0; i < m; ++i) {
        even[i] = low[i] / basis.even_scale;
        odd[i] = high[i] / basis.odd_scale;
    }
    for (auto it = basis.steps.rbegin(); it != basis.steps.rend(); ++it)
        apply_lifting(*it, even, odd, -1.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (i % 2 == 0) ? even[i / 2] : odd[i / 2];
}

struct Quad {
    Band ll, hl, lh, hh;  // hl: high along x, low along y
};

inline Quad forward_2d(const WaveletBasis& basis, const Band& in) {
    const std::size_t w = in.width(), h = in.height();
    const std::size_t hw = half_length(w), hh = half_length(h);
    Band rows_low(hw, h), rows_high(hw, h);
    for (std::size_t y = 0; y < h; ++y)
        forward_line(basis, in.row(y), rows_low.row(y), rows_high.row(y));

    Quad q{Band(hw, hh), Band(hw, hh), Band(hw, hh), Band(hw, hh)};
    std::vector<double> column(h), lo(hh), hi(hh);
    auto split_columns = [&](const Band& src, Band& dst_low, Band& dst_high) {
        for (std::size_t x = 0; x < hw; ++x) {
            for (std::size_t y = 0; y < h; ++y) column[y] = src(x, y);
            forward_line(basis, column, lo, hi);
            for (std::size_t y = 0; y < hh; ++y) {
                dst_low(x, y) = lo[y];
                dst_high(x, y) = hi[y];
            }
        }
    };
    split_columns(rows_low, q.ll, q.lh);
    split_columns(rows_high, q.hl, q.hh);
    return q;
}

inline Band inverse_2d(const WaveletBasis& basis, const Band& ll, const Band& hl,
                       const Band& lh, const Band& hh, std::size_t w, std::size_t h) {
    const std::size_t hw = ll.width();
    const std::size_t half_h = ll.height();
    Band rows_low(hw, h), rows_high(hw, h);
    std::vector<double> lo(half_h), hi(half_h), column(h), scratch;
    auto merge_columns = [&](const Band& src_low, const Band& src_high, Band& dst) {
        for (std::size_t x = 0; x < hw; ++x) {
            for (std::size_t y = 0; y < half_h; ++y) {
                lo[y] = src_low(x, y);
                hi[y] = src_high(x, y);
            }
            inverse_line(basis, lo, hi, column, scratch);
            for (std::size_t y = 0; y < h; ++y) dst(x, y) = column[y];
        }
    };
    merge_columns(ll, lh, rows_low);
    merge_columns(hl, hh, rows_high);

    Band out(w, h);
    for (std::size_t y = 0; y < h; ++y)
        inverse_line(basis, rows_low.row(y), rows_high.row(y), out.row(y), scratch);
    return out;
}

}  // namespace detail

/// Multi-level forward transform; the low band is decomposed recursively.
inline WaveletPyramid dwt2(const Image& img, std::size_t levels, const WaveletBasis& basis) {
    if (levels < 1) throw Error("wavelet levels must be at least 1");
    const std::size_t min_side = std::size_t{1} << levels;
    if (img.width() < min_side || img.height() < min_side)
        throw Error("image " + shape_string(img) + " is too small for " +
                    std::to_string(levels) + " wavelet levels (need at least " +
                    std::to_string(min_side) + " per side)");
    WaveletPyramid pyr;
    Band current = retag<BandTag>(img);
    for (std::size_t level = 0; level < levels; ++level) {
        detail::Quad q = detail::forward_2d(basis, current);
        pyr.highs.push_back({std::move(q.hl), std::move(q.lh), std::move(q.hh)});
        current = std::move(q.ll);
    }
    pyr.low = std::move(current);
    return pyr;
}

/// Inverse of dwt2 for an original image of out_width x out_height.
/// Values are not clamped.
inline Image idwt2(const WaveletPyramid& pyr, const WaveletBasis& basis, std::size_t out_width,
                   std::size_t out_height) {
    const std::size_t levels = pyr.levels();
    if (levels < 1) throw Error("wavelet pyramid has no levels");
    std::vector<std::size_t> widths{out_width}, heights{out_height};
    for (std::size_t i = 0; i < levels; ++i) {
        widths.push_back(half_length(widths.back()));
        heights.push_back(half_length(heights.back()));
    }
    auto check = [&](const Band& b, std::size_t level, const char* what) {
        if (b.width() != widths[level] || b.height() != heights[level])
            throw Error(std::string("wavelet pyramid ") + what + " band at level " +
                        std::to_string(level) + " is " + shape_string(b) + ", expected " +
                        shape_string(widths[level], heights[level]) + " for output " +
                        shape_string(out_width, out_height));
    };
    check(pyr.low, levels, "low");
    for (std::size_t level = 1; level <= levels; ++level)
        for (Orientation o : kOrientations) check(pyr.high(level, o), level, orientation_label(o));

    Band current = pyr.low;
    for (std::size_t level = levels; level >= 1; --level) {
        const DetailBands& d = pyr.highs[level - 1];
        current = detail::inverse_2d(basis, current, d.horizontal, d.vertical, d.diagonal,
                                     widths[level - 1], heights[level - 1]);
    }
    return retag<ImageTag>(current);
}

}  // namespace lrrfuse
