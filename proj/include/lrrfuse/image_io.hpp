#pragma once

// Grayscale raster I/O: binary/ASCII PGM and 8-bit PNG (through libpng).
// Colour input is collapsed to luminance 0.299 R + 0.587 G + 0.114 B.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "image.hpp"

namespace lrrfuse {

namespace detail {

inline std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

inline double luminance(unsigned r, unsigned g, unsigned b) {
    // Integer weights keep white at exactly 1.0.
    return static_cast<double>(299U * r + 587U * g + 114U * b) / 255000.0;
}

inline std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

class PgmReader {
public:
    PgmReader(const std::vector<unsigned char>& bytes, std::string path)
        : bytes_{bytes}, path_{std::move(path)} {}

    Image read() {
        const bool binary = bytes_[1] == '5';
        pos_ = 2;
        const std::size_t width = next_int();
        const std::size_t height = next_int();
        const std::size_t maxval = next_int();
        if (width == 0 || height == 0) fail("zero-dimension image");
        if (maxval == 0 || maxval > 255) fail("only 8-bit PGM is supported");
        std::vector<double> data(width * height);
        if (binary) {
            ++pos_;  // single whitespace byte after maxval
            if (bytes_.size() < pos_ + data.size()) fail("truncated pixel data");
            for (std::size_t i = 0; i < data.size(); ++i)
                data[i] = static_cast<double>(bytes_[pos_ + i]) / static_cast<double>(maxval);
        } else {
            for (double& v : data) {
                const std::size_t s = next_int();
                if (s > maxval) fail("sample exceeds maxval");
                v = static_cast<double>(s) / static_cast<double>(maxval);
            }
        }
        return Image(width, height, std::move(data));
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(path_ + ": " + what);
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t next_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("malformed PGM header");
        std::size_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            if (v > (1U << 24)) fail("PGM value out of range");
            ++pos_;
        }
        return v;
    }

    const std::vector<unsigned char>& bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline Image read_png(const std::string& path) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw Error(path + ": " + png.message);
    if (png.width == 0 || png.height == 0) {
        png_image_free(&png);
        throw Error(path + ": zero-dimension image");
    }
    const bool colour = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const bool alpha = (png.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    if (colour)
        png.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    else
        png.format = alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY;
    const std::size_t channels = PNG_IMAGE_PIXEL_CHANNELS(png.format);
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw Error(path + ": " + msg);
    }
    const std::size_t n = static_cast<std::size_t>(png.width) * png.height;
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* px = &buffer[i * channels];
        data[i] = colour ? luminance(px[0], px[1], px[2]) : px[0] / 255.0;
    }
    return Image(png.width, png.height, std::move(data));
}

inline void write_png(const Image& img, const std::string& path) {
    std::vector<unsigned char> bytes(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), bytes.begin(), quantize);
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr))
        throw Error(path + ": " + png.message);
}

inline void write_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    for (double v : img.pixels()) out.put(static_cast<char>(quantize(v)));
    if (!out) throw Error(path + ": write failed");
}

}  // namespace detail

/// Load a PGM (P2/P5) or 8-bit PNG as a grayscale image in [0,1].
inline Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path + ": cannot open for reading");
    std::vector<unsigned char> head(8);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    if (head.size() >= 8 && png_sig_cmp(head.data(), 0, 8) == 0) {
        in.close();
        return detail::read_png(path);
    }
    if (head.size() >= 2 && head[0] == 'P' && (head[1] == '2' || head[1] == '5')) {
        in.seekg(0);
        const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                               std::istreambuf_iterator<char>()};
        return detail::PgmReader(bytes, path).read();
    }
    throw Error(path + ": unsupported image format (expected PGM or PNG)");
}

/// Write 8-bit grayscale; the format follows the extension (.png or .pgm).
inline void save_image(const Image& img, const std::string& path) {
    const std::string ext = detail::lower_extension(path);
    if (ext == ".png")
        detail::write_png(img, path);
    else if (ext == ".pgm")
        detail::write_pgm(img, path);
    else
        throw Error(path + ": unsupported output extension '" + ext + "' (use .png or .pgm)");
}

}  // namespace lrrfuse
