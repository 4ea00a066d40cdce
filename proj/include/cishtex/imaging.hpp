#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cishtex/error.hpp"

namespace cishtex {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Flat 8-bit RGB raster with its physical sampling (micrometres per pixel).
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(int width, int height, double pixel_size_um = 0.5)
        : RasterImage(width, height, std::vector<Rgb>(static_cast<std::size_t>(width) * height),
                      pixel_size_um) {}

    RasterImage(int width, int height, std::vector<Rgb> pixels, double pixel_size_um = 0.5)
        : width_(width), height_(height), pixel_size_um_(pixel_size_um), pixels_(std::move(pixels)) {
        if (width < 0 || height < 0)
            throw InvalidInput("negative image dimensions");
        if (pixels_.size() != static_cast<std::size_t>(width) * height)
            throw DimensionMismatch("pixel buffer does not match width x height");
        if (!(pixel_size_um > 0.0) || !std::isfinite(pixel_size_um))
            throw InvalidInput("pixel_size_um must be positive");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double pixel_size_um() const noexcept { return pixel_size_um_; }
    double width_um() const noexcept { return width_ * pixel_size_um_; }
    double height_um() const noexcept { return height_ * pixel_size_um_; }

    const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
    Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    double pixel_size_um_ = 0.5;
    std::vector<Rgb> pixels_;
};

/// Per-pixel tissue selection. Only `inside` pixels are ever measured.
class TissueMask {
public:
    TissueMask() = default;

    TissueMask(int width, int height, bool fill)
        : width_(width), height_(height),
          inside_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

    TissueMask(int width, int height, std::vector<std::uint8_t> inside)
        : width_(width), height_(height), inside_(std::move(inside)) {
        if (inside_.size() != static_cast<std::size_t>(width) * height)
            throw DimensionMismatch("mask buffer does not match width x height");
        for (auto& v : inside_) v = v ? 1 : 0;
    }

    /// Default selection: every pixel of `image` is tissue.
    static TissueMask all_inside(const RasterImage& image) {
        return TissueMask(image.width(), image.height(), true);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool inside(int x, int y) const {
        return inside_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v) {
        inside_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
    }

    std::size_t count_inside() const {
        return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), 1));
    }

    bool matches(const RasterImage& image) const {
        return width_ == image.width() && height_ == image.height();
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> inside_;
};

struct Hsb {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double b = 0.0;  // [0, 1]
};

/// Hexcone conversion; brightness is max(r,g,b)/255 and achromatic hue is 0.
inline Hsb rgb_to_hsb(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int delta = mx - mn;

    Hsb out;
    out.b = mx / 255.0;
    out.s = mx == 0 ? 0.0 : static_cast<double>(delta) / mx;
    if (delta == 0) return out;

    double h;
    if (mx == r)
        h = 60.0 * static_cast<double>(g - b) / delta;
    else if (mx == g)
        h = 60.0 * (static_cast<double>(b - r) / delta + 2.0);
    else
        h = 60.0 * (static_cast<double>(r - g) / delta + 4.0);
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

inline Rgb hsb_to_rgb(const Hsb& hsb) {
    const double c = hsb.b * hsb.s;
    const double hp = hsb.h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r1 = 0, g1 = 0, b1 = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r1 = c; g1 = x; break;
        case 1: r1 = x; g1 = c; break;
        case 2: g1 = c; b1 = x; break;
        case 3: g1 = x; b1 = c; break;
        case 4: r1 = x; b1 = c; break;
        default: r1 = c; b1 = x; break;
    }
    const double m = hsb.b - c;
    auto to8 = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
    };
    return {to8(r1 + m), to8(g1 + m), to8(b1 + m)};
}

enum class Channel { Brightness, Saturation };

inline const char* channel_name(Channel c) {
    return c == Channel::Brightness ? "Brightness" : "Saturation";
}

/// One HSB channel quantized into `gray_levels` bins.
struct ChannelPlane {
    Channel channel = Channel::Brightness;
    int gray_levels = 127;
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> levels;

    int at(int x, int y) const { return levels[static_cast<std::size_t>(y) * width + x]; }
};

/// level = min(floor(value * G), G - 1)
inline int quantize_value(double value, int gray_levels) {
    const auto lvl = static_cast<long>(std::floor(value * gray_levels));
    return static_cast<int>(std::clamp(lvl, 0L, static_cast<long>(gray_levels - 1)));
}

inline void check_gray_levels(int gray_levels) {
    if (gray_levels < 2 || gray_levels > 65536)
        throw InvalidBinCount("gray level count must lie in [2, 65536], got " +
                              std::to_string(gray_levels));
}

inline ChannelPlane quantize_channel(const RasterImage& image, Channel channel, int gray_levels) {
    check_gray_levels(gray_levels);
    ChannelPlane plane;
    plane.channel = channel;
    plane.gray_levels = gray_levels;
    plane.width = image.width();
    plane.height = image.height();
    plane.levels.resize(image.pixels().size());

    // 256^3 inputs collapse to at most 256 distinct values per channel; memoize
    // by the (max, min) pair which fully determines both S and B.
    std::vector<int> lut(256 * 256, -1);
    auto px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const auto& p = px[i];
        const int mx = std::max({p.r, p.g, p.b});
        const int mn = std::min({p.r, p.g, p.b});
        int& cached = lut[mx * 256 + mn];
        if (cached < 0) {
            const Hsb hsb = rgb_to_hsb(static_cast<std::uint8_t>(mx), static_cast<std::uint8_t>(mn),
                                       static_cast<std::uint8_t>(mn));
            cached = quantize_value(channel == Channel::Brightness ? hsb.b : hsb.s, gray_levels);
        }
        plane.levels[i] = static_cast<std::uint16_t>(cached);
    }
    return plane;
}

}  // namespace cishtex
