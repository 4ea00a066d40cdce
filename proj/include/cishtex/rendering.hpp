#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cishtex/clustering.hpp"
#include "cishtex/csv.hpp"
#include "cishtex/error.hpp"
#include "cishtex/imaging.hpp"
#include "cishtex/tiling.hpp"

namespace cishtex {

using Palette = std::vector<Rgb>;

/// Fixed 10-entry class palette; class k is always drawn in color k.
inline const Palette& default_palette() {
    static const Palette p = {
        {31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},   {148, 103, 189},
        {140, 86, 75},  {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207},
    };
    return p;
}

inline Rgb dim_background(const Rgb& p) {
    auto f = [](std::uint8_t v) { return static_cast<std::uint8_t>(std::lround(0.4 * v)); };
    return {f(p.r), f(p.g), f(p.b)};
}

/// Per-pixel class index (-1 = background) resolved by nearest tile center
/// among the tiles that contain the pixel; ties go to the earlier tile.
inline std::vector<int> class_index_map(int width, int height, std::span<const Tile> tiles,
                                        std::span<const int> labels) {
    if (tiles.size() != labels.size()) throw DimensionMismatch("labels do not align with tiles");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<int> cls(n, -1);
    std::vector<long long> best(n, std::numeric_limits<long long>::max());
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        const Tile& tile = tiles[t];
        tile.for_each_member([&](int x, int y) {
            if (x < 0 || y < 0 || x >= width || y >= height) return;
            const long long dx = x - tile.cx(), dy = y - tile.cy();
            const long long d2 = dx * dx + dy * dy;
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            if (d2 < best[i]) {
                best[i] = d2;
                cls[i] = labels[t];
            }
        });
    }
    return cls;
}

/// Class color over every covered pixel; everything else is the original
/// pixel at 40% brightness.
inline RasterImage render_class_map(const RasterImage& image, std::span<const Tile> tiles,
                                    std::span<const int> labels, const Palette& palette = default_palette()) {
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= palette.size())
            throw InvalidInput("label " + std::to_string(l) + " outside the palette");
    const auto cls = class_index_map(image.width(), image.height(), tiles, labels);
    RasterImage out = image;
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = cls[i] >= 0 ? palette[static_cast<std::size_t>(cls[i])] : dim_background(px[i]);
    return out;
}

/// Horizontal strip of `classes` square swatches, class 0 leftmost.
inline RasterImage render_legend(int classes, const Palette& palette = default_palette(), int swatch = 24) {
    if (classes < 1 || static_cast<std::size_t>(classes) > palette.size())
        throw InvalidInput("legend class count outside the palette");
    RasterImage out(classes * swatch, swatch, 1.0);
    for (int y = 0; y < swatch; ++y)
        for (int x = 0; x < classes * swatch; ++x) out.at(x, y) = palette[static_cast<std::size_t>(x / swatch)];
    return out;
}

/// Two-column (c, fpc) CSV, ascending c.
inline std::string render_fpc_curve(std::vector<SweepEntry> sweep) {
    if (sweep.empty()) throw InvalidInput("empty sweep");
    std::stable_sort(sweep.begin(), sweep.end(),
                     [](const SweepEntry& a, const SweepEntry& b) { return a.clusters < b.clusters; });
    std::string out = "c,fpc\n";
    for (const auto& e : sweep) out += std::to_string(e.clusters) + "," + csv::format_double(e.fpc) + "\n";
    return out;
}

}  // namespace cishtex
