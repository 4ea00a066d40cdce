#pragma once

// Synthetic texture rasters with known ground truth, used by the demo and the
// test suites.

#include <cstdint>
#include <random>

#include "cishtex/imaging.hpp"
#include "cishtex/random.hpp"

namespace cishtex::synthetic {

enum class Texture { Constant = 0, Checkerboard = 1, SaltAndPepper = 2 };

inline Rgb gray(std::uint8_t v) { return {v, v, v}; }

/// Region index of column x when the width is split into three vertical bands.
inline int three_band_region(int x, int width) { return static_cast<int>(3LL * x / width); }

/// Three vertical bands: constant gray, 1-px checkerboard, salt-and-pepper noise.
inline RasterImage three_texture_image(int width, int height, double pixel_size_um, std::uint64_t seed) {
    RasterImage img(width, height, pixel_size_um);
    std::mt19937_64 rng(seed);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            Rgb p;
            switch (static_cast<Texture>(three_band_region(x, width))) {
                case Texture::Constant: p = gray(128); break;
                case Texture::Checkerboard: p = gray((x + y) % 2 ? 192 : 64); break;
                case Texture::SaltAndPepper: {
                    const double u = uniform01(rng);
                    p = u < 0.25 ? gray(0) : u < 0.5 ? gray(255) : gray(128);
                    break;
                }
            }
            img.at(x, y) = p;
        }
    }
    return img;
}

}  // namespace cishtex::synthetic
