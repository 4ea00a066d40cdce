#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cishtex/error.hpp"
#include "cishtex/fileio.hpp"
#include "cishtex/imaging.hpp"

namespace cishtex {

/// Decoded raster before it becomes a RasterImage: 8-bit samples, 1..4 channels.
struct DecodedRaster {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;  // row-major, interleaved
};

namespace detail {

inline bool is_png(std::span<const std::uint8_t> bytes) {
    static constexpr std::array<std::uint8_t, 8> sig = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= sig.size() && std::equal(sig.begin(), sig.end(), bytes.begin());
}

inline bool is_tiff(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) return false;
    return (bytes[0] == 'I' && bytes[1] == 'I' && bytes[2] == 42 && bytes[3] == 0) ||
           (bytes[0] == 'M' && bytes[1] == 'M' && bytes[2] == 0 && bytes[3] == 42);
}

inline DecodedRaster decode_png(std::span<const std::uint8_t> bytes, const std::string& label) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw UnreadableFile(label + ": " + image.message);
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw UnsupportedBitDepth(label + ": 16-bit PNG channels are not supported");
    }
    // Read with alpha so that transparent pixels are not composited; alpha is
    // dropped by the caller.
    image.format = PNG_FORMAT_RGBA;
    DecodedRaster out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.channels = 4;
    out.samples.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.samples.data(), 0, nullptr))
        throw UnreadableFile(label + ": " + image.message);
    return out;
}

class TiffReader {
public:
    TiffReader(std::span<const std::uint8_t> bytes, std::string label)
        : bytes_(bytes), label_(std::move(label)), little_(bytes[0] == 'I') {}

    DecodedRaster decode() {
        const std::uint32_t ifd = u32(4);
        const std::uint16_t n = u16(ifd);
        std::uint32_t width = 0, height = 0, compression = 1, photometric = 2, spp = 1,
                      planar = 1, rows_per_strip = 0;
        std::vector<std::uint32_t> bits, strip_offsets, strip_counts;
        for (std::uint16_t i = 0; i < n; ++i) {
            const std::size_t e = ifd + 2 + 12u * i;
            const std::uint16_t tag = u16(e);
            switch (tag) {
                case 256: width = scalar(e); break;
                case 257: height = scalar(e); break;
                case 258: bits = array(e); break;
                case 259: compression = scalar(e); break;
                case 262: photometric = scalar(e); break;
                case 273: strip_offsets = array(e); break;
                case 277: spp = scalar(e); break;
                case 278: rows_per_strip = scalar(e); break;
                case 279: strip_counts = array(e); break;
                case 284: planar = scalar(e); break;
                default: break;
            }
        }
        (void)rows_per_strip;
        if (bits.empty()) bits.push_back(1);
        for (auto b : bits)
            if (b != 8)
                throw UnsupportedBitDepth(label_ + ": " + std::to_string(b) +
                                          "-bit TIFF samples are not supported");
        if (compression != 1) throw UnreadableFile(label_ + ": only uncompressed TIFF is supported");
        if (planar != 1) throw UnreadableFile(label_ + ": planar TIFF is not supported");
        if (photometric > 2) throw UnreadableFile(label_ + ": unsupported photometric interpretation");
        if (spp < 1 || spp > 4) throw UnreadableFile(label_ + ": unsupported samples per pixel");
        if (strip_offsets.empty() || strip_offsets.size() != strip_counts.size())
            throw UnreadableFile(label_ + ": missing strip tables");

        DecodedRaster out;
        out.width = static_cast<int>(width);
        out.height = static_cast<int>(height);
        out.channels = static_cast<int>(spp);
        const std::size_t need = static_cast<std::size_t>(width) * height * spp;
        out.samples.reserve(need);
        for (std::size_t s = 0; s < strip_offsets.size() && out.samples.size() < need; ++s) {
            const std::size_t off = strip_offsets[s];
            const std::size_t cnt = std::min<std::size_t>(strip_counts[s], need - out.samples.size());
            if (off + cnt > bytes_.size()) throw UnreadableFile(label_ + ": truncated strip");
            out.samples.insert(out.samples.end(), bytes_.begin() + off, bytes_.begin() + off + cnt);
        }
        if (out.samples.size() != need) throw UnreadableFile(label_ + ": truncated image data");
        if (photometric == 0)
            for (auto& v : out.samples) v = static_cast<std::uint8_t>(255 - v);
        return out;
    }

private:
    void need(std::size_t off, std::size_t len) const {
        if (off + len > bytes_.size()) throw UnreadableFile(label_ + ": truncated TIFF");
    }
    std::uint16_t u16(std::size_t off) const {
        need(off, 2);
        return little_ ? static_cast<std::uint16_t>(bytes_[off] | bytes_[off + 1] << 8)
                       : static_cast<std::uint16_t>(bytes_[off] << 8 | bytes_[off + 1]);
    }
    std::uint32_t u32(std::size_t off) const {
        need(off, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint32_t b = bytes_[off + (little_ ? i : 3 - i)];
            v |= b << (8 * i);
        }
        return v;
    }
    std::vector<std::uint32_t> array(std::size_t entry) const {
        const std::uint16_t type = u16(entry + 2);
        const std::uint32_t count = u32(entry + 4);
        const std::size_t width = type == 3 ? 2 : type == 4 ? 4 : type == 1 ? 1 : 0;
        if (width == 0) throw UnreadableFile(label_ + ": unsupported TIFF field type");
        const std::size_t base = width * count <= 4 ? entry + 8 : u32(entry + 8);
        std::vector<std::uint32_t> out(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            const std::size_t off = base + width * i;
            out[i] = width == 2 ? u16(off) : width == 4 ? u32(off) : (need(off, 1), bytes_[off]);
        }
        return out;
    }
    std::uint32_t scalar(std::size_t entry) const {
        auto v = array(entry);
        if (v.empty()) throw UnreadableFile(label_ + ": empty TIFF field");
        return v.front();
    }

    std::span<const std::uint8_t> bytes_;
    std::string label_;
    bool little_;
};

inline DecodedRaster decode_any(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    const std::string label = path.string();
    if (is_png(bytes)) return decode_png(bytes, label);
    if (is_tiff(bytes)) return TiffReader(bytes, label).decode();
    throw UnreadableFile(label + ": not a PNG or TIFF file");
}

inline Rgb decoded_rgb(const DecodedRaster& d, std::size_t i) {
    const auto* s = &d.samples[i * d.channels];
    if (d.channels < 3) return {s[0], s[0], s[0]};
    return {s[0], s[1], s[2]};
}

}  // namespace detail

/// Reads an 8-bit PNG or uncompressed TIFF; grayscale is expanded to RGB and
/// alpha is discarded.
inline RasterImage load_image(const std::filesystem::path& path, double pixel_size_um = 0.5) {
    const auto d = detail::decode_any(path);
    std::vector<Rgb> pixels(static_cast<std::size_t>(d.width) * d.height);
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = detail::decoded_rgb(d, i);
    return RasterImage(d.width, d.height, std::move(pixels), pixel_size_um);
}

/// Nonzero mask pixels are tissue. Without a path every pixel is tissue.
inline TissueMask load_mask(const std::optional<std::filesystem::path>& path,
                            const RasterImage& image) {
    if (!path) return TissueMask::all_inside(image);
    const auto d = detail::decode_any(*path);
    if (d.width != image.width() || d.height != image.height())
        throw DimensionMismatch("mask is " + std::to_string(d.width) + "x" + std::to_string(d.height) +
                                " but image is " + std::to_string(image.width()) + "x" +
                                std::to_string(image.height()));
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(d.width) * d.height);
    const int color = std::min(d.channels, 3);
    for (std::size_t i = 0; i < inside.size(); ++i) {
        bool any = false;
        for (int c = 0; c < color; ++c) any = any || d.samples[i * d.channels + c] != 0;
        inside[i] = any ? 1 : 0;
    }
    return TissueMask(d.width, d.height, std::move(inside));
}

/// 8-bit PNG encoding. Output is a pure function of the input samples.
inline std::vector<std::uint8_t> encode_png(int width, int height, int channels,
                                            std::span<const std::uint8_t> samples) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    switch (channels) {
        case 1: image.format = PNG_FORMAT_GRAY; break;
        case 3: image.format = PNG_FORMAT_RGB; break;
        case 4: image.format = PNG_FORMAT_RGBA; break;
        default: throw InvalidInput("unsupported PNG channel count");
    }
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, samples.data(), 0, nullptr))
        throw UnreadableFile(std::string("PNG encode failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, samples.data(), 0, nullptr))
        throw UnreadableFile(std::string("PNG encode failed: ") + image.message);
    out.resize(size);
    return out;
}

inline std::vector<std::uint8_t> encode_png(const RasterImage& image) {
    std::vector<std::uint8_t> samples;
    samples.reserve(image.pixels().size() * 3);
    for (const auto& p : image.pixels()) {
        samples.push_back(p.r);
        samples.push_back(p.g);
        samples.push_back(p.b);
    }
    if (samples.empty()) throw InvalidInput("cannot encode an empty image");
    return encode_png(image.width(), image.height(), 3, samples);
}

inline void save_png(const std::filesystem::path& path, const RasterImage& image) {
    write_file_atomic(path, encode_png(image));
}

}  // namespace cishtex
