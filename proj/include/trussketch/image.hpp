#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "trussketch/geometry.hpp"

namespace trussketch::raster {

/// 8-bit grayscale raster, row major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be positive");
    }

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// 8-bit RGB raster, row major, 3 bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3) {
        if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be positive");
        for (std::size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    std::uint8_t* px(int x, int y) { return &data[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* px(int x, int y) const {
        return &data[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = px(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
};

/// Binary pixel grid; nonzero = foreground ink.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryImage() = default;
    BinaryImage(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {
        if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be positive");
    }

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    /// Foreground test with out-of-bounds treated as background.
    bool fg(int x, int y) const { return in_bounds(x, y) && at(x, y); }

    std::size_t count_foreground() const {
        std::size_t n = 0;
        for (auto v : data) n += (v != 0);
        return n;
    }

    BinaryImage complement() const {
        BinaryImage out(width, height);
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] ? 0 : 1;
        return out;
    }

    friend bool operator==(const BinaryImage& a, const BinaryImage& b) {
        if (a.width != b.width || a.height != b.height) return false;
        for (std::size_t i = 0; i < a.data.size(); ++i)
            if ((a.data[i] != 0) != (b.data[i] != 0)) return false;
        return true;
    }
};

/// Structuring element: a set of integer offsets around the origin.
struct StructuringElement {
    std::vector<Point2i> offsets;

    bool contains_origin() const {
        for (const auto& o : offsets)
            if (o.x == 0 && o.y == 0) return true;
        return false;
    }

    StructuringElement reflected() const {
        StructuringElement r;
        r.offsets.reserve(offsets.size());
        for (const auto& o : offsets) r.offsets.push_back({-o.x, -o.y});
        return r;
    }
};

/// Disk element: every offset with dx^2 + dy^2 <= r^2.
StructuringElement disk_se(double radius);

/// Ink (0) on white (255) conversion helpers.
GrayImage binary_to_gray(const BinaryImage& img);
RgbImage gray_to_rgb(const GrayImage& img);

}  // namespace trussketch::raster
