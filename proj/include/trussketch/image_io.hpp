#pragma once

#include <string>

#include "trussketch/image.hpp"

namespace trussketch::raster {

/// Loads a PNG or BMP file (detected by magic bytes) as RGB.
RgbImage load_image_rgb(const std::string& path);

/// Loads a PNG or BMP file and converts to grayscale.
/// RGB input uses luma 0.299 R + 0.587 G + 0.114 B.
GrayImage load_image_gray(const std::string& path);

std::uint8_t rgb_to_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

void save_png(const std::string& path, const GrayImage& img);
void save_png(const std::string& path, const RgbImage& img);
void save_bmp(const std::string& path, const RgbImage& img);

/// In-memory PNG encoding (deterministic byte stream).
std::string encode_png(const RgbImage& img);
std::string encode_png(const GrayImage& img);

}  // namespace trussketch::raster
