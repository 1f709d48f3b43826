#pragma once

#include <string_view>
#include <vector>

#include "trussketch/image.hpp"

namespace trussketch::draw {

using raster::BinaryImage;
using raster::RgbImage;

void disk(BinaryImage& img, Vec2 center, double radius);

/// Thick line with round caps: every pixel within pen_radius of the segment.
void capsule(BinaryImage& img, Vec2 a, Vec2 b, double pen_radius);

void polyline(BinaryImage& img, const std::vector<Vec2>& points, double pen_radius);

/// Filled convex polygon (used for triangles and arrow heads).
void filled_polygon(BinaryImage& img, const std::vector<Vec2>& corners);

/// Solid arrow: round-capped shaft plus a filled triangular head ending at
/// the tip.
void arrow(BinaryImage& img, Vec2 tail, Vec2 tip, double shaft_pen_radius, double head_length,
           double head_half_width);

/// Renders text with the built-in stroke font. `origin` is the left end of
/// the baseline; `angle_deg` rotates the whole string about the origin
/// (mathematical convention: counter-clockwise with y up, which is
/// clockwise in image coordinates). Returns the advance in pixels.
double text(BinaryImage& img, std::string_view s, Vec2 origin, double font_px,
            double angle_deg = 0.0);

/// Bounding box (in image coordinates) the call above would ink.
struct Box {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool intersects(const Box& o) const {
        return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
    }
};
Box text_box(std::string_view s, Vec2 origin, double font_px, double angle_deg = 0.0);

// RGB overlay drawing.
void rgb_disk(RgbImage& img, Vec2 center, double radius, const std::uint8_t rgb[3]);
void rgb_circle(RgbImage& img, Vec2 center, double radius, double pen, const std::uint8_t rgb[3]);
void rgb_capsule(RgbImage& img, Vec2 a, Vec2 b, double pen_radius, const std::uint8_t rgb[3]);
void rgb_stamp(RgbImage& img, const BinaryImage& mask, const std::uint8_t rgb[3]);

}  // namespace trussketch::draw
