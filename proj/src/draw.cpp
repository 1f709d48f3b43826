#include "trussketch/draw.hpp"

#include <algorithm>
#include <cmath>

#include "trussketch/font.hpp"

namespace trussketch::draw {

namespace {

double point_segment_dist2(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = ab.dot(ab);
    double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Vec2 c = a + ab * t;
    return (p - c).dot(p - c);
}

template <typename F>
void for_box(const BinaryImage& img, double min_x, double min_y, double max_x, double max_y,
             F&& f) {
    int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
    int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
    int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(max_x)));
    int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(max_y)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) f(x, y);
}

}  // namespace

void disk(BinaryImage& img, Vec2 c, double radius) {
    double r2 = radius * radius;
    for_box(img, c.x - radius, c.y - radius, c.x + radius, c.y + radius, [&](int x, int y) {
        double dx = x - c.x, dy = y - c.y;
        if (dx * dx + dy * dy <= r2) img.set(x, y, true);
    });
}

void capsule(BinaryImage& img, Vec2 a, Vec2 b, double pen_radius) {
    double r2 = pen_radius * pen_radius;
    for_box(img, std::min(a.x, b.x) - pen_radius, std::min(a.y, b.y) - pen_radius,
            std::max(a.x, b.x) + pen_radius, std::max(a.y, b.y) + pen_radius, [&](int x, int y) {
                if (point_segment_dist2({double(x), double(y)}, a, b) <= r2) img.set(x, y, true);
            });
}

void polyline(BinaryImage& img, const std::vector<Vec2>& pts, double pen_radius) {
    if (pts.size() == 1) {
        disk(img, pts[0], pen_radius);
        return;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) capsule(img, pts[i], pts[i + 1], pen_radius);
}

void filled_polygon(BinaryImage& img, const std::vector<Vec2>& corners) {
    if (corners.size() < 3) return;
    double min_x = corners[0].x, max_x = corners[0].x, min_y = corners[0].y, max_y = corners[0].y;
    for (const auto& c : corners) {
        min_x = std::min(min_x, c.x);
        max_x = std::max(max_x, c.x);
        min_y = std::min(min_y, c.y);
        max_y = std::max(max_y, c.y);
    }
    // even-odd scan test at pixel centers
    for_box(img, min_x, min_y, max_x, max_y, [&](int x, int y) {
        double px = x, py = y;
        bool inside = false;
        std::size_t n = corners.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = corners[i];
            const Vec2& b = corners[j];
            if ((a.y > py) != (b.y > py)) {
                double t = (py - a.y) / (b.y - a.y);
                if (px < a.x + t * (b.x - a.x)) inside = !inside;
            }
        }
        if (inside) img.set(x, y, true);
    });
}

void arrow(BinaryImage& img, Vec2 tail, Vec2 tip, double shaft_pen_radius, double head_length,
           double head_half_width) {
    Vec2 dir = (tip - tail).normalized();
    Vec2 perp{-dir.y, dir.x};
    Vec2 head_base = tip - dir * head_length;
    capsule(img, tail, head_base, shaft_pen_radius);
    filled_polygon(img, {tip, head_base + perp * head_half_width,
                         head_base - perp * head_half_width});
}

namespace {

// Strokes for one character at `origin` (baseline-left), rotated by
// angle_deg (counter-clockwise, y up -> clockwise in image rows).
void glyph_strokes(std::vector<std::vector<Vec2>>& out, const font::Glyph& g, Vec2 origin,
                   double scale, double cos_a, double sin_a) {
    for (const auto& stroke : g.strokes) {
        std::vector<Vec2> pts;
        pts.reserve(stroke.size());
        for (const auto& p : stroke) {
            // em coordinates: x right, y down with baseline at 21
            double ex = p.x * scale;
            double ey = (p.y - 21.0) * scale;
            pts.push_back({origin.x + ex * cos_a + ey * sin_a,
                           origin.y - ex * sin_a + ey * cos_a});
        }
        out.push_back(std::move(pts));
    }
}

}  // namespace

double text(BinaryImage& img, std::string_view s, Vec2 origin, double font_px, double angle_deg) {
    double scale = font_px / 24.0;
    // Optical floor: small sizes render slightly bold so strokes stay
    // legible through binarization and rotation.
    double pen = font::pen_radius(font_px);
    double rad = deg_to_rad(angle_deg);
    double cos_a = std::cos(rad), sin_a = std::sin(rad);
    double adv = 0;
    for (char c : s) {
        const font::Glyph* g = font::find_glyph(c);
        if (g) {
            Vec2 pos{origin.x + adv * cos_a, origin.y - adv * sin_a};
            std::vector<std::vector<Vec2>> strokes;
            glyph_strokes(strokes, *g, pos, scale, cos_a, sin_a);
            for (const auto& st : strokes) polyline(img, st, pen);
        }
        adv += font::advance(c, font_px);
    }
    return adv;
}

Box text_box(std::string_view s, Vec2 origin, double font_px, double angle_deg) {
    double scale = font_px / 24.0;
    double pen = font::pen_radius(font_px);
    double rad = deg_to_rad(angle_deg);
    double cos_a = std::cos(rad), sin_a = std::sin(rad);
    Box box{origin.x, origin.y, origin.x, origin.y};
    double adv = 0;
    bool any = false;
    for (char c : s) {
        const font::Glyph* g = font::find_glyph(c);
        if (g) {
            Vec2 pos{origin.x + adv * cos_a, origin.y - adv * sin_a};
            std::vector<std::vector<Vec2>> strokes;
            glyph_strokes(strokes, *g, pos, scale, cos_a, sin_a);
            for (const auto& st : strokes)
                for (const auto& p : st) {
                    if (!any) {
                        box = {p.x, p.y, p.x, p.y};
                        any = true;
                    }
                    box.min_x = std::min(box.min_x, p.x);
                    box.max_x = std::max(box.max_x, p.x);
                    box.min_y = std::min(box.min_y, p.y);
                    box.max_y = std::max(box.max_y, p.y);
                }
        }
        adv += font::advance(c, font_px);
    }
    box.min_x -= pen;
    box.min_y -= pen;
    box.max_x += pen;
    box.max_y += pen;
    return box;
}

void rgb_disk(RgbImage& img, Vec2 c, double radius, const std::uint8_t rgb[3]) {
    double r2 = radius * radius;
    int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius)));
    int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius)));
    int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(c.x + radius)));
    int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(c.y + radius)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = x - c.x, dy = y - c.y;
            if (dx * dx + dy * dy <= r2) img.set(x, y, rgb[0], rgb[1], rgb[2]);
        }
}

void rgb_circle(RgbImage& img, Vec2 c, double radius, double pen, const std::uint8_t rgb[3]) {
    double lo = (radius - pen) * (radius - pen);
    double hi = (radius + pen) * (radius + pen);
    int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius - pen)));
    int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius - pen)));
    int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(c.x + radius + pen)));
    int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(c.y + radius + pen)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = x - c.x, dy = y - c.y;
            double d2 = dx * dx + dy * dy;
            if (d2 >= lo && d2 <= hi) img.set(x, y, rgb[0], rgb[1], rgb[2]);
        }
}

void rgb_capsule(RgbImage& img, Vec2 a, Vec2 b, double pen_radius, const std::uint8_t rgb[3]) {
    double r2 = pen_radius * pen_radius;
    int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - pen_radius)));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - pen_radius)));
    int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + pen_radius)));
    int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + pen_radius)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (point_segment_dist2({double(x), double(y)}, a, b) <= r2)
                img.set(x, y, rgb[0], rgb[1], rgb[2]);
}

void rgb_stamp(RgbImage& img, const BinaryImage& mask, const std::uint8_t rgb[3]) {
    int w = std::min(img.width, mask.width);
    int h = std::min(img.height, mask.height);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y)) img.set(x, y, rgb[0], rgb[1], rgb[2]);
}

}  // namespace trussketch::draw
