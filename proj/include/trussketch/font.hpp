#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trussketch/geometry.hpp"

namespace trussketch::font {

/// Characters the recognizer is trained on: digits, letters, '.', '-', '/'.
/// The font itself carries a few extra render-only glyphs (e.g. '+').
std::string_view template_charset();

/// One glyph as polylines on a 24-unit em square. y runs downward:
/// cap top = 1, baseline = 21, x-height top = 8, descender bottom = 23.
struct Glyph {
    char ch = 0;
    std::vector<std::vector<Vec2>> strokes;
    double width = 0;  // nominal ink width before the pen is applied
};

/// Lookup a glyph; nullptr when the font has no shape for the character.
const Glyph* find_glyph(char c);

/// Pen radius at em size 24 (scaled linearly with font size).
constexpr double kPenRadiusEm24 = 1.7;

/// Pen radius in pixels at a font size; floored so small text stays bold
/// enough to survive binarization and rotation.
double pen_radius(double font_px);

/// Horizontal advance for a character at the given font size (em height).
double advance(char c, double font_px);

/// Total advance of a string at the given font size.
double text_width(std::string_view text, double font_px);

}  // namespace trussketch::font
