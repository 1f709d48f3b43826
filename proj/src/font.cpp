#include "trussketch/font.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace trussketch::font {

std::string_view template_charset() {
    static const std::string cs =
        "0123456789"
        "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        "abcdefghijklmnopqrstuvwxyz"
        ".-/";
    return cs;
}

namespace {

using Stroke = std::vector<Vec2>;

// Glyph geometry. Digits and capitals sit on the baseline (y 21) with cap
// top y 1; x-height letters start at y 8; descenders reach y 23. Widths of
// digits, capitals and ascender letters are deliberately kept close (12-16
// units of ink) so bounding-box areas stay comparable across a word, which
// the slope filter depends on. '0' carries a slash to separate it from 'O'.
std::map<char, Glyph> build_glyphs() {
    std::map<char, Glyph> g;
    auto add = [&](char c, double width, std::vector<Stroke> strokes) {
        g[c] = Glyph{c, std::move(strokes), width};
    };

    // digits
    add('0', 14, {{{4, 1}, {10, 1}, {14, 5}, {14, 17}, {10, 21}, {4, 21}, {0, 17}, {0, 5}, {4, 1}},
                  {{10, 5}, {4, 17}}});
    add('1', 13, {{{1, 6}, {7, 1}, {7, 21}}, {{1, 21}, {13, 21}}});
    add('2', 14, {{{0, 5}, {4, 1}, {10, 1}, {14, 5}, {14, 9}, {0, 17}, {0, 21}, {14, 21}}});
    add('3', 14, {{{0, 4}, {4, 1}, {10, 1}, {14, 4}, {14, 8}, {10, 11}, {14, 14}, {14, 18},
                   {10, 21}, {4, 21}, {0, 18}},
                  {{6, 11}, {10, 11}}});
    add('4', 14, {{{10, 1}, {0, 14}, {14, 14}}, {{10, 1}, {10, 21}}});
    add('5', 14, {{{13, 1}, {2, 1}, {2, 9}},
                  {{2, 9}, {8, 8}, {12, 10}, {14, 13}, {14, 16}, {11, 20}, {6, 21}, {2, 20},
                   {0, 18}}});
    add('6', 14, {{{12, 2}, {8, 1}, {3, 3}, {0, 9}, {0, 16}, {3, 21}, {9, 21}, {13, 18}, {13, 13},
                   {9, 10}, {3, 11}, {0, 14}}});
    add('7', 14, {{{0, 1}, {14, 1}, {5, 21}}, {{2, 11}, {11, 11}}, {{2, 21}, {9, 21}}});
    add('8', 13, {{{6.5, 10}, {2, 7}, {2, 3}, {5, 1}, {8, 1}, {11, 3}, {11, 7}, {6.5, 10}},
                  {{6.5, 10}, {1, 13}, {1, 19}, {4, 21}, {9, 21}, {12, 19}, {12, 13}, {6.5, 10}}});
    add('9', 14, {{{2, 20}, {6, 21}, {11, 19}, {14, 13}, {14, 6}, {11, 1}, {5, 1}, {1, 4}, {1, 9},
                   {5, 12}, {11, 11}, {14, 8}}});

    // capitals
    add('A', 14, {{{0, 21}, {7, 1}, {14, 21}}, {{3, 14}, {11, 14}}});
    add('B', 14, {{{0, 1}, {0, 21}},
                  {{0, 1}, {10, 1}, {13, 4}, {13, 7}, {10, 10}, {0, 10}},
                  {{10, 10}, {14, 13}, {14, 18}, {10, 21}, {0, 21}}});
    add('C', 14, {{{14, 5}, {12, 2}, {8, 1}, {4, 2}, {0, 6}, {0, 16}, {4, 20}, {8, 21}, {12, 20},
                   {14, 17}}});
    add('D', 14, {{{0, 1}, {0, 21}}, {{0, 1}, {8, 1}, {13, 4}, {14, 9}, {14, 13}, {13, 18},
                   {8, 21}, {0, 21}}});
    add('E', 13, {{{13, 1}, {0, 1}, {0, 21}, {13, 21}}, {{0, 11}, {7, 11}}});
    add('F', 13, {{{13, 1}, {0, 1}, {0, 21}}, {{0, 11}, {9, 11}}});
    add('G', 14, {{{14, 4}, {10, 1}, {4, 1}, {0, 6}, {0, 16}, {4, 21}, {10, 21}, {14, 17},
                   {14, 12}, {8, 12}}});
    add('H', 14, {{{0, 1}, {0, 21}}, {{14, 1}, {14, 21}}, {{0, 11}, {14, 11}}});
    add('I', 12, {{{2, 1}, {12, 1}}, {{7, 1}, {7, 21}}, {{2, 21}, {12, 21}}});
    add('J', 13, {{{13, 1}, {13, 17}, {9, 21}, {4, 21}, {0, 17}}});
    add('K', 14, {{{0, 1}, {0, 21}}, {{13, 1}, {0, 12}}, {{4, 9}, {14, 21}}});
    add('L', 13, {{{0, 1}, {0, 21}, {13, 21}}});
    add('M', 15, {{{0, 21}, {0, 1}, {7.5, 18}, {15, 1}, {15, 21}}});
    add('N', 14, {{{0, 21}, {0, 1}, {14, 21}, {14, 1}}});
    add('O', 14, {{{4, 1}, {10, 1}, {14, 5}, {14, 17}, {10, 21}, {4, 21}, {0, 17}, {0, 5},
                   {4, 1}}});
    add('P', 14, {{{0, 21}, {0, 1}, {10, 1}, {14, 4}, {14, 8}, {10, 11}, {0, 11}}});
    add('Q', 14, {{{4, 1}, {10, 1}, {14, 5}, {14, 17}, {10, 21}, {4, 21}, {0, 17}, {0, 5}, {4, 1}},
                  {{9, 15}, {15, 22}}});
    add('R', 14, {{{0, 21}, {0, 1}, {10, 1}, {14, 4}, {14, 8}, {10, 11}, {0, 11}},
                  {{7, 11}, {14, 21}}});
    add('S', 14, {{{13, 4}, {9, 1}, {4, 1}, {1, 4}, {1, 7}, {4, 10}, {10, 12}, {13, 15}, {13, 18},
                   {9, 21}, {4, 21}, {1, 18}}});
    add('T', 14, {{{0, 1}, {14, 1}}, {{7, 1}, {7, 21}}});
    add('U', 14, {{{0, 1}, {0, 17}, {4, 21}, {10, 21}, {14, 17}, {14, 1}}});
    add('V', 14, {{{0, 1}, {7, 21}, {14, 1}}});
    add('W', 16, {{{0, 1}, {4, 21}, {8, 5}, {12, 21}, {16, 1}}});
    add('X', 14, {{{0, 1}, {14, 21}}, {{14, 1}, {0, 21}}});
    add('Y', 14, {{{0, 1}, {7, 10}, {14, 1}}, {{7, 10}, {7, 21}}});
    add('Z', 14, {{{0, 1}, {14, 1}, {0, 21}, {14, 21}}});

    // lowercase
    add('a', 13, {{{3, 8}, {9, 8}, {13, 11}, {13, 18}, {9, 21}, {3, 21}, {0, 18}, {0, 11}, {3, 8}},
                  {{13, 8}, {13, 21}}});
    add('b', 13, {{{0, 1}, {0, 21}},
                  {{0, 11}, {4, 8}, {9, 8}, {13, 11}, {13, 18}, {9, 21}, {4, 21}, {0, 18}}});
    add('c', 13, {{{13, 10}, {9, 8}, {4, 8}, {0, 12}, {0, 17}, {4, 21}, {9, 21}, {13, 19}}});
    add('d', 13, {{{13, 1}, {13, 21}},
                  {{13, 11}, {9, 8}, {4, 8}, {0, 11}, {0, 18}, {4, 21}, {9, 21}, {13, 18}}});
    add('e', 13, {{{0, 14}, {13, 14}, {13, 11}, {9, 8}, {4, 8}, {0, 12}, {0, 17}, {4, 21},
                   {11, 21}}});
    add('f', 11, {{{11, 2}, {7, 1}, {4, 4}, {4, 21}}, {{0, 9}, {9, 9}}});
    add('g', 13, {{{13, 10}, {9, 8}, {4, 8}, {0, 11}, {0, 16}, {4, 19}, {9, 19}, {13, 16}},
                  {{13, 8}, {13, 20}, {10, 23}, {3, 23}, {0, 21}}});
    add('h', 13, {{{0, 1}, {0, 21}}, {{0, 11}, {4, 8}, {9, 8}, {13, 11}, {13, 21}}});
    add('i', 8, {{{4, 2}, {4, 3}}, {{0, 8}, {4, 8}, {4, 21}}, {{0, 21}, {8, 21}}});
    add('j', 9, {{{8, 2}, {8, 3}}, {{4, 8}, {8, 8}, {8, 20}, {5, 23}, {1, 23}, {0, 21}}});
    add('k', 13, {{{0, 1}, {0, 21}}, {{11, 7}, {0, 15}}, {{0, 15}, {12, 21}}});
    add('l', 9, {{{1, 1}, {5, 1}, {5, 21}}, {{1, 21}, {9, 21}}});
    add('m', 16, {{{0, 8}, {0, 21}},
                  {{0, 10}, {3, 8}, {6, 8}, {8, 10}, {8, 21}},
                  {{8, 10}, {11, 8}, {14, 8}, {16, 10}, {16, 21}}});
    add('n', 13, {{{0, 8}, {0, 21}}, {{0, 11}, {4, 8}, {9, 8}, {13, 11}, {13, 21}}});
    add('o', 13, {{{4, 8}, {9, 8}, {13, 12}, {13, 17}, {9, 21}, {4, 21}, {0, 17}, {0, 12},
                   {4, 8}}});
    add('p', 13, {{{0, 8}, {0, 23}},
                  {{0, 11}, {4, 8}, {9, 8}, {13, 11}, {13, 18}, {9, 21}, {4, 21}, {0, 18}}});
    add('q', 13, {{{13, 8}, {13, 23}},
                  {{13, 11}, {9, 8}, {4, 8}, {0, 11}, {0, 18}, {4, 21}, {9, 21}, {13, 18}}});
    add('r', 11, {{{0, 8}, {0, 21}}, {{0, 12}, {4, 8}, {8, 8}, {11, 10}}});
    add('s', 12, {{{11, 10}, {8, 8}, {3, 8}, {1, 10}, {1, 12}, {4, 14}, {8, 15}, {11, 17},
                   {11, 19}, {8, 21}, {3, 21}, {0, 19}}});
    add('t', 11, {{{4, 2}, {4, 18}, {7, 21}, {11, 20}}, {{0, 8}, {9, 8}}});
    add('u', 13, {{{0, 8}, {0, 18}, {3, 21}, {9, 21}, {13, 18}}, {{13, 8}, {13, 21}}});
    add('v', 13, {{{0, 8}, {6, 21}, {13, 8}}});
    add('w', 16, {{{0, 8}, {4, 21}, {8, 10}, {12, 21}, {16, 8}}});
    add('x', 13, {{{0, 8}, {13, 21}}, {{13, 8}, {0, 21}}});
    add('y', 13, {{{0, 8}, {6, 18}}, {{13, 8}, {3, 23}, {0, 23}}});
    add('z', 13, {{{0, 8}, {13, 8}, {0, 21}, {13, 21}}});

    // punctuation
    add('.', 3, {{{0, 19}, {3, 19}, {3, 21}, {0, 21}, {0, 19}}});
    add('-', 10, {{{0, 12}, {10, 12}}});
    add('/', 11, {{{0, 21}, {11, 1}}});

    // render-only extras
    add('+', 12, {{{6, 5}, {6, 17}}, {{0, 11}, {12, 11}}});
    add(',', 4, {{{1, 19}, {3, 19}, {3, 21}, {0, 23}}});
    add('=', 12, {{{0, 9}, {12, 9}}, {{0, 15}, {12, 15}}});
    add('(', 7, {{{7, 1}, {2, 6}, {2, 16}, {7, 21}}});
    add(')', 7, {{{0, 1}, {5, 6}, {5, 16}, {0, 21}}});
    add(':', 4, {{{1, 9}, {3, 9}, {3, 11}, {1, 11}, {1, 9}}, {{1, 19}, {3, 19}, {3, 21}, {1, 21}, {1, 19}}});
    return g;
}

const std::map<char, Glyph>& glyphs() {
    static const std::map<char, Glyph> g = build_glyphs();
    return g;
}

}  // namespace

const Glyph* find_glyph(char c) {
    const auto& g = glyphs();
    auto it = g.find(c);
    return it == g.end() ? nullptr : &it->second;
}

double pen_radius(double font_px) {
    return std::max(1.25, kPenRadiusEm24 * font_px / 24.0);
}

double advance(char c, double font_px) {
    double scale = font_px / 24.0;
    if (c == ' ') return 10.0 * scale;
    const Glyph* g = find_glyph(c);
    double w = g ? g->width : 10.0;
    // glyph ink plus pen overhang plus letter spacing; the spacing floor
    // keeps small-size characters separable
    return w * scale + 2 * pen_radius(font_px) + std::max(3.2, 3.2 * scale);
}

double text_width(std::string_view text, double font_px) {
    double w = 0;
    for (char c : text) w += advance(c, font_px);
    return w;
}

}  // namespace trussketch::font
