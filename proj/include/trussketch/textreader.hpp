#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trussketch/raster.hpp"
#include "trussketch/segmenter.hpp"

namespace trussketch::textreader {

using raster::BinaryImage;
using raster::Region;

constexpr int kTemplateSize = 24;

/// Trained character glyphs: one normalized kTemplateSize^2 binary bitmap
/// per charset character. Persisted as a "TRSK1" archive (one-line header
/// with the charset, then bit-packed bitmaps in charset order).
class TemplateSet {
public:
    /// Glyphs rendered from the built-in stroke font.
    static TemplateSet builtin();

    static TemplateSet load(const std::string& path);
    void save(const std::string& path) const;

    const std::vector<std::uint8_t>* glyph(char c) const;
    const std::string& charset() const { return charset_; }

    friend bool operator==(const TemplateSet&, const TemplateSet&) = default;

private:
    std::string charset_;
    std::map<char, std::vector<std::uint8_t>> glyphs_;
};

/// Crops the mask to its ink, scales it into a kTemplateSize square
/// preserving aspect (area-averaged, threshold 0.5) and centers it.
std::vector<std::uint8_t> normalize_bitmap(const BinaryImage& mask);

/// Squared positive Pearson correlation (R^2) of two normalized bitmaps,
/// in [0, 1]. Identical bitmaps score 1; unrelated shapes land near 0.
double correlation_score(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

struct WordRegion {
    std::vector<Region> char_regions;  // original canvas coordinates
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    std::optional<double> slope_deg;
    std::optional<std::string> text;
    std::vector<double> char_scores;

    Vec2 center() const { return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}; }
};

/// Groups character regions into words by disk dilation; each merged
/// component yields one WordRegion holding its original character regions.
std::vector<WordRegion> group_words(const BinaryImage& chars, double dilation_radius);

struct OcrParams {
    double area_band_lo = 0.5;   // valid-character bbox-area band, x mean
    double area_band_hi = 1.4;
    double flip_mean_min = 0.5;  // flip triggers below these scores
    double flip_char_min = 0.3;
};

/// Average slope of the segments connecting consecutive valid character
/// centers, mathematical convention in (-90, 90]. Characters outside the
/// bbox-area band (the "." case) are excluded. Throws "slope
/// underdetermined" with fewer than 3 valid characters.
double estimate_text_slope(const WordRegion& word, const OcrParams& params = {});

struct ReadResult {
    std::string text;
    std::vector<double> char_scores;
    double mean_score = 0;
    double rotation_applied_deg = 0;  // de-rotation that produced the text
    int reads = 1;                    // recognition passes performed
};

/// Recognizes a word: de-rotates by the estimated slope, matches each
/// character against the templates, and re-reads at 180 degrees when the
/// flip criteria fire. Falls back to a 4-orientation sweep when the slope
/// is underdetermined. Throws "empty word" on a word without characters.
ReadResult recognize_word(const WordRegion& word, const TemplateSet& templates,
                          const OcrParams& params = {});

/// Load grammar: optional '-', digits, optional '.' digits, optional unit
/// (kN or N). Returns the magnitude in kN (signed) or nullopt.
std::optional<double> parse_load_text(const std::string& text);

struct AttachedTo {
    enum Kind { kArrow, kMember, kUnassigned } kind = kUnassigned;
    int id = 0;
};

struct RecognizedLabel {
    std::string text;
    Vec2 anchor;  // word bbox center
    AttachedTo attached_to;
    std::optional<double> magnitude_kn;      // parsed for arrow labels
    std::optional<std::string> member_name;  // raw text for member labels
    bool parse_failed = false;               // arrow label that did not parse
};

/// Attaches each recognized word to the nearest arrow bbox center or member
/// midpoint (arrows win ties, then the lower id). Arrow labels are parsed
/// with the load grammar; member labels become names.
std::vector<RecognizedLabel> snap_labels(const std::vector<WordRegion>& words,
                                         const std::vector<segmenter::ArrowSeg>& arrows,
                                         const std::vector<segmenter::MemberSeg>& members,
                                         const std::vector<segmenter::Joint>& joints);

}  // namespace trussketch::textreader
