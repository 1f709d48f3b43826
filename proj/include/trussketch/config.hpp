#pragma once

#include <optional>
#include <string>

namespace trussketch::cli {

/// Pipeline tunables with their default values. Every numeric constant of
/// the classifiers lives here so runs are reproducible and overridable.
struct Config {
    int min_region_area = 260;          // small-region removal (OCR input)
    double joint_se_radius = 0;         // 0 = auto: 1.5 x median stroke thickness
    double member_coverage_min = 0.90;
    double arrow_line_similarity_min = 0.95;
    double arrow_centroid_shift_min = 0.01;
    double support_band_lo = 0.65;      // fill-ratio band for triangles
    double support_band_hi = 0.75;
    double roller_dilation_fraction = 0.20;
    double ocr_area_band_lo = 0.5;      // valid-character bbox-area band
    double ocr_area_band_hi = 1.4;
    double flip_mean_score_min = 0.5;
    double flip_char_score_min = 0.3;
    double word_dilation_radius = 4.0;
    int binarize_threshold = -1;        // -1 = automatic
};

/// Loads a flat-key JSON config; omitted keys keep their defaults. Errors
/// name the offending key. When path is empty, the TRUSSKETCH_CONFIG
/// environment variable is consulted before falling back to defaults.
Config load_config(const std::string& path = "");

}  // namespace trussketch::cli
