#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trussketch/image.hpp"

namespace trussketch::raster {

/// One connected foreground component plus the shape metrics used by the
/// arrow/support classifiers.
struct Region {
    int id = 0;
    std::vector<Point2i> pixels;   // scan order (y, then x)
    int area = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    Vec2 bbox_center;              // (Bx, By)
    Vec2 centroid;                 // (Cx, Cy)
    double bbox_extent_x = 0;      // LBx = max_x - min_x + 1
    double bbox_extent_y = 0;      // LBy
    double line_similarity = 0;    // second-moment eccentricity, in [0, 1]
    double centroid_shift = 0;     // |B - C| / bbox diagonal

    double bbox_area() const { return bbox_extent_x * bbox_extent_y; }
    double fill_ratio() const { return static_cast<double>(area) / bbox_area(); }
};

struct ThresholdPolicy {
    bool automatic = true;
    int fixed_threshold = 128;

    static ThresholdPolicy auto_threshold() { return {true, 0}; }
    static ThresholdPolicy fixed(int t) { return {false, t}; }
};

/// Global threshold minimizing intra-class variance, polarity chosen so the
/// foreground (ink) covers the minority of pixels. Throws
/// "no separable foreground" on single-intensity images.
BinaryImage binarize(const GrayImage& img, const ThresholdPolicy& policy);

/// The threshold the automatic policy would pick (exposed for tests).
int otsu_threshold(const GrayImage& img);

/// Connected foreground components with all metric fields populated.
/// Labels are dense from 1 in scan order of each component's first pixel.
std::vector<Region> connected_components(const BinaryImage& img, int connectivity = 8);

/// Splits the image into components with area >= min_area (kept) and the
/// rest (removed, returned as regions for later OCR).
std::pair<BinaryImage, std::vector<Region>> remove_small_regions(const BinaryImage& img,
                                                                 int min_area);

/// z is kept iff every offset of se translated to z lands on foreground.
/// Out-of-bounds pixels count as background.
BinaryImage erode(const BinaryImage& img, const StructuringElement& se);

/// Union of the image translated by every offset of se; equivalently z is
/// set iff the reflected se placed at z intersects the foreground.
BinaryImage dilate(const BinaryImage& img, const StructuringElement& se);

/// Background components not 4-connected to the image border become
/// foreground. Idempotent.
BinaryImage fill_holes(const BinaryImage& img);

/// Shape metrics for an arbitrary pixel set. Throws on an empty set.
Region region_metrics(std::span<const Point2i> pixels);

/// Exact squared Euclidean distance to the nearest background pixel
/// (0 on background). Image borders do not count as background.
std::vector<double> squared_distance_transform(const BinaryImage& img);

/// Zhang-Suen thinning of the foreground down to a 1-px skeleton.
BinaryImage skeletonize(const BinaryImage& img);

/// Median stroke thickness: 2 x median distance-transform value over
/// foreground skeleton pixels. Returns nullopt on blank images.
std::optional<double> estimate_stroke_thickness(const BinaryImage& img);

}  // namespace trussketch::raster
