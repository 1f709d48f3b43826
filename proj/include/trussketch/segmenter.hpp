#pragma once

#include <optional>
#include <vector>

#include "trussketch/raster.hpp"

namespace trussketch::segmenter {

using raster::BinaryImage;
using raster::Region;

struct Joint {
    int id = 0;
    Vec2 center;
    double radius_est = 0;
};

/// Undirected member candidate, stored with joint_a < joint_b.
struct MemberSeg {
    int id = 0;
    int joint_a = 0;
    int joint_b = 0;
    double coverage = 0;
};

struct ArrowSeg {
    int id = 0;
    Region region;
    double orientation_deg = 0;  // tail->tip, mathematical convention (y up)
    Vec2 tip;
    Vec2 tail;
    int target_joint = 0;
};

enum class SupportKind { kPinned, kRoller };

struct SupportSeg {
    int id = 0;
    SupportKind kind = SupportKind::kPinned;
    int apex_joint = 0;
    std::optional<double> roll_angle_deg;  // present iff roller, in [0, 180)
    Vec2 apex;
    Region region;
};

/// Support triangle whose apex has no joint nearby; reported upward as a
/// validation issue instead of a SupportSeg.
struct OrphanSupport {
    Vec2 apex;
    Region region;
};

/// Erodes with a disk of se_radius; every surviving component becomes a
/// joint (center = survivor centroid, radius_est from dilating the survivor
/// back with the same element). Throws "no joints found" when nothing
/// survives.
std::vector<Joint> detect_joints(const BinaryImage& img, double se_radius);

/// Samples the center-to-center segment of every joint pair (skipping a
/// 1.5 x radius_est disk at each end); pairs whose sampled coverage reaches
/// coverage_min become members, then collinear spans are suppressed.
std::vector<MemberSeg> detect_members(const BinaryImage& img, const std::vector<Joint>& joints,
                                      double coverage_min);

/// Clears joint disks (1.5 x radius_est) and member stroke corridors,
/// leaving arrows, supports and stray ink.
BinaryImage subtract_segmented(const BinaryImage& img, const std::vector<Joint>& joints,
                               const std::vector<MemberSeg>& members,
                               double member_clear_halfwidth);

struct ArrowThresholds {
    double line_similarity_min = 0.95;
    double centroid_shift_min = 0.01;
};

/// Regions satisfying both arrow criteria (line similarity and centroid
/// shift).
std::vector<Region> detect_arrows(const BinaryImage& residual, const ArrowThresholds& thr = {});

/// Tip/tail/orientation/target for one accepted arrow region. Throws
/// "ambiguous arrow" when the major axis is undefined.
ArrowSeg arrow_geometry(const Region& region, const std::vector<Joint>& joints);

/// Orientation the paper's corner rule would report: angle from the bbox
/// center to the bbox corner nearest the centroid (kept as a cross-check
/// for diagonal arrows).
double arrow_corner_rule_deg(const Region& region);

struct SupportParams {
    double fill_ratio_min = 0.65;
    double fill_ratio_max = 0.75;
    double centroid_shift_min = 0.01;
    double dilation_fraction = 0.20;    // disk diameter as a fraction of max bbox extent
    double line_similarity_min = 0.95;  // roller line test
    double orphan_radius_factor = 3.0;  // apex-to-joint limit in radius_est units
};

struct SupportDetection {
    std::vector<SupportSeg> supports;
    std::vector<OrphanSupport> orphans;
};

/// Fills holes, keeps triangle-like regions (fill ratio band + shifted
/// centroid), then separates rollers from pinned supports by disk-dilation
/// collision with a nearby line.
SupportDetection detect_supports(const BinaryImage& residual, const std::vector<Joint>& joints,
                                 const SupportParams& params = {});

/// Removes the given regions' pixels (used to subtract detected arrows).
BinaryImage clear_regions(const BinaryImage& img, const std::vector<Region>& regions);

}  // namespace trussketch::segmenter
