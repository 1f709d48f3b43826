#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "trussketch/image.hpp"
#include "trussketch/solver.hpp"

namespace trussketch::annotator {

using raster::GrayImage;
using raster::RgbImage;

struct OverlayStyle {
    std::uint8_t joint_color[3] = {210, 30, 30};
    std::uint8_t member_color[3] = {210, 30, 30};
    std::uint8_t arrow_color[3] = {225, 170, 0};
    std::uint8_t support_color[3] = {0, 150, 50};
    std::uint8_t tension_color[3] = {20, 50, 200};
    std::uint8_t compression_color[3] = {160, 20, 160};
    double font_px = 14;                 // >= 8
    std::string force_format = "%.2f kN";
};

/// Draws the model (and member axial forces when a result is present) over
/// the input image. Output keeps the input dimensions; labels are nudged
/// perpendicular to their member and clamped into the frame.
RgbImage render_overlay(const GrayImage& input, const model::TrussModel& m,
                        const std::optional<solver::SolveResult>& result,
                        const OverlayStyle& style = {});

/// Model JSON with embedded "results" (axial_kN / reactions /
/// displacements_m), deterministic key order.
nlohmann::ordered_json results_document(const model::TrussModel& m,
                                        const std::optional<solver::SolveResult>& result);

/// Serializes results_document to a file (2-space indent, trailing newline).
void export_results(const std::string& path, const model::TrussModel& m,
                    const std::optional<solver::SolveResult>& result);

struct RenderParams {
    int canvas_width = 1000;        // 0 = fit the model bounds
    int canvas_height = 700;
    double stroke_px = 7;           // member/arrow stroke width
    double joint_radius_px = 16;
    double arrow_length_px = 60;
    double arrow_head_len_px = 21;
    double arrow_head_halfwidth_px = 10.5;
    double arrow_tip_gap_px = 10;   // tip distance beyond the joint disk
    double support_base_px = 30;
    double support_height_px = 26;
    double support_apex_inset_px = 12;  // apex depth inside the joint disk
    double roller_line_len_px = 46;
    double roller_line_stroke_px = 6.5;
    double roller_gap_px = 1;
    double font_px = 16;
    double label_slope_deg = 0;     // base label slope
    double slope_jitter_deg = 0;    // +/- jitter, seeded
    std::uint64_t seed = 0;
};

/// Renders a clean sketch of the model in image coordinates: joint disks,
/// member strokes, support triangles (rollers add the parallel line), load
/// arrows with magnitude labels. Deterministic for a given seed. Throws
/// "unrenderable layout" when symbols cannot be placed without collisions.
GrayImage generate_sketch(const model::TrussModel& m, const RenderParams& params = {});

/// Seeded random determinate truss (Henneberg strip): pin + roller, 1-3
/// labeled top-chord loads, geometry pre-checked for clean segmentation.
model::TrussModel random_truss_model(std::uint64_t seed, int joint_count, int width = 1000,
                                     int height = 700);

}  // namespace trussketch::annotator
