#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trussketch/annotator.hpp"
#include "trussketch/config.hpp"
#include "trussketch/textreader.hpp"

namespace trussketch::pipeline {

/// Everything the segmentation and OCR stages produce for one image.
struct Segmentation {
    raster::BinaryImage binary;        // after binarization
    raster::BinaryImage main;          // text-stripped
    raster::BinaryImage chars_canvas;  // removed small regions, re-rendered
    double stroke_thickness = 0;
    double joint_se_radius = 0;
    std::vector<segmenter::Joint> joints;
    std::vector<segmenter::MemberSeg> members;
    std::vector<segmenter::ArrowSeg> arrows;
    segmenter::SupportDetection supports;
    std::vector<textreader::WordRegion> words;
    std::vector<textreader::RecognizedLabel> labels;
};

/// Stages 1-3: binarize, strip text, detect joints/members/arrows/supports,
/// read and snap the labels. Throws "no joints found" on blank inputs.
/// When debug_dir is non-empty, per-stage masks are written as
/// stage-N-<name>.png.
Segmentation segment_image(const raster::GrayImage& img, const cli::Config& cfg,
                           const textreader::TemplateSet& templates,
                           const std::string& debug_dir = "");

/// Issues arising from segmentation itself (currently orphan supports).
std::vector<model::ValidationIssue> segmentation_issues(const Segmentation& seg);

/// Human-readable corrections-file hint for an issue code.
std::string issue_remedy(const model::ValidationIssue& issue);

struct ScaleRef {
    int node_a = 0;
    int node_b = 0;
    double distance_m = 0;
};

/// Parses "I,J=METERS".
ScaleRef parse_scale_flag(const std::string& text);

struct AnalyzeOptions {
    std::string image_path;
    std::string out_overlay;      // default: <image stem>.overlay.png
    std::string out_model;        // default: <image stem>.model.json
    std::string config_path;
    std::string corrections_path;
    std::optional<ScaleRef> scale;
    std::string debug_dir;
    bool quiet = false;
};

/// Full run: parse, correct, validate, solve, annotate, export.
/// Exit codes: 0 success, 2 validation errors remain, 1 I/O or internal
/// error. The issues report lands next to the model JSON.
int run_analyze(const AnalyzeOptions& opts);

struct SynthOptions {
    bool random = false;
    std::uint64_t seed = 0;
    int joints = 0;
    std::string model_path;   // alternative to --random
    std::string out_image;
    std::string out_truth;
};

int run_synth(const SynthOptions& opts);

}  // namespace trussketch::pipeline
