#include "trussketch/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "trussketch/image_io.hpp"

namespace trussketch::pipeline {

namespace fs = std::filesystem;
using model::Severity;
using model::TrussModel;
using model::ValidationIssue;
using raster::BinaryImage;
using raster::GrayImage;

namespace {

void dump_mask(const std::string& dir, int stage, const std::string& name,
               const BinaryImage& mask) {
    if (dir.empty()) return;
    fs::create_directories(dir);
    char file[64];
    std::snprintf(file, sizeof(file), "stage-%d-%s.png", stage, name.c_str());
    raster::save_png((fs::path(dir) / file).string(), raster::binary_to_gray(mask));
}

}  // namespace

Segmentation segment_image(const GrayImage& img, const cli::Config& cfg,
                           const textreader::TemplateSet& templates,
                           const std::string& debug_dir) {
    Segmentation seg;

    raster::ThresholdPolicy policy = cfg.binarize_threshold < 0
                                         ? raster::ThresholdPolicy::auto_threshold()
                                         : raster::ThresholdPolicy::fixed(cfg.binarize_threshold);
    seg.binary = raster::binarize(img, policy);
    dump_mask(debug_dir, 1, "binary", seg.binary);

    auto [main_img, removed] = raster::remove_small_regions(seg.binary, cfg.min_region_area);
    seg.main = std::move(main_img);
    seg.chars_canvas = BinaryImage(img.width, img.height);
    for (const auto& r : removed)
        for (const auto& p : r.pixels) seg.chars_canvas.set(p.x, p.y, true);
    dump_mask(debug_dir, 2, "text-removed", seg.main);
    dump_mask(debug_dir, 3, "characters", seg.chars_canvas);

    seg.stroke_thickness = raster::estimate_stroke_thickness(seg.main).value_or(4.0);
    seg.joint_se_radius =
        cfg.joint_se_radius > 0 ? cfg.joint_se_radius : 1.5 * seg.stroke_thickness;
    seg.joint_se_radius = std::max(2.0, seg.joint_se_radius);

    seg.joints = segmenter::detect_joints(seg.main, seg.joint_se_radius);
    if (seg.joints.size() >= 2)
        seg.members = segmenter::detect_members(seg.main, seg.joints, cfg.member_coverage_min);

    double clear_halfwidth = seg.stroke_thickness / 2.0 + 1.5;
    BinaryImage residual =
        segmenter::subtract_segmented(seg.main, seg.joints, seg.members, clear_halfwidth);
    dump_mask(debug_dir, 4, "residual", residual);

    segmenter::ArrowThresholds arrow_thr{cfg.arrow_line_similarity_min,
                                         cfg.arrow_centroid_shift_min};
    auto arrow_regions = segmenter::detect_arrows(residual, arrow_thr);
    for (const auto& region : arrow_regions) {
        segmenter::ArrowSeg a = segmenter::arrow_geometry(region, seg.joints);
        a.id = region.id;
        seg.arrows.push_back(std::move(a));
    }
    residual = segmenter::clear_regions(residual, arrow_regions);
    dump_mask(debug_dir, 5, "residual-no-arrows", residual);

    segmenter::SupportParams sup;
    sup.fill_ratio_min = cfg.support_band_lo;
    sup.fill_ratio_max = cfg.support_band_hi;
    sup.centroid_shift_min = cfg.arrow_centroid_shift_min;
    sup.dilation_fraction = cfg.roller_dilation_fraction;
    sup.line_similarity_min = cfg.arrow_line_similarity_min;
    seg.supports = segmenter::detect_supports(residual, seg.joints, sup);

    seg.words = textreader::group_words(seg.chars_canvas, cfg.word_dilation_radius);
    textreader::OcrParams ocr;
    ocr.area_band_lo = cfg.ocr_area_band_lo;
    ocr.area_band_hi = cfg.ocr_area_band_hi;
    ocr.flip_mean_min = cfg.flip_mean_score_min;
    ocr.flip_char_min = cfg.flip_char_score_min;
    for (auto& w : seg.words) {
        try {
            w.slope_deg = textreader::estimate_text_slope(w, ocr);
        } catch (const std::runtime_error&) {
            w.slope_deg.reset();
        }
        auto read = textreader::recognize_word(w, templates, ocr);
        w.text = read.text;
        w.char_scores = read.char_scores;
    }
    seg.labels = textreader::snap_labels(seg.words, seg.arrows, seg.members, seg.joints);
    return seg;
}

std::vector<ValidationIssue> segmentation_issues(const Segmentation& seg) {
    std::vector<ValidationIssue> issues;
    for (const auto& orphan : seg.supports.orphans) {
        char subject[64];
        std::snprintf(subject, sizeof(subject), "support near (%.0f, %.0f)", orphan.apex.x,
                      orphan.apex.y);
        issues.push_back({Severity::kError, "orphan_support", subject,
                          "support triangle has no joint near its apex"});
    }
    return issues;
}

std::string issue_remedy(const ValidationIssue& issue) {
    if (issue.code == "missing_load_magnitude" || issue.code == "unparseable_load_magnitude") {
        std::string id = issue.subject.size() > 5 ? issue.subject.substr(5) : "N";
        return "corrections: {\"op\":\"set\",\"target\":{\"kind\":\"load\",\"id\":" + id +
               "},\"value\":{\"magnitude_kN\":<value>}}";
    }
    if (issue.code == "missing_scale")
        return "pass --scale I,J=METERS or corrections: {\"op\":\"scale_ref\","
               "\"target\":{\"a\":1,\"b\":2},\"value\":{\"distance_m\":<value>}}";
    if (issue.code == "insufficient_supports" || issue.code == "duplicate_support")
        return "corrections: {\"op\":\"set\",\"target\":{\"kind\":\"support\",\"node\":N},"
               "\"value\":{\"kind\":\"pinned\"|\"roller\"}}";
    if (issue.code == "mechanism" || issue.code == "duplicate_member")
        return "corrections: {\"op\":\"add\"|\"delete\",\"target\":{\"kind\":\"member\","
               "\"a\":N,\"b\":M}}";
    if (issue.code == "orphan_support")
        return "redraw the support under its joint or adjust the config support_band";
    return "see README for the corrections file schema";
}

ScaleRef parse_scale_flag(const std::string& text) {
    ScaleRef ref;
    char extra;
    if (std::sscanf(text.c_str(), "%d,%d=%lf%c", &ref.node_a, &ref.node_b, &ref.distance_m,
                    &extra) != 3)
        throw std::runtime_error("bad --scale (want I,J=METERS): " + text);
    if (ref.distance_m <= 0) throw std::runtime_error("--scale distance must be positive");
    return ref;
}

namespace {

struct AnalyzePaths {
    std::string overlay, model, issues;
};

AnalyzePaths resolve_paths(const AnalyzeOptions& opts) {
    AnalyzePaths p;
    fs::path stem = fs::path(opts.image_path);
    stem.replace_extension();
    p.overlay = opts.out_overlay.empty() ? stem.string() + ".overlay.png" : opts.out_overlay;
    p.model = opts.out_model.empty() ? stem.string() + ".model.json" : opts.out_model;
    fs::path issues = fs::path(p.model);
    issues.replace_extension();
    p.issues = issues.string() + ".issues.json";
    return p;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

void report_issues(const std::vector<ValidationIssue>& issues, bool quiet) {
    if (quiet) return;
    for (const auto& i : issues) {
        std::cout << (i.severity == Severity::kError ? "error" : "warning") << " [" << i.code
                  << "] " << i.subject << ": " << i.message << "\n    fix: " << issue_remedy(i)
                  << "\n";
    }
}

}  // namespace

int run_analyze(const AnalyzeOptions& opts) {
    AnalyzePaths paths = resolve_paths(opts);
    try {
        cli::Config cfg = cli::load_config(opts.config_path);
        GrayImage input = raster::load_image_gray(opts.image_path);
        textreader::TemplateSet templates = textreader::TemplateSet::builtin();

        std::vector<ValidationIssue> issues;
        TrussModel m;
        std::optional<Segmentation> seg;
        try {
            seg = segment_image(input, cfg, templates, opts.debug_dir);
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()) != "no joints found") throw;
            issues.push_back({Severity::kError, "no_joints", "image", "no joints found"});
        }

        if (seg) {
            issues = segmentation_issues(*seg);
            m = model::build_model(seg->joints, seg->members, seg->supports.supports, seg->arrows,
                                   seg->labels);
        }

        if (!opts.corrections_path.empty()) {
            std::ifstream in(opts.corrections_path);
            if (!in) throw std::runtime_error("cannot open corrections file: " +
                                              opts.corrections_path);
            nlohmann::json doc;
            try {
                in >> doc;
            } catch (const nlohmann::json::parse_error& e) {
                throw std::runtime_error("malformed corrections file: " + std::string(e.what()));
            }
            m = model::apply_corrections(m, doc);
        }
        if (opts.scale) m = model::calibrate_scale(m, opts.scale->node_a, opts.scale->node_b,
                                                   opts.scale->distance_m);

        auto validation = model::validate(m);
        issues.insert(issues.end(), validation.begin(), validation.end());

        std::optional<solver::SolveResult> result;
        if (!model::has_errors(issues)) {
            try {
                result = solver::solve(m);
            } catch (const std::runtime_error& e) {
                issues.push_back({Severity::kError, "unstable_geometry", "model", e.what()});
            }
        }

        report_issues(issues, opts.quiet);
        write_json_file(paths.issues, model::issues_to_json(issues));
        annotator::export_results(paths.model, m, result);
        raster::save_png(paths.overlay, annotator::render_overlay(input, m, result));

        if (model::has_errors(issues)) return 2;
        if (!opts.quiet)
            std::cout << "wrote " << paths.model << ", " << paths.overlay << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_synth(const SynthOptions& opts) {
    try {
        TrussModel m;
        if (opts.random) {
            if (opts.joints < 3) {
                std::cerr << "error: degenerate truss: need at least 3 joints\n";
                return 1;
            }
            m = annotator::random_truss_model(opts.seed, opts.joints);
        } else {
            std::ifstream in(opts.model_path);
            if (!in) throw std::runtime_error("cannot open model file: " + opts.model_path);
            nlohmann::json doc;
            in >> doc;
            m = model::model_from_json(doc);
        }
        annotator::RenderParams params;
        params.seed = opts.seed;
        GrayImage sketch = annotator::generate_sketch(m, params);
        raster::save_png(opts.out_image, sketch);
        if (!opts.out_truth.empty()) write_json_file(opts.out_truth, model::model_to_json(m));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace trussketch::pipeline
