#include "trussketch/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace trussketch::cli {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& key) {
    if (!j.is_number()) throw std::runtime_error("config key \"" + key + "\": expected a number");
    return j.get<double>();
}

double get_unit(const json& j, const std::string& key) {
    double v = get_number(j, key);
    if (v < 0.0 || v > 1.0)
        throw std::runtime_error("config key \"" + key + "\": value out of range [0, 1]");
    return v;
}

void get_band(const json& j, const std::string& key, double& lo, double& hi) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::runtime_error("config key \"" + key + "\": expected [lo, hi]");
    double a = j[0].get<double>(), b = j[1].get<double>();
    if (a > b) throw std::runtime_error("config key \"" + key + "\": band not ordered");
    lo = a;
    hi = b;
}

}  // namespace

Config load_config(const std::string& path) {
    Config cfg;
    std::string effective = path;
    if (effective.empty()) {
        const char* env = std::getenv("TRUSSKETCH_CONFIG");
        if (env && *env) effective = env;
    }
    if (effective.empty()) return cfg;

    std::ifstream in(effective);
    if (!in) throw std::runtime_error("cannot open config file: " + effective);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed config file " + effective + ": " + e.what());
    }
    if (!doc.is_object()) throw std::runtime_error("config root must be an object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "min_region_area") {
            double v = get_number(value, key);
            if (v < 1) throw std::runtime_error("config key \"min_region_area\": must be >= 1");
            cfg.min_region_area = static_cast<int>(v);
        } else if (key == "joint_se_radius") {
            double v = get_number(value, key);
            if (v < 0) throw std::runtime_error("config key \"joint_se_radius\": must be >= 0");
            cfg.joint_se_radius = v;
        } else if (key == "member_coverage_min") {
            cfg.member_coverage_min = get_unit(value, key);
        } else if (key == "arrow_line_similarity_min") {
            cfg.arrow_line_similarity_min = get_unit(value, key);
        } else if (key == "arrow_centroid_shift_min") {
            cfg.arrow_centroid_shift_min = get_unit(value, key);
        } else if (key == "support_band") {
            get_band(value, key, cfg.support_band_lo, cfg.support_band_hi);
        } else if (key == "roller_dilation_fraction") {
            cfg.roller_dilation_fraction = get_unit(value, key);
        } else if (key == "ocr_area_band") {
            get_band(value, key, cfg.ocr_area_band_lo, cfg.ocr_area_band_hi);
        } else if (key == "flip_mean_score_min") {
            cfg.flip_mean_score_min = get_unit(value, key);
        } else if (key == "flip_char_score_min") {
            cfg.flip_char_score_min = get_unit(value, key);
        } else if (key == "word_dilation_radius") {
            double v = get_number(value, key);
            if (v < 1) throw std::runtime_error("config key \"word_dilation_radius\": must be >= 1");
            cfg.word_dilation_radius = v;
        } else if (key == "binarize_threshold") {
            if (value.is_string() && value.get<std::string>() == "auto") {
                cfg.binarize_threshold = -1;
            } else {
                double v = get_number(value, key);
                if (v < 0 || v > 255)
                    throw std::runtime_error(
                        "config key \"binarize_threshold\": value out of range [0, 255]");
                cfg.binarize_threshold = static_cast<int>(v);
            }
        } else {
            throw std::runtime_error("unknown config key \"" + key + "\"");
        }
    }
    return cfg;
}

}  // namespace trussketch::cli
