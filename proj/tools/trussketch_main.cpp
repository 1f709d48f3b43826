#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "trussketch/pipeline.hpp"
#include "trussketch/textreader.hpp"

int main(int argc, char** argv) {
    CLI::App app{"trussketch - parse a sketched planar truss, solve it, and overlay the "
                 "member forces"};
    app.require_subcommand(1);

    // analyze
    trussketch::pipeline::AnalyzeOptions analyze;
    std::string scale_flag;
    auto* cmd_analyze = app.add_subcommand("analyze", "parse + solve a sketch image");
    cmd_analyze->add_option("image", analyze.image_path, "input sketch (PNG or BMP)")
        ->required();
    cmd_analyze->add_option("--out", analyze.out_overlay, "overlay PNG path");
    cmd_analyze->add_option("--model", analyze.out_model, "model JSON path");
    cmd_analyze->add_option("--config", analyze.config_path, "config JSON path");
    cmd_analyze->add_option("--corrections", analyze.corrections_path, "corrections JSON path");
    cmd_analyze->add_option("--scale", scale_flag, "scale reference I,J=METERS");
    cmd_analyze->add_option("--debug-masks", analyze.debug_dir, "directory for stage masks");
    cmd_analyze->add_flag("--quiet", analyze.quiet, "suppress issue printing");

    // synth
    trussketch::pipeline::SynthOptions synth;
    bool random = false;
    std::uint64_t seed = 0;
    int joints = 0;
    auto* cmd_synth = app.add_subcommand("synth", "generate a sketch + ground truth");
    cmd_synth->add_flag("--random", random, "generate a random determinate truss");
    cmd_synth->add_option("--seed", seed, "random seed");
    cmd_synth->add_option("--joints", joints, "joint count for --random");
    cmd_synth->add_option("--model", synth.model_path, "model JSON to render");
    cmd_synth->add_option("--out-image", synth.out_image, "output sketch PNG")->required();
    cmd_synth->add_option("--out-truth", synth.out_truth, "ground-truth model JSON");

    // templates (maintenance: writes the trained-glyph archive)
    std::string template_out;
    auto* cmd_templates = app.add_subcommand("templates", "write the character template archive");
    cmd_templates->add_option("--out", template_out, "output .trsk path")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_analyze->parsed()) {
        if (!scale_flag.empty()) {
            try {
                analyze.scale = trussketch::pipeline::parse_scale_flag(scale_flag);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        }
        return trussketch::pipeline::run_analyze(analyze);
    }
    if (cmd_synth->parsed()) {
        synth.random = random;
        synth.seed = seed;
        synth.joints = joints;
        if (!synth.random && synth.model_path.empty()) {
            std::cerr << "error: synth needs --random or --model\n";
            return 1;
        }
        return trussketch::pipeline::run_synth(synth);
    }
    if (cmd_templates->parsed()) {
        try {
            trussketch::textreader::TemplateSet::builtin().save(template_out);
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 1;
}
