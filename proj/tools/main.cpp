// nssfr command-line front end: analyze, synth, mask-check.

#include "nssfr/error.hpp"
#include "nssfr/ingest.hpp"
#include "nssfr/log.hpp"
#include "nssfr/pipeline.hpp"
#include "nssfr/report.hpp"
#include "nssfr/synth.hpp"
#include "nssfr/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kEmpty = 3 };

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nssfr::ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw nssfr::ConfigError(std::string("bad number in ") + what + ": '" + item + "'");
        }
    }
    return out;
}

/// Raw flag values; only flags the user actually passed override the config file.
struct AnalyzeFlags {
    std::string input, glob, mask, contrast, orientation, segment_ratios, out, config;
    std::size_t limit = 0;
    double st = 0, overshoot = 0, noise_min = 0;
    int esfw = 0, order = 0, segments = 0, margin = 0;
    unsigned threads = 1;
    bool no_figures = false;
};

nssfr::AnalyzeConfig build_config(const CLI::App& cmd, const AnalyzeFlags& f) {
    nssfr::AnalyzeConfig c;
    if (!f.config.empty()) nssfr::apply_config_json(c, read_file(f.config));
    auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--input")) c.input = f.input;
    if (given("--glob")) c.glob = f.glob;
    if (given("--limit")) c.limit = f.limit;
    if (given("--mask")) c.mask_path = fs::path(f.mask);
    if (given("--st")) c.params.st = f.st;
    if (given("--esfw")) c.params.esfw = f.esfw;
    if (given("--contrast")) {
        const auto v = parse_list(f.contrast, "--contrast");
        if (v.size() != 2) throw nssfr::ConfigError("--contrast expects min,max");
        c.params.contrast_min = v[0];
        c.params.contrast_max = v[1];
    }
    if (given("--edge-fit-order")) c.params.edge_fit_order = f.order;
    if (given("--orientation")) c.orientation = nssfr::parse_orientation_filter(f.orientation);
    if (given("--overshoot-limit")) c.limits.overshoot_limit = f.overshoot;
    if (given("--noise-min-limit")) c.limits.noise_min_limit = f.noise_min;
    if (given("--segments")) c.segments = f.segments;
    if (given("--segment-ratios")) c.segment_ratios = parse_list(f.segment_ratios, "--segment-ratios");
    if (given("--exclusion-margin")) c.exclusion_margin = f.margin;
    if (given("--threads")) c.threads = f.threads;
    if (given("--out")) c.out = f.out;
    if (f.no_figures) c.figures = false;
    if (!c.segment_ratios.empty() && !given("--segments")) c.segments = static_cast<int>(c.segment_ratios.size());
    if (!c.segment_ratios.empty() && static_cast<std::size_t>(c.segments) != c.segment_ratios.size()) {
        throw nssfr::ConfigError("--segments disagrees with the number of --segment-ratios");
    }
    c.validate();
    return c;
}

int run_analyze(const CLI::App& cmd, const AnalyzeFlags& flags) {
    const nssfr::AnalyzeConfig config = build_config(cmd, flags);
    nssfr::AnalysisResult result;
    try {
        result = nssfr::run_analysis(config);
    } catch (const nssfr::EmptyInputError& e) {
        nssfr::log::error(e.what());
        return kEmpty;
    }
    nssfr::write_outputs(config, result);
    std::cout << nssfr::summary_table(result);
    for (const auto& w : result.warnings) nssfr::log::warn(w);
    if (result.valid_count() == 0) {
        nssfr::log::error("no valid slanted edges were found");
        return kEmpty;
    }
    return kOk;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    const nssfr::SynthJob job = nssfr::parse_synth_json(read_file(spec_path));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw nssfr::Error("cannot create " + out_dir + ": " + ec.message());
    for (const auto& req : job.frames) {
        const nssfr::Frame frame = nssfr::render(req);
        nssfr::write_png(fs::path(out_dir) / (req.id + ".png"), frame.luminance, job.bit_depth);
    }
    std::cout << "wrote " << job.frames.size() << " frame(s) to " << out_dir << "\n";
    return kOk;
}

int run_mask_check(const std::string& mask_path, const std::string& image_path, const std::string& out,
                   int segments, const std::string& ratios) {
    const nssfr::RegionMask mask = nssfr::load_mask(mask_path);
    std::string why;
    const auto frame = nssfr::decode_image(image_path, fs::path(image_path).filename().string(), &why);
    if (!frame) throw nssfr::ConfigError("cannot use " + image_path + ": " + why);
    const auto ratio_list = ratios.empty() ? std::vector<double>{} : parse_list(ratios, "--segment-ratios");
    const auto result = nssfr::mask_check(mask, *frame, ratio_list.empty() ? segments : static_cast<int>(ratio_list.size()),
                                          ratio_list);
    const auto& seg = result.segmentation;
    std::printf("image %dx%d\ncenter %.3f %.3f\nr_e %.3f\nboundaries", frame->width(), frame->height(), seg.center.x,
                seg.center.y, seg.r_e);
    for (double b : seg.boundaries) std::printf(" %.3f", b);
    std::printf("\n");
    nssfr::write_text_file(out, result.svg);
    std::printf("wrote %s\n", out.c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharpness (MTF50) of camera images from natural-scene slanted edges"};
    app.set_version_flag("--version", std::string("nssfr ") + nssfr::version());
    app.require_subcommand(1);
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    AnalyzeFlags af;
    auto* analyze = app.add_subcommand("analyze", "Measure per-segment MTF50 over an image directory");
    analyze->add_option("--input", af.input, "Directory of PNG/JPEG frames")->required();
    analyze->add_option("--glob", af.glob, "File name pattern (default *)");
    analyze->add_option("--limit", af.limit, "Process only the first n frames");
    analyze->add_option("--mask", af.mask, "Region mask JSON");
    analyze->add_option("--st", af.st, "Flat-region std-dev limit (default 0.02)");
    analyze->add_option("--esfw", af.esfw, "Edge separation in px (default 5)");
    analyze->add_option("--contrast", af.contrast, "Contrast range min,max (default 0.1,0.9)");
    analyze->add_option("--edge-fit-order", af.order, "Edge polynomial order 1, 3 or 5 (default 5)");
    analyze->add_option("--orientation", af.orientation, "horizontal, vertical or both (default horizontal)");
    analyze->add_option("--overshoot-limit", af.overshoot, "SFR peak limit (default 1.4)");
    analyze->add_option("--noise-min-limit", af.noise_min, "High-frequency minimum limit (default 0.4)");
    analyze->add_option("--segments", af.segments, "Number of radial segments (default 3)");
    analyze->add_option("--segment-ratios", af.segment_ratios, "Outer radius ratios r1,r2,...,1");
    analyze->add_option("--exclusion-margin", af.margin, "Mask exclusion margin in px (default 2*esfw)");
    analyze->add_option("--threads", af.threads, "Worker threads (default 1)");
    analyze->add_option("--out", af.out, "Output directory (default nssfr_out)");
    analyze->add_option("--config", af.config, "JSON config file; flags override it");
    analyze->add_flag("--no-figures", af.no_figures, "Skip SVG figures");

    std::string synth_spec, synth_out;
    auto* synth = app.add_subcommand("synth", "Render synthetic frames with known MTF");
    synth->add_option("--spec", synth_spec, "Synth job JSON")->required();
    synth->add_option("--out", synth_out, "Output directory")->required();

    std::string mc_mask, mc_image, mc_out = "mask_check.svg", mc_ratios;
    int mc_segments = 3;
    auto* mcheck = app.add_subcommand("mask-check", "Render a mask and its radial segments over a sample");
    mcheck->add_option("--mask", mc_mask, "Region mask JSON")->required();
    mcheck->add_option("--image", mc_image, "Sample image")->required();
    mcheck->add_option("--out", mc_out, "SVG output (default mask_check.svg)");
    mcheck->add_option("--segments", mc_segments, "Number of radial segments (default 3)");
    mcheck->add_option("--segment-ratios", mc_ratios, "Outer radius ratios r1,r2,...,1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    nssfr::log::set_level(verbose ? nssfr::log::Level::Debug : quiet ? nssfr::log::Level::Error : nssfr::log::Level::Info);

    try {
        if (analyze->parsed()) return run_analyze(*analyze, af);
        if (synth->parsed()) return run_synth(synth_spec, synth_out);
        if (mcheck->parsed()) return run_mask_check(mc_mask, mc_image, mc_out, mc_segments, mc_ratios);
    } catch (const nssfr::ConfigError& e) {
        nssfr::log::error(e.what());
        return kConfig;
    } catch (const nssfr::EmptyInputError& e) {
        nssfr::log::error(e.what());
        return kEmpty;
    } catch (const std::exception& e) {
        nssfr::log::error(e.what());
        return kFailure;
    }
    return kOk;
}
