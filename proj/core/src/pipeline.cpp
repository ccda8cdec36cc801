#include "nssfr/pipeline.hpp"

#include "nssfr/error.hpp"
#include "nssfr/ingest.hpp"
#include "nssfr/log.hpp"
#include "nssfr/parallel.hpp"
#include "nssfr/report.hpp"
#include "svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fs = std::filesystem;

namespace nssfr {

// ---- configuration ---------------------------------------------------------

std::vector<Orientation> AnalyzeConfig::orientations() const {
    switch (orientation) {
    case OrientationFilter::Horizontal: return {Orientation::Horizontal};
    case OrientationFilter::Vertical: return {Orientation::Vertical};
    case OrientationFilter::Both: break;
    }
    return {Orientation::Horizontal, Orientation::Vertical};
}

void AnalyzeConfig::validate() const {
    if (input.empty()) throw ConfigError("--input is required");
    params.validate();
    if (!(limits.overshoot_limit > 1.0)) throw ConfigError("overshoot limit must be > 1");
    if (!(limits.noise_min_limit > 0.0 && limits.noise_min_limit < 1.0)) {
        throw ConfigError("noise minimum limit must be in (0, 1)");
    }
    if (segment_ratios.empty()) {
        if (segments < 2) throw ConfigError("at least 2 segments are required");
    } else {
        if (segment_ratios.size() < 2) throw ConfigError("at least 2 segment ratios are required");
        for (std::size_t i = 0; i < segment_ratios.size(); ++i) {
            const double r = segment_ratios[i];
            if (!(r > 0.0 && r <= 1.0) || (i > 0 && !(r > segment_ratios[i - 1]))) {
                throw ConfigError("segment ratios must be strictly increasing in (0, 1]");
            }
        }
        if (segment_ratios.back() != 1.0) throw ConfigError("the last segment ratio must be 1");
    }
    if (exclusion_margin && *exclusion_margin < 0) throw ConfigError("exclusion margin must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

OrientationFilter parse_orientation_filter(const std::string& s) {
    if (s == "horizontal") return OrientationFilter::Horizontal;
    if (s == "vertical") return OrientationFilter::Vertical;
    if (s == "both") return OrientationFilter::Both;
    throw ConfigError("orientation must be horizontal, vertical or both, got '" + s + "'");
}

const char* to_string(OrientationFilter f) {
    switch (f) {
    case OrientationFilter::Horizontal: return "horizontal";
    case OrientationFilter::Vertical: return "vertical";
    case OrientationFilter::Both: return "both";
    }
    return "?";
}

namespace {

std::vector<double> parse_number_list(const nlohmann::json& v, const char* key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(std::string("config: ") + key + " must contain numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (item.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError(std::string("config: bad number in ") + key + ": '" + item + "'");
            }
        }
        return out;
    }
    throw ConfigError(std::string("config: ") + key + " must be a list");
}

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: wrong type for '" + key + "'");
    }
}

} // namespace

void apply_config_json(AnalyzeConfig& config, const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, v] : doc.items()) {
        if (key == "input") {
            config.input = get_as<std::string>(v, key);
        } else if (key == "glob") {
            config.glob = get_as<std::string>(v, key);
        } else if (key == "limit") {
            const auto n = get_as<long long>(v, key);
            if (n < 0) throw ConfigError("config: limit must be >= 0");
            config.limit = static_cast<std::size_t>(n);
        } else if (key == "mask") {
            if (v.is_null()) {
                config.mask_path.reset();
            } else {
                config.mask_path = get_as<std::string>(v, key);
            }
        } else if (key == "st") {
            config.params.st = get_as<double>(v, key);
        } else if (key == "esfw") {
            config.params.esfw = get_as<int>(v, key);
        } else if (key == "contrast") {
            const auto c = parse_number_list(v, "contrast");
            if (c.size() != 2) throw ConfigError("config: contrast needs two values");
            config.params.contrast_min = c[0];
            config.params.contrast_max = c[1];
        } else if (key == "edge_fit_order") {
            config.params.edge_fit_order = get_as<int>(v, key);
        } else if (key == "angle_exclusion_deg") {
            config.params.angle_exclusion_deg = get_as<double>(v, key);
        } else if (key == "orientation") {
            config.orientation = parse_orientation_filter(get_as<std::string>(v, key));
        } else if (key == "overshoot_limit") {
            config.limits.overshoot_limit = get_as<double>(v, key);
        } else if (key == "noise_min_limit") {
            config.limits.noise_min_limit = get_as<double>(v, key);
        } else if (key == "segments") {
            config.segments = get_as<int>(v, key);
        } else if (key == "segment_ratios") {
            config.segment_ratios = parse_number_list(v, "segment_ratios");
        } else if (key == "exclusion_margin") {
            config.exclusion_margin = get_as<int>(v, key);
        } else if (key == "threads") {
            const auto n = get_as<int>(v, key);
            if (n < 1) throw ConfigError("config: threads must be >= 1");
            config.threads = static_cast<unsigned>(n);
        } else if (key == "out") {
            config.out = get_as<std::string>(v, key);
        } else if (key == "figures") {
            config.figures = get_as<bool>(v, key);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
}

// ---- per-frame measurement -------------------------------------------------

CameraSetup prepare_camera(int width, int height, const std::optional<RegionMask>& mask, const AnalyzeConfig& config) {
    CameraSetup cam;
    cam.width = width;
    cam.height = height;
    cam.region = mask ? rasterize(*mask, width, height) : ValidityMap::all_valid(width, height);
    cam.exclusion = mask ? dilate_exclusion(cam.region, config.effective_margin()) : cam.region;
    if (cam.exclusion.count_valid() == 0) throw ConfigError("exclusion margin leaves no valid pixels");
    cam.crop = valid_bounds(cam.exclusion);
    cam.cropped_exclusion = crop_validity(cam.exclusion, cam.crop);
    cam.segmentation = build_segmentation(cam.region, mask.has_value(), config.segments, config.segment_ratios);
    return cam;
}

namespace {

VerdictReason reason_for(MeasurementError::Kind kind) {
    switch (kind) {
    case MeasurementError::Kind::PhaseCoverage: return VerdictReason::PhaseCoverage;
    case MeasurementError::Kind::EdgeIncoherent:
    case MeasurementError::Kind::NoEdgeEnergy: break;
    }
    return VerdictReason::EdgeIncoherent;
}

} // namespace

std::vector<Measurement> measure_frame(const Frame& frame, const CameraSetup& camera, const AnalyzeConfig& config) {
    if (frame.width() != camera.width || frame.height() != camera.height) {
        throw ConfigError("frame size does not match the camera setup");
    }
    Frame cropped;
    cropped.id = frame.id;
    cropped.bit_depth = frame.bit_depth;
    cropped.luminance = camera.crop == RectI{0, 0, frame.width(), frame.height()} ? frame.luminance
                                                                                   : frame.luminance.crop(camera.crop);

    const EdgeMap edges = detect_edges(cropped.luminance, camera.cropped_exclusion);
    auto candidates = extract_candidates(cropped, edges, config.params, camera.cropped_exclusion);
    std::erase_if(candidates, [&](const RoiCandidate& c) { return !accepts(config.orientation, c.orientation); });
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].roi_index = static_cast<int>(i);
    offset_candidates(candidates, {camera.crop.x, camera.crop.y});

    std::vector<Measurement> out;
    out.reserve(candidates.size());
    for (auto& c : candidates) {
        Measurement m;
        try {
            auto r = measure_roi(c.patch, c.orientation, config.params.edge_fit_order);
            m.verdict = classify(r.curve, config.limits);
            m.curve = std::move(r.curve);
        } catch (const MeasurementError& e) {
            m.verdict = failed_verdict(reason_for(e.kind()));
        }
        m.segment = classify_location(c.centroid, camera.segmentation);
        c.patch = RoiPatch{};
        m.candidate = std::move(c);
        out.push_back(std::move(m));
    }
    return out;
}

// ---- whole run -------------------------------------------------------------

int AnalysisResult::valid_count() const {
    return static_cast<int>(std::count_if(measurements.begin(), measurements.end(),
                                          [](const Measurement& m) { return m.curve && m.verdict.valid; }));
}

AnalysisResult run_analysis(const AnalyzeConfig& config) {
    config.validate();
    AnalysisResult result;
    if (config.mask_path) result.mask = load_mask(*config.mask_path);

    const Dataset ds = load_dataset(config.input, config.glob, config.limit);
    result.frames_matched = ds.size();

    // Camera geometry comes from the first decodable frame.
    std::optional<Frame> first;
    std::size_t first_index = 0;
    for (; first_index < ds.size() && !first; ++first_index) first = ds.load(first_index);
    if (!first) throw EmptyInputError("none of the " + std::to_string(ds.size()) + " matched files could be decoded");
    result.frame_width = first->width();
    result.frame_height = first->height();
    const CameraSetup camera = prepare_camera(result.frame_width, result.frame_height, result.mask, config);
    result.segmentation = camera.segmentation;
    first.reset();

    struct Slot {
        bool processed = false;
        std::string skip_reason;
        std::vector<Measurement> measurements;
    };
    std::vector<Slot> slots(ds.size());
    log::info("processing " + std::to_string(ds.size()) + " frames on " + std::to_string(config.threads) +
              " thread(s)");
    parallel_for(ds.size(), config.threads, [&](std::size_t i) {
        Slot& slot = slots[i];
        std::string why;
        auto frame = ds.load(i, &why);
        if (!frame) {
            slot.skip_reason = why;
            return;
        }
        if (frame->width() != camera.width || frame->height() != camera.height) {
            slot.skip_reason = "size " + std::to_string(frame->width()) + "x" + std::to_string(frame->height()) +
                               " differs from " + std::to_string(camera.width) + "x" + std::to_string(camera.height);
            return;
        }
        slot.measurements = measure_frame(*frame, camera, config);
        slot.processed = true;
    });

    for (std::size_t i = 0; i < slots.size(); ++i) {
        Slot& slot = slots[i];
        const std::string& id = ds.entry(i).id;
        if (!slot.processed) {
            log::warn("skipping " + id + ": " + slot.skip_reason);
            result.skipped.push_back({id, slot.skip_reason});
            continue;
        }
        FrameSummary fs{id, static_cast<int>(slot.measurements.size()), 0};
        for (auto& m : slot.measurements) {
            if (m.curve && m.verdict.valid) ++fs.valid;
            result.measurements.push_back(std::move(m));
        }
        result.frames.push_back(std::move(fs));
    }

    result.stats = accumulate(result.measurements, result.segmentation, config.orientations());
    for (const auto& st : result.stats) {
        if (auto w = sufficiency_check(st, result.segmentation.n_segments())) result.warnings.push_back(*w);
    }
    if (!result.skipped.empty()) {
        result.warnings.push_back(std::to_string(result.skipped.size()) + " matched file(s) were skipped");
    }
    return result;
}

void write_outputs(const AnalyzeConfig& config, const AnalysisResult& result) {
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec) throw Error("cannot create output directory " + config.out.string() + ": " + ec.message());
    write_csv(config.out / "measurements.csv", result.measurements);
    write_summary(config.out / "summary.json", config, result);
    if (config.figures) render_figures(config.out / "figures", config, result);
}

std::string summary_table(const AnalysisResult& result) {
    std::ostringstream os;
    char line[200];
    std::snprintf(line, sizeof line, "frames: %zu matched, %zu processed, %zu skipped; candidates: %zu, valid: %d\n",
                  result.frames_matched, result.frames.size(), result.skipped.size(), result.measurements.size(),
                  result.valid_count());
    os << line;
    std::snprintf(line, sizeof line, "center (%.1f, %.1f)  r_e %.1f px\n", result.segmentation.center.x,
                  result.segmentation.center.y, result.segmentation.r_e);
    os << line;
    std::snprintf(line, sizeof line, "%-8s %-10s %9s %6s %8s %7s %8s %8s\n", "segment", "orient", "radius", "valid",
                  "invalid", "failed", "MTF50", "stddev");
    os << line;
    const int n = result.segmentation.n_segments();
    for (const auto& st : result.stats) {
        char mtf[16] = "-", sd[16] = "-";
        if (st.mean_mtf50) {
            std::snprintf(mtf, sizeof mtf, "%.4f", *st.mean_mtf50);
            std::snprintf(sd, sizeof sd, "%.4f", st.mtf50_stddev);
        }
        std::snprintf(line, sizeof line, "%-8s %-10s %9.1f %6d %8d %7d %8s %8s%s\n",
                      segment_name(st.segment_index, n), to_string(st.orientation),
                      result.segmentation.boundaries[st.segment_index], st.count_valid, st.count_invalid,
                      st.count_failed, mtf, sd, st.low_confidence ? "  (low confidence)" : "");
        os << line;
    }
    return os.str();
}

MaskCheckResult mask_check(const RegionMask& mask, const Frame& sample, int segments,
                           const std::vector<double>& ratios) {
    const ValidityMap vmap = rasterize(mask, sample.width(), sample.height());
    MaskCheckResult out;
    out.segmentation = build_segmentation(vmap, true, segments, ratios);

    const double w = sample.width(), h = sample.height();
    const double stroke = std::max(1.0, w / 500.0);
    svg::Document doc(w, h, std::min(w, 1200.0));
    const int downscale = std::max(1, static_cast<int>(std::ceil(w / 1024.0)));
    doc.png_image(0, 0, w, h, encode_png(sample.luminance, downscale));
    for (const auto& poly : scaled_polygons(mask, sample.width(), sample.height())) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& v : poly) pts.emplace_back(v.x, v.y);
        doc.polygon(pts, "red", "none", 2 * stroke);
    }
    const auto& seg = out.segmentation;
    for (int k = 0; k < seg.n_segments(); ++k) {
        const bool outer = k == seg.n_segments() - 1;
        doc.circle(seg.center.x, seg.center.y, seg.boundaries[k], outer ? "orange" : "yellow", "none", 2 * stroke);
    }
    doc.cross(seg.center.x, seg.center.y, 6 * stroke, "yellow", stroke);
    out.svg = doc.str();
    return out;
}

} // namespace nssfr
