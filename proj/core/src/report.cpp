#include "nssfr/report.hpp"

#include "nssfr/error.hpp"
#include "nssfr/ingest.hpp"
#include "nssfr/log.hpp"
#include "nssfr/version.hpp"
#include "svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace fs = std::filesystem;

namespace nssfr {

using nlohmann::ordered_json;

namespace {

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<const Measurement*> sorted_view(const std::vector<Measurement>& ms) {
    std::vector<const Measurement*> v;
    for (const auto& m : ms) v.push_back(&m);
    std::sort(v.begin(), v.end(), [](const Measurement* a, const Measurement* b) {
        if (a->candidate.frame_id != b->candidate.frame_id) return a->candidate.frame_id < b->candidate.frame_id;
        return a->candidate.roi_index < b->candidate.roi_index;
    });
    return v;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

const char* segment_colour(int index, int n) {
    static const char* palette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
    (void)n;
    return palette[index % 6];
}

} // namespace

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    out.close();
    if (!out) throw Error("cannot write " + path.string());
}

std::string measurements_csv(const std::vector<Measurement>& measurements) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const Measurement* m : sorted_view(measurements)) {
        const RoiCandidate& c = m->candidate;
        out += csv_field(c.frame_id) + ',' + std::to_string(c.roi_index) + ',' + std::to_string(c.bbox.x) + ',' +
               std::to_string(c.bbox.y) + ',' + std::to_string(c.bbox.w) + ',' + std::to_string(c.bbox.h) + ',' +
               g6(c.centroid.x) + ',' + g6(c.centroid.y) + ',' + g6(c.edge_angle_deg) + ',' +
               to_string(c.orientation) + ',' + g6(c.contrast) + ',' + std::to_string(m->segment) + ',' +
               (m->verdict.valid ? "valid" : "invalid") + ',' + to_string(m->verdict.reason) + ',';
        if (m->curve && m->curve->mtf50) out += g6(*m->curve->mtf50);
        out += '\n';
    }
    return out;
}

void write_csv(const fs::path& path, const std::vector<Measurement>& measurements) {
    write_text_file(path, measurements_csv(measurements));
}

std::string summary_json(const AnalyzeConfig& config, const AnalysisResult& result) {
    ordered_json doc;
    doc["tool"] = "nssfr";
    doc["version"] = version();

    ordered_json cfg;
    cfg["input"] = config.input.generic_string();
    cfg["glob"] = config.glob;
    cfg["limit"] = config.limit;
    cfg["mask"] = config.mask_path ? ordered_json(config.mask_path->generic_string()) : ordered_json(nullptr);
    cfg["contrast_min"] = config.params.contrast_min;
    cfg["contrast_max"] = config.params.contrast_max;
    cfg["st"] = config.params.st;
    cfg["esfw"] = config.params.esfw;
    cfg["angle_exclusion_deg"] = config.params.angle_exclusion_deg;
    cfg["edge_fit_order"] = config.params.edge_fit_order;
    cfg["orientation"] = to_string(config.orientation);
    cfg["overshoot_limit"] = config.limits.overshoot_limit;
    cfg["noise_min_limit"] = config.limits.noise_min_limit;
    cfg["noise_band_start"] = config.limits.noise_band_start;
    cfg["segments"] = result.segmentation.n_segments();
    cfg["segment_ratios"] = config.segment_ratios;
    cfg["exclusion_margin"] = config.effective_margin();
    cfg["esf_half_width_px"] = kEsfHalfWidthPx;
    doc["config"] = std::move(cfg);

    ordered_json ds;
    ds["frames_matched"] = result.frames_matched;
    ds["frames_processed"] = result.frames.size();
    ds["width"] = result.frame_width;
    ds["height"] = result.frame_height;
    ordered_json skipped = ordered_json::array();
    for (const auto& s : result.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
    ds["skipped"] = std::move(skipped);
    doc["dataset"] = std::move(ds);

    const auto& seg = result.segmentation;
    ordered_json js;
    js["masked"] = result.mask.has_value();
    js["center"] = {seg.center.x, seg.center.y};
    js["r_e"] = seg.r_e;
    js["boundaries"] = seg.boundaries;
    doc["segmentation"] = std::move(js);

    int valid = 0, invalid = 0, failed = 0;
    for (const auto& m : result.measurements) {
        if (!m.curve) {
            ++failed;
        } else if (m.verdict.valid) {
            ++valid;
        } else {
            ++invalid;
        }
    }
    doc["totals"] = {{"candidates", result.measurements.size()}, {"valid", valid}, {"invalid", invalid},
                     {"failed", failed}};

    ordered_json groups = ordered_json::array();
    for (const auto& st : result.stats) {
        ordered_json g;
        g["segment"] = st.segment_index;
        g["name"] = segment_name(st.segment_index, seg.n_segments());
        g["orientation"] = to_string(st.orientation);
        g["inner_radius"] = st.segment_index == 0 ? 0.0 : seg.boundaries[st.segment_index - 1];
        g["outer_radius"] = seg.boundaries[st.segment_index];
        g["count_valid"] = st.count_valid;
        g["count_invalid"] = st.count_invalid;
        g["count_failed"] = st.count_failed;
        g["count_no_crossing"] = st.count_no_crossing;
        g["mean_mtf50"] = optional_number(st.mean_mtf50);
        g["mtf50_stddev"] = st.mtf50_stddev;
        g["min_mtf50"] = optional_number(st.min_mtf50);
        g["max_mtf50"] = optional_number(st.max_mtf50);
        g["mean_curve_mtf50"] = optional_number(st.mean_curve_mtf50);
        g["low_confidence"] = st.low_confidence;
        g["frequency_step"] = kSfrStep;
        g["mean_curve"] = st.mean_curve;
        groups.push_back(std::move(g));
    }
    doc["groups"] = std::move(groups);
    doc["warnings"] = result.warnings;
    return doc.dump(2) + "\n";
}

void write_summary(const fs::path& path, const AnalyzeConfig& config, const AnalysisResult& result) {
    write_text_file(path, summary_json(config, result));
}

std::string overlay_svg(const Frame& frame, const std::vector<Measurement>& frame_measurements) {
    const double w = frame.width(), h = frame.height();
    svg::Document doc(w, h, std::min(w, 1200.0));
    const int downscale = std::max(1, static_cast<int>(std::ceil(w / 1024.0)));
    doc.png_image(0, 0, w, h, encode_png(frame.luminance, downscale));
    const double stroke = std::max(1.0, w / 600.0);
    for (const auto& m : frame_measurements) {
        const auto& b = m.candidate.bbox;
        const char* colour = m.verdict.valid ? "#00c000" : "#e00000";
        doc.rect(b.x, b.y, b.w, b.h, colour, "none", stroke);
        doc.text(b.x + 2, b.y - 3, std::to_string(m.candidate.roi_index), 4 * stroke + 6, colour);
    }
    doc.text(8, 8 + 6 * stroke, frame.id, 6 * stroke + 4, "yellow");
    return doc.str();
}

namespace {

void draw_segmentation(svg::Document& doc, const RadialSegmentation& seg, double stroke) {
    for (int k = 0; k < seg.n_segments(); ++k) {
        const bool outer = k == seg.n_segments() - 1;
        doc.circle(seg.center.x, seg.center.y, seg.boundaries[k], outer ? "orange" : "gold", "none",
                   outer ? 1.5 * stroke : stroke);
    }
    doc.cross(seg.center.x, seg.center.y, 4 * stroke, "gold", stroke);
}

void draw_mask(svg::Document& doc, const RegionMask& mask, int width, int height, double stroke) {
    for (const auto& poly : scaled_polygons(mask, width, height)) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& v : poly) pts.emplace_back(v.x, v.y);
        doc.polygon(pts, "red", "none", stroke);
    }
}

} // namespace

std::string scatter_svg(const AnalysisResult& result) {
    const double w = std::max(1, result.frame_width), h = std::max(1, result.frame_height);
    const double stroke = std::max(1.0, w / 500.0);
    svg::Document doc(w, h, std::min(w, 1000.0));
    doc.rect(0, 0, w, h, "black", "#f4f4f4", stroke);
    if (result.mask) draw_mask(doc, *result.mask, result.frame_width, result.frame_height, stroke);
    if (result.segmentation.n_segments() > 0) draw_segmentation(doc, result.segmentation, stroke);
    int plotted = 0;
    for (const auto& m : result.measurements) {
        if (!m.verdict.valid || !m.curve) continue;
        const char* colour = m.candidate.orientation == Orientation::Horizontal ? "#1f4fd0" : "#10a080";
        doc.circle(m.candidate.centroid.x, m.candidate.centroid.y, 2.5 * stroke, "none", colour);
        ++plotted;
    }
    doc.text(10, 14 * stroke + 6, "valid slanted edge locations: " + std::to_string(plotted), 10 * stroke + 4);
    if (plotted == 0) doc.text(w / 2, h / 2, "no data", 20 * stroke, "#808080", "middle");
    return doc.str();
}

std::string mean_mtf_svg(const AnalysisResult& result) {
    svg::Document doc(760, 500);
    double ymax = 1.2;
    for (const auto& st : result.stats) {
        for (double v : st.mean_curve) ymax = std::max(ymax, v);
    }
    ymax = std::ceil(ymax * 5.0) / 5.0;
    const svg::PlotArea area{80, 30, 500, 400, 0.0, kSfrMaxFrequency, 0.0, ymax};
    svg::draw_axes(doc, area, 0.1, 0.2, "frequency (cycles/pixel)", "SFR");
    doc.line(area.px(0.5), area.top, area.px(0.5), area.top + area.height, "#888888", 1.0, "4,3");
    doc.line(area.left, area.py(0.5), area.left + area.width, area.py(0.5), "#888888", 1.0, "2,3");

    const int n = result.segmentation.n_segments();
    double legend_y = 40;
    int drawn = 0;
    for (const auto& st : result.stats) {
        if (st.count_valid == 0 || st.mean_curve.empty()) continue;
        const char* colour = segment_colour(st.segment_index, n);
        const char* dash = st.orientation == Orientation::Vertical ? "6,3" : "";
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < st.mean_curve.size(); ++i) {
            pts.emplace_back(area.px(st.frequencies[i]), area.py(std::min(st.mean_curve[i], ymax)));
        }
        doc.polyline(pts, colour, 2.0, dash);
        const SfrCurve curve{st.frequencies, st.mean_curve, std::nullopt};
        for (const auto& e : local_extrema(curve)) {
            doc.cross(area.px(e.frequency), area.py(std::min(e.value, ymax)), 4,
                      e.kind == ExtremumKind::Maximum ? "red" : "blue", 1.5);
        }
        if (st.mean_mtf50) {
            doc.circle(area.px(*st.mean_mtf50), area.py(0.5), 4, colour, "white", 2.0);
        }
        char mtf[32] = "n/a";
        if (st.mean_mtf50) std::snprintf(mtf, sizeof mtf, "%.3f", *st.mean_mtf50);
        char label[160];
        std::snprintf(label, sizeof label, "%s %s (n=%d) MTF50=%s", segment_name(st.segment_index, n),
                      to_string(st.orientation), st.count_valid, mtf);
        doc.line(592, legend_y - 4, 612, legend_y - 4, colour, 2.0, dash);
        doc.text(616, legend_y, label, 9);
        legend_y += 16;
        ++drawn;
    }
    if (drawn == 0) doc.text(area.px(0.5), area.py(ymax / 2), "no data", 24, "#808080", "middle");
    doc.text(area.left, 20, "Mean SFR per radial segment", 14);
    return doc.str();
}

std::vector<std::string> overlay_sample(const std::vector<FrameSummary>& frames) {
    std::vector<std::string> ids;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < frames.size() && i < 5; ++i) {
        if (seen.insert(frames[i].id).second) ids.push_back(frames[i].id);
    }
    std::vector<const FrameSummary*> ranked;
    for (const auto& f : frames) ranked.push_back(&f);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const FrameSummary* a, const FrameSummary* b) { return a->valid > b->valid; });
    int added = 0;
    for (const FrameSummary* f : ranked) {
        if (added == 5) break;
        if (f->valid == 0) break;
        if (seen.insert(f->id).second) {
            ids.push_back(f->id);
            ++added;
        }
    }
    return ids;
}

namespace {

std::string sanitize(const std::string& id) {
    std::string out;
    for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

} // namespace

void render_figures(const fs::path& dir, const AnalyzeConfig& config, const AnalysisResult& result) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string());
    write_text_file(dir / "scatter.svg", scatter_svg(result));
    write_text_file(dir / "mean_mtf.svg", mean_mtf_svg(result));

    const auto ids = overlay_sample(result.frames);
    if (ids.empty()) return;
    std::map<std::string, std::vector<Measurement>> by_frame;
    for (const auto& m : result.measurements) by_frame[m.candidate.frame_id].push_back(m);
    const Dataset ds = load_dataset(config.input, config.glob, config.limit);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ds.size(); ++i) index[ds.entry(i).id] = i;
    for (const auto& id : ids) {
        const auto it = index.find(id);
        if (it == index.end()) continue;
        auto frame = ds.load(it->second);
        if (!frame) continue;
        write_text_file(dir / ("overlay_" + sanitize(id) + ".svg"), overlay_svg(*frame, by_frame[id]));
    }
}

} // namespace nssfr
