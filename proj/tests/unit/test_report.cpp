#include "nssfr/report.hpp"
#include "nssfr/synth.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <regex>

using namespace nssfr;

namespace {

Measurement meas(const std::string& frame, int roi, int segment, bool valid, double m50) {
    Measurement m;
    m.candidate.frame_id = frame;
    m.candidate.roi_index = roi;
    m.candidate.bbox = {10 + roi, 20, 40, 68};
    m.candidate.centroid = {30.5 + roi, 54.25};
    m.candidate.edge_angle_deg = 95.123456789;
    m.candidate.contrast = 0.5;
    m.candidate.orientation = Orientation::Horizontal;
    m.segment = segment;
    SfrCurve c;
    c.frequencies = frequency_grid();
    for (double f : c.frequencies) c.values.push_back(std::max(0.0, 1.0 - 0.5 * f / m50));
    c.mtf50 = mtf50(c);
    m.curve = c;
    if (!valid) m.verdict = failed_verdict(VerdictReason::NoiseFloor);
    return m;
}

AnalysisResult sample_result() {
    AnalysisResult r;
    r.frames_matched = 3;
    r.frame_width = 200;
    r.frame_height = 100;
    r.segmentation = {{100, 50}, std::hypot(100.0, 50.0), {}};
    r.segmentation.boundaries = {r.segmentation.r_e / 3, 2 * r.segmentation.r_e / 3, r.segmentation.r_e};
    r.measurements = {meas("b.png", 1, 1, true, 0.2), meas("a.png", 0, 0, true, 0.3), meas("b.png", 0, 2, false, 0.1),
                      meas("a.png", 1, 1, true, 0.25)};
    r.frames = {{"a.png", 2, 2}, {"b.png", 2, 1}};
    r.skipped = {{"c.png", "decode failed"}};
    r.stats = accumulate(r.measurements, r.segmentation, {Orientation::Horizontal});
    for (const auto& st : r.stats) {
        if (auto w = sufficiency_check(st, 3)) r.warnings.push_back(*w);
    }
    return r;
}

/// Minimal XML well-formedness: balanced tags, quoted attributes, one root.
bool well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    int roots = 0;
    while ((i = xml.find('<', i)) != std::string::npos) {
        const std::size_t end = xml.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = xml.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.back() == '/';
        const std::string name = tag.substr(0, tag.find_first_of(" /"));
        if (stack.empty()) ++roots;
        if (!self_closing) stack.push_back(name);
    }
    return stack.empty() && roots == 1;
}

bool self_contained(const std::string& svg) {
    std::string rest = svg;
    const std::string ns = "http://www.w3.org/2000/svg";
    for (std::size_t p; (p = rest.find(ns)) != std::string::npos;) rest.erase(p, ns.size());
    if (rest.find("http") != std::string::npos) return false;
    const std::regex href(R"(href="([^"]*)\")");
    for (auto it = std::sregex_iterator(rest.begin(), rest.end(), href); it != std::sregex_iterator(); ++it) {
        if ((*it)[1].str().rfind("data:", 0) != 0) return false;
    }
    return true;
}

} // namespace

TEST(Csv, HeaderRowsSortedAndFormatted) {
    const auto csv = measurements_csv(sample_result().measurements);
    std::vector<std::string> lines;
    std::stringstream ss(csv);
    for (std::string l; std::getline(ss, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], kCsvHeader);
    EXPECT_EQ(lines[1].rfind("a.png,0,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("a.png,1,", 0), 0u);
    EXPECT_EQ(lines[3].rfind("b.png,0,", 0), 0u);
    EXPECT_EQ(lines[1], "a.png,0,10,20,40,68,30.5,54.25,95.1235,horizontal,0.5,0,valid,none,0.3");
    EXPECT_EQ(lines[3], "b.png,0,10,20,40,68,30.5,54.25,95.1235,horizontal,0.5,2,invalid,noise_floor,0.1");
}

TEST(Csv, FailedMeasurementHasEmptyMtf50AndIdsAreEscaped) {
    Measurement m;
    m.candidate.frame_id = "odd,\"name\".png";
    m.verdict = failed_verdict(VerdictReason::PhaseCoverage);
    const auto csv = measurements_csv({m});
    EXPECT_NE(csv.find("\"odd,\"\"name\"\".png\""), std::string::npos);
    EXPECT_NE(csv.find("invalid,phase_coverage,\n"), std::string::npos);
}

TEST(Summary, EchoesConfigAndGroups) {
    AnalyzeConfig config;
    config.input = "frames";
    config.params.st = 0.04;
    config.params.esfw = 10;
    config.threads = 8;
    config.out = "somewhere";
    const auto r = sample_result();
    const auto doc = nlohmann::json::parse(summary_json(config, r));
    EXPECT_DOUBLE_EQ(doc["config"]["st"].get<double>(), 0.04);
    EXPECT_EQ(doc["config"]["esfw"].get<int>(), 10);
    EXPECT_EQ(doc["config"]["exclusion_margin"].get<int>(), 20);
    EXPECT_TRUE(doc["config"]["mask"].is_null());
    EXPECT_FALSE(doc["config"].contains("threads"));
    EXPECT_FALSE(doc["config"].contains("out"));
    EXPECT_DOUBLE_EQ(doc["segmentation"]["r_e"].get<double>(), r.segmentation.r_e);
    EXPECT_EQ(doc["segmentation"]["boundaries"].size(), 3u);
    EXPECT_EQ(doc["dataset"]["skipped"][0]["id"], "c.png");
    EXPECT_EQ(doc["totals"]["candidates"].get<int>(), 4);
    EXPECT_EQ(doc["totals"]["valid"].get<int>(), 3);
    ASSERT_EQ(doc["groups"].size(), 3u);
    EXPECT_EQ(doc["groups"][1]["name"], "middle");
    EXPECT_EQ(doc["groups"][1]["count_valid"].get<int>(), 2);
    EXPECT_NEAR(doc["groups"][1]["mean_mtf50"].get<double>(), 0.225, 1e-12);
    EXPECT_TRUE(doc["groups"][2]["mean_mtf50"].is_null());
    EXPECT_EQ(doc["warnings"].size(), 3u);
    EXPECT_FALSE(doc["version"].get<std::string>().empty());
    EXPECT_EQ(summary_json(config, r), summary_json(config, r));
}

TEST(Figures, MeanMtfHasOneCurvePerPopulatedGroup) {
    auto r = sample_result();
    r.measurements.push_back(meas("c.png", 0, 2, true, 0.12));
    r.stats = accumulate(r.measurements, r.segmentation, {Orientation::Horizontal});
    const auto svg = mean_mtf_svg(r);
    EXPECT_TRUE(well_formed(svg));
    EXPECT_TRUE(self_contained(svg));
    std::size_t n = 0;
    for (std::size_t p = 0; (p = svg.find("<polyline", p)) != std::string::npos; ++p) ++n;
    EXPECT_EQ(n, 3u);
    EXPECT_EQ(svg.find("no data"), std::string::npos);
}

TEST(Figures, EmptyRunSaysNoData) {
    AnalysisResult r;
    r.frame_width = 320;
    r.frame_height = 240;
    r.segmentation = {{160, 120}, 200, {66.7, 133.3, 200}};
    r.stats = accumulate({}, r.segmentation, {Orientation::Horizontal});
    for (const auto& svg : {mean_mtf_svg(r), scatter_svg(r)}) {
        EXPECT_TRUE(well_formed(svg));
        EXPECT_NE(svg.find("no data"), std::string::npos);
    }
}

TEST(Figures, ScatterMarksValidEdgesAndCircles) {
    auto r = sample_result();
    r.mask = RegionMask{200, 100, {{{0, 0}, {200, 0}, {100, 100}}}};
    const auto svg = scatter_svg(r);
    EXPECT_TRUE(well_formed(svg));
    EXPECT_TRUE(self_contained(svg));
    EXPECT_NE(svg.find("orange"), std::string::npos);
    EXPECT_NE(svg.find("<polygon"), std::string::npos);
    EXPECT_NE(svg.find(": 3<"), std::string::npos);
}

TEST(Figures, OverlayEmbedsFrameAndColoursVerdicts) {
    SynthEdgeSpec s;
    const Frame f = make_slanted_edge(s, "x");
    const auto svg = overlay_svg(f, {meas("x", 0, 0, true, 0.2), meas("x", 1, 0, false, 0.2)});
    EXPECT_TRUE(well_formed(svg));
    EXPECT_TRUE(self_contained(svg));
    EXPECT_NE(svg.find("data:image/png;base64,iVBORw0KGgo"), std::string::npos);
    EXPECT_NE(svg.find("#00c000"), std::string::npos);
    EXPECT_NE(svg.find("#e00000"), std::string::npos);
}

TEST(Figures, OverlaySampleFirstFivePlusBusiest) {
    std::vector<FrameSummary> frames;
    for (int i = 0; i < 20; ++i) frames.push_back({"f" + std::to_string(100 + i), 10, i == 3 ? 50 : i});
    const auto ids = overlay_sample(frames);
    ASSERT_EQ(ids.size(), 10u);
    EXPECT_EQ(ids[0], "f100");
    EXPECT_EQ(ids[4], "f104");
    EXPECT_EQ(ids[5], "f119");
    EXPECT_EQ(ids[9], "f115");
    EXPECT_EQ(overlay_sample({}).size(), 0u);
}
