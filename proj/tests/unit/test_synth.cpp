#include "nssfr/error.hpp"
#include "nssfr/sfr.hpp"
#include "nssfr/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nssfr;

TEST(AnalyticMtf, PixelApertureTimesGaussian) {
    for (double s : {0.0, 0.7, 1.3}) {
        for (double f : {0.0, 0.1, 0.33, 0.5, 0.9}) EXPECT_NEAR(analytic_mtf(s, f), oracle::gaussian_pixel_mtf(s, f), 1e-14);
    }
    EXPECT_NEAR(analytic_mtf50(0.0), 0.6034, 1e-3);
}

TEST(SlantedEdge, LevelsProfileAndOrientation) {
    SynthEdgeSpec s;
    s.blur_sigma = 0.0;
    s.angle_deg = 0.0;
    s.contrast = 0.6;
    s.mean_level = 0.4;
    const Frame f = make_slanted_edge(s);
    EXPECT_EQ(f.width(), 128);
    EXPECT_NEAR(f.luminance(0, 10), 0.1, 1e-12);   // dark side at -x
    EXPECT_NEAR(f.luminance(127, 10), 0.7, 1e-12); // light side
    // The edge passes through x = 64, the boundary between columns 63 and 64.
    EXPECT_NEAR(f.luminance(63, 10), 0.1, 1e-12);
    EXPECT_NEAR(f.luminance(64, 10), 0.7, 1e-12);
}

TEST(SlantedEdge, PixelValuesFollowApertureIntegratedCdf) {
    SynthEdgeSpec s;
    s.angle_deg = 7.0;
    s.blur_sigma = 1.2;
    const Frame f = make_slanted_edge(s);
    const double a = 7.0 * oracle::kPi / 180;
    for (int y = 20; y < 108; y += 11) {
        for (int x = 56; x < 72; ++x) {
            const double d = (x + 0.5 - 64) * std::cos(a) + (y + 0.5 - 64) * std::sin(a);
            const double expected = 0.25 + 0.5 * oracle::pixel_esf(d, 1.2, a, 64);
            EXPECT_NEAR(f.luminance(x, y), expected, 2e-3);
        }
    }
}

TEST(SlantedEdge, SeededNoiseIsReproducible) {
    SynthEdgeSpec s;
    s.noise_sigma = 0.01;
    s.seed = 42;
    const Frame a = make_slanted_edge(s), b = make_slanted_edge(s);
    EXPECT_EQ(a.luminance, b.luminance);
    s.seed = 43;
    EXPECT_NE(make_slanted_edge(s).luminance, a.luminance);
    // Noise standard deviation on the flat dark side.
    s.seed = 42;
    const Frame clean = [&] {
        SynthEdgeSpec c = s;
        c.noise_sigma = 0;
        return make_slanted_edge(c);
    }();
    double acc = 0, acc2 = 0;
    int n = 0;
    for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 40; ++x) {
            const double d = a.luminance(x, y) - clean.luminance(x, y);
            acc += d;
            acc2 += d * d;
            ++n;
        }
    }
    const double mean = acc / n;
    EXPECT_NEAR(std::sqrt(acc2 / n - mean * mean), 0.01, 0.001);
}

TEST(SlantedEdge, SupersamplingConverges) {
    auto measured = [](int ss) {
        SynthEdgeSpec s;
        s.supersampling = ss;
        const Frame f = make_slanted_edge(s);
        const auto v = ValidityMap::all_valid(f.width(), f.height());
        auto c = extract_candidates(f, detect_edges(f.luminance, v), {}, v);
        return *measure_roi(c.at(0).patch, c.at(0).orientation, 5).curve.mtf50;
    };
    EXPECT_LT(std::abs(measured(8) - measured(16)), 0.002);
}

TEST(SlantedEdge, SpecValidation) {
    SynthEdgeSpec s;
    s.contrast = 1.0;
    EXPECT_THROW(make_slanted_edge(s), ConfigError);
    s = {};
    s.blur_sigma = -1;
    EXPECT_THROW(make_slanted_edge(s), ConfigError);
    s = {};
    s.mean_level = 0.9;
    EXPECT_THROW(make_slanted_edge(s), ConfigError);
}

TEST(Scene, CompositesPatchesAndPaintsOutsideMask) {
    SceneSpec sc;
    sc.width = 400;
    sc.height = 300;
    PlacedEdge e;
    e.center = {100, 100};
    sc.edges.push_back(e);
    e.center = {260, 150};
    sc.edges.push_back(e);
    const Frame f = make_scene(sc);
    EXPECT_EQ(f.width(), 400);
    EXPECT_DOUBLE_EQ(f.luminance(5, 5), 0.5);
    const Frame patch = make_slanted_edge(e.spec);
    EXPECT_EQ(f.luminance(36, 36), patch.luminance(0, 0));
    EXPECT_EQ(f.luminance(196 + 127, 86 + 127), patch.luminance(127, 127));

    sc.mask = RegionMask{400, 300, {{{0, 0}, {200, 0}, {200, 300}, {0, 300}}}};
    const Frame masked = make_scene(sc);
    EXPECT_DOUBLE_EQ(masked.luminance(300, 150), sc.outside_mask);
    EXPECT_EQ(masked.luminance(100, 100), f.luminance(100, 100));
}

TEST(Scene, OverlapAndOutOfFrameAreErrors) {
    SceneSpec sc;
    sc.width = 400;
    sc.height = 300;
    PlacedEdge e;
    e.center = {100, 100};
    sc.edges = {e, e};
    EXPECT_THROW(make_scene(sc), ConfigError);
    sc.edges[1].center = {100 + 128 + 5, 100};
    EXPECT_THROW(make_scene(sc), ConfigError); // closer than min_separation
    sc.edges[1].center = {100 + 128 + 10, 100};
    EXPECT_NO_THROW(make_scene(sc));
    sc.edges = {e};
    sc.edges[0].center = {30, 100};
    EXPECT_THROW(make_scene(sc), ConfigError);
}

TEST(SynthJob, ParsesEdgesScenesAndRepeats) {
    const auto job = parse_synth_json(R"({
      "bit_depth": 8,
      "frames": [
        {"id": "e", "edge": {"angle_deg": 7, "blur_sigma": 0.5, "seed": 10}},
        {"id": "s", "repeat": 2, "scene": {"width": 300, "height": 200,
           "mask": {"reference_size": [300, 200], "polygons": [[[0,0],[300,0],[300,200],[0,200]]]},
           "edges": [{"center": [100, 100], "noise_sigma": 0.01, "seed": 5}]}}
      ]})");
    EXPECT_EQ(job.bit_depth, 8);
    ASSERT_EQ(job.frames.size(), 3u);
    EXPECT_EQ(job.frames[0].id, "e");
    EXPECT_DOUBLE_EQ(job.frames[0].edge->angle_deg, 7);
    EXPECT_EQ(job.frames[1].id, "s_000");
    EXPECT_EQ(job.frames[2].id, "s_001");
    EXPECT_EQ(job.frames[2].scene->edges[0].spec.seed, 6u);
    EXPECT_TRUE(job.frames[1].scene->mask);
    EXPECT_EQ(render(job.frames[1]).width(), 300);
    EXPECT_NE(render(job.frames[1]).luminance, render(job.frames[2]).luminance);
}

TEST(SynthJob, MalformedInput) {
    EXPECT_THROW(parse_synth_json("{"), ConfigError);
    EXPECT_THROW(parse_synth_json(R"({"frames": []})"), ConfigError);
    EXPECT_THROW(parse_synth_json(R"({"frames": [{"id": "a"}]})"), ConfigError);
    EXPECT_THROW(parse_synth_json(R"({"frames": [{"id": "a", "edge": {"blurr": 1}}]})"), ConfigError);
    EXPECT_THROW(parse_synth_json(R"({"bit_depth": 12, "frames": [{"id": "a", "edge": {}}]})"), ConfigError);
}
