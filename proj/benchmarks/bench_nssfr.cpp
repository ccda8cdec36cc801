#include "nssfr/pipeline.hpp"
#include "nssfr/sfr.hpp"
#include "nssfr/synth.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace nssfr;

namespace {

RoiCandidate one_roi() {
    SynthEdgeSpec s;
    s.angle_deg = 5.0;
    const Frame f = make_slanted_edge(s);
    const auto v = ValidityMap::all_valid(f.width(), f.height());
    return extract_candidates(f, detect_edges(f.luminance, v), NsSfrParams{}, v).at(0);
}

/// Fisheye-like scene: a grid of edge patches inside a circular mask.
struct Scene {
    Frame frame;
    RegionMask mask;
};

Scene fisheye_scene(int width, int height) {
    SceneSpec sc;
    sc.width = width;
    sc.height = height;
    const double r = 0.48 * std::min(width, height);
    Polygon circle;
    for (int i = 0; i < 96; ++i) {
        const double a = 2 * M_PI * i / 96;
        circle.push_back({width / 2.0 + r * std::cos(a), height / 2.0 + r * std::sin(a)});
    }
    sc.mask = RegionMask{width, height, {circle}};
    for (int y = 80; y + 80 <= height; y += 160) {
        for (int x = 80; x + 80 <= width; x += 160) {
            if (std::hypot(x - width / 2.0, y - height / 2.0) > r - 110) continue;
            PlacedEdge e;
            e.center = {double(x), double(y)};
            e.spec.angle_deg = 6.0 + (x + y) % 30;
            e.spec.blur_sigma = 0.8 + 0.001 * std::hypot(x - width / 2.0, y - height / 2.0);
            e.spec.noise_sigma = 0.002;
            sc.edges.push_back(e);
        }
    }
    return {make_scene(sc, "scene"), *sc.mask};
}

void BM_MeasureRoi(benchmark::State& state) {
    const RoiCandidate c = one_roi();
    for (auto _ : state) benchmark::DoNotOptimize(measure_roi(c.patch, c.orientation, 5));
}
BENCHMARK(BM_MeasureRoi)->Unit(benchmark::kMicrosecond);

void BM_DetectEdges(benchmark::State& state) {
    const Scene s = fisheye_scene(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 3 / 4);
    const auto v = ValidityMap::all_valid(s.frame.width(), s.frame.height());
    for (auto _ : state) benchmark::DoNotOptimize(detect_edges(s.frame.luminance, v));
    state.SetItemsProcessed(state.iterations() * s.frame.width() * s.frame.height());
}
BENCHMARK(BM_DetectEdges)->Arg(640)->Arg(1280)->Unit(benchmark::kMillisecond);

void BM_Rasterize(benchmark::State& state) {
    const Scene s = fisheye_scene(1280, 960);
    for (auto _ : state) benchmark::DoNotOptimize(rasterize(s.mask, 1280, 960));
}
BENCHMARK(BM_Rasterize)->Unit(benchmark::kMillisecond);

void BM_MeasureFrame(benchmark::State& state) {
    const Scene s = fisheye_scene(1280, 960);
    AnalyzeConfig config;
    config.orientation = OrientationFilter::Both;
    const CameraSetup cam = prepare_camera(1280, 960, s.mask, config);
    std::size_t rois = 0;
    for (auto _ : state) {
        const auto m = measure_frame(s.frame, cam, config);
        rois = m.size();
        benchmark::DoNotOptimize(m);
    }
    state.counters["rois"] = static_cast<double>(rois);
}
BENCHMARK(BM_MeasureFrame)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
