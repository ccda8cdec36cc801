#include "nssfr/error.hpp"
#include "nssfr/radial.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nssfr;

namespace {

oracle::Bits bits_of(const ValidityMap& v) {
    oracle::Bits b(v.height(), std::vector<bool>(v.width()));
    for (int y = 0; y < v.height(); ++y) {
        for (int x = 0; x < v.width(); ++x) b[y][x] = v.at(x, y);
    }
    return b;
}

RegionMask circle(int w, int h, double cx, double cy, double r) {
    Polygon p;
    for (int i = 0; i < 1440; ++i) {
        const double a = 2 * oracle::kPi * i / 1440;
        p.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return {w, h, {p}};
}

} // namespace

TEST(Center, UnmaskedIsImageCentre) {
    const auto v = ValidityMap::all_valid(1242, 375);
    EXPECT_EQ(reference_center(v, false), (Point2d{621.0, 187.5}));
}

TEST(Center, MaskedIsValidCentroid) {
    const auto c = reference_center(rasterize(circle(800, 800, 400, 400, 300), 800, 800), true);
    EXPECT_NEAR(c.x, 400, 0.5);
    EXPECT_NEAR(c.y, 400, 0.5);
    const RegionMask left{200, 100, {{{0, 0}, {100, 0}, {100, 100}, {0, 100}}}};
    const auto l = reference_center(rasterize(left, 200, 100), true);
    EXPECT_NEAR(l.x, 50, 1e-9);
    EXPECT_NEAR(l.y, 50, 1e-9);
}

TEST(MaxRadius, CornerDistanceWithoutMask) {
    const auto v = ValidityMap::all_valid(100, 100);
    EXPECT_NEAR(max_radius({50, 50}, v, false), std::sqrt(5000.0), 1e-12);
}

TEST(MaxRadius, CircleOfRadius400) {
    const auto v = rasterize(circle(1000, 1000, 500, 500, 400), 1000, 1000);
    const Point2d c = reference_center(v, true);
    EXPECT_NEAR(max_radius(c, v, true), 400, 1.0);
}

TEST(MaxRadius, FullFrameMaskEqualsCornerDistance) {
    const RegionMask full{128, 96, {{{0, 0}, {128, 0}, {128, 96}, {0, 96}}}};
    const auto v = rasterize(full, 128, 96);
    const Point2d c = reference_center(v, true);
    EXPECT_NEAR(max_radius(c, v, true), max_radius(c, v, false), 1e-12);
}

TEST(MaxRadius, MatchesBruteForceOnRandomMasks) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int w = 90, h = 70;
        Polygon p;
        const int n = 3 + static_cast<int>(u(rng) * 10);
        std::vector<double> angles(n);
        for (double& a : angles) a = 2 * oracle::kPi * u(rng);
        std::sort(angles.begin(), angles.end());
        for (double a : angles) {
            const double r = 10 + 30 * u(rng);
            p.push_back({std::clamp(45 + r * std::cos(a), 0.0, 90.0), std::clamp(35 + r * std::sin(a), 0.0, 70.0)});
        }
        ValidityMap v;
        try {
            v = rasterize(RegionMask{w, h, {p}}, w, h);
        } catch (const ConfigError&) {
            continue;
        }
        const Point2d c = reference_center(v, true);
        EXPECT_DOUBLE_EQ(max_radius(c, v, true), oracle::brute_max_radius(bits_of(v), c.x, c.y));
    }
}

TEST(SegmentRadii, ProportionalAndCustom) {
    EXPECT_EQ(segment_radii(300, 3), (std::vector<double>{100, 200, 300}));
    const auto b = segment_radii(70.71, 3);
    EXPECT_NEAR(b[0], 23.57, 1e-9);
    EXPECT_NEAR(b[1], 47.14, 1e-9);
    EXPECT_DOUBLE_EQ(b[2], 70.71);
    EXPECT_THROW(segment_radii(100, 1), ConfigError);
    EXPECT_THROW(segment_radii(0, 3), ConfigError);
    EXPECT_EQ(segment_radii(200, std::vector<double>{0.25, 0.5, 1.0}), (std::vector<double>{50, 100, 200}));
    EXPECT_THROW(segment_radii(200, std::vector<double>{0.5, 0.4, 1.0}), ConfigError);
    EXPECT_THROW(segment_radii(200, std::vector<double>{0.5, 0.9}), ConfigError);
}

TEST(Classify, HalfOpenIntervalsAndOuterBound) {
    RadialSegmentation seg{{0, 0}, 300, {100, 200, 300}};
    EXPECT_EQ(classify_location({0, 0}, seg), 0);
    EXPECT_EQ(classify_location({99.999, 0}, seg), 0);
    EXPECT_EQ(classify_location({100, 0}, seg), 1);
    EXPECT_EQ(classify_location({0, 200}, seg), 2);
    EXPECT_EQ(classify_location({300, 0}, seg), 2);
    EXPECT_THROW(classify_location({300.001, 0}, seg), Error);
}

TEST(Classify, MatchesIntervalSearchOnRandomPoints) {
    const auto v = ValidityMap::all_valid(640, 480);
    const auto seg = build_segmentation(v, false, 3);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ux(0, 640), uy(0, 480);
    for (int i = 0; i < 10000; ++i) {
        const Point2d p{ux(rng), uy(rng)};
        const double r = std::hypot(p.x - seg.center.x, p.y - seg.center.y);
        ASSERT_EQ(classify_location(p, seg), oracle::brute_segment(r, seg.boundaries));
    }
}

TEST(Classify, RotationAndScalingInvariance) {
    const auto v1 = rasterize(circle(400, 400, 200, 200, 180), 400, 400);
    const auto s1 = build_segmentation(v1, true, 3);
    const auto v2 = rasterize(circle(800, 800, 400, 400, 360), 800, 800);
    const auto s2 = build_segmentation(v2, true, 3);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-120, 120);
    for (int i = 0; i < 2000; ++i) {
        const double dx = u(rng), dy = u(rng);
        const int k = classify_location({s1.center.x + dx, s1.center.y + dy}, s1);
        // 90 degree rotation about the centre
        EXPECT_EQ(classify_location({s1.center.x - dy, s1.center.y + dx}, s1), k);
        // Scale by 2; radii scale within one pixel so skip points near a boundary.
        const double r = std::hypot(dx, dy);
        bool near = false;
        for (double b : s1.boundaries) near = near || std::abs(r - b) < 1.5;
        if (!near) EXPECT_EQ(classify_location({s2.center.x + 2 * dx, s2.center.y + 2 * dy}, s2), k);
    }
}

TEST(Segmentation, BuildAndNames) {
    const auto seg = build_segmentation(ValidityMap::all_valid(100, 100), false, 3);
    EXPECT_NEAR(seg.r_e, std::sqrt(5000.0), 1e-12);
    EXPECT_EQ(seg.n_segments(), 3);
    EXPECT_DOUBLE_EQ(seg.boundaries.back(), seg.r_e);
    EXPECT_STREQ(segment_name(0, 3), "center");
    EXPECT_STREQ(segment_name(1, 3), "middle");
    EXPECT_STREQ(segment_name(2, 3), "edge");
    const auto custom = build_segmentation(ValidityMap::all_valid(100, 100), false, 3, {0.2, 0.6, 1.0});
    EXPECT_NEAR(custom.boundaries[0], 0.2 * custom.r_e, 1e-12);
}
