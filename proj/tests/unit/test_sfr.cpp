#include "nssfr/error.hpp"
#include "nssfr/sfr.hpp"
#include "nssfr/synth.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nssfr;

namespace {

/// Edges are traced on the noise-free rendering so that noise only reaches
/// the measurement.
RoiCandidate single_candidate(const SynthEdgeSpec& spec) {
    const Frame f = make_slanted_edge(spec);
    SynthEdgeSpec clean_spec = spec;
    clean_spec.noise_sigma = 0.0;
    const Frame clean = make_slanted_edge(clean_spec);
    const auto v = ValidityMap::all_valid(f.width(), f.height());
    NsSfrParams p;
    p.st = 0.05;
    auto c = extract_candidates(f, detect_edges(clean.luminance, v), p, v);
    if (c.size() != 1) throw std::runtime_error("expected exactly one candidate, got " + std::to_string(c.size()));
    return c[0];
}

SfrMeasurement measure(const SynthEdgeSpec& spec, int order = 5) {
    const auto c = single_candidate(spec);
    return measure_roi(c.patch, c.orientation, order);
}

SynthEdgeSpec edge(double angle, double sigma, double noise = 0.0) {
    SynthEdgeSpec s;
    s.angle_deg = angle;
    s.blur_sigma = sigma;
    s.noise_sigma = noise;
    return s;
}

SfrCurve curve_of(std::vector<double> values) {
    SfrCurve c;
    c.frequencies = frequency_grid(0.01, 0.01 * (values.size() - 1));
    c.values = std::move(values);
    return c;
}

} // namespace

TEST(Sinc, Values) {
    EXPECT_DOUBLE_EQ(sinc(0.0), 1.0);
    EXPECT_NEAR(sinc(1.0), 0.0, 1e-15);
    EXPECT_NEAR(sinc(0.5), 2.0 / oracle::kPi, 1e-15);
    EXPECT_NEAR(sinc(-0.3), oracle::sinc(0.3), 1e-15);
}

TEST(FrequencyGrid, UniformOverZeroToOne) {
    const auto f = frequency_grid();
    ASSERT_EQ(f.size(), 101u);
    EXPECT_DOUBLE_EQ(f.front(), 0.0);
    EXPECT_NEAR(f.back(), 1.0, 1e-12);
    EXPECT_NEAR(f[50], 0.5, 1e-12);
}

TEST(Mtf50, InterpolatesFirstDownwardCrossing) {
    const auto c = curve_of({1.0, 0.8, 0.6, 0.4, 0.2, 0.6, 0.3});
    ASSERT_TRUE(mtf50(c));
    EXPECT_NEAR(*mtf50(c), 0.025, 1e-12);
    EXPECT_FALSE(mtf50(curve_of({1.0, 0.9, 0.8, 0.7})));
    EXPECT_NEAR(*mtf50(curve_of({1.0, 0.5, 0.2})), 0.01, 1e-12);
}

TEST(EdgeFit, PolynomialEvaluation) {
    EdgeFit fit;
    fit.coefficients = {1.0, 2.0, 3.0};
    fit.center = 10.0;
    fit.scale = 2.0;
    // t = (12 - 10)/2 = 1 -> 1 + 2 + 3
    EXPECT_DOUBLE_EQ(fit.position(12.0), 6.0);
    // d/dline = (2 + 6t)/scale
    EXPECT_DOUBLE_EQ(fit.slope(12.0), 4.0);
    EXPECT_EQ(fit.order(), 2);
}

TEST(FitEdge, StraightEdgeSlopeForEveryOrder) {
    const auto c = single_candidate(edge(5.0, 1.0));
    for (int order : {1, 3, 5}) {
        const auto fit = fit_edge(c.patch, c.orientation, order);
        EXPECT_EQ(fit.order(), order);
        EXPECT_LT(fit.rmse, 0.02);
        EXPECT_NEAR(std::abs(fit.slope(fit.center)), std::tan(5.0 * oracle::kPi / 180), 0.005);
    }
}

namespace {

/// Edge x = 64 + 0.1 (y - 64) + k (y - 64)^2, dark left, support within 16 px
/// of the curve on lines 16..111.
RoiPatch curved_patch(double k) {
    const int n = 128;
    auto xe = [k](double y) { return 64 + 0.1 * (y - 64) + k * (y - 64) * (y - 64); };
    RoiPatch patch;
    patch.lum = LuminanceImage(n, n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            double acc = 0;
            for (int j = 0; j < 8; ++j) {
                const double e = xe(y + (j + 0.5) / 8);
                for (int i = 0; i < 8; ++i) acc += oracle::normal_cdf(x + (i + 0.5) / 8 - e);
            }
            patch.lum(x, y) = 0.25 + 0.5 * acc / 64;
        }
    }
    patch.support = Grid<std::uint8_t>(n, n, 0);
    for (int y = 16; y < 112; ++y) {
        for (int x = 0; x < n; ++x) patch.support(x, y) = std::abs(x + 0.5 - xe(y + 0.5)) <= 16 ? 1 : 0;
    }
    return patch;
}

} // namespace

TEST(FitEdge, CurvedEdgeNeedsHigherOrder) {
    // About 1 px of sag over the fitted lines.
    const RoiPatch patch = curved_patch(0.0005);
    const auto linear = fit_edge(patch, Orientation::Vertical, 1);
    const auto quintic = fit_edge(patch, Orientation::Vertical, 5);
    EXPECT_LT(quintic.rmse, 0.05);
    EXPECT_GT(linear.rmse, 3 * quintic.rmse);
}

TEST(FitEdge, StronglyCurvedEdgeIsIncoherentForALine) {
    const RoiPatch patch = curved_patch(0.004);
    try {
        fit_edge(patch, Orientation::Vertical, 1);
        FAIL() << "expected EdgeIncoherent";
    } catch (const MeasurementError& e) {
        EXPECT_EQ(e.kind(), MeasurementError::Kind::EdgeIncoherent);
    }
    EXPECT_LT(fit_edge(patch, Orientation::Vertical, 5).rmse, 0.05);
}

TEST(FitEdge, AxisAlignedEdgeHasNoPhaseCoverage) {
    RoiPatch patch;
    patch.lum = LuminanceImage(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) patch.lum(x, y) = 0.25 + 0.5 * oracle::normal_cdf(x + 0.5 - 32.3);
    }
    try {
        measure_roi(patch, Orientation::Vertical, 5);
        FAIL() << "expected a phase coverage failure";
    } catch (const MeasurementError& e) {
        EXPECT_EQ(e.kind(), MeasurementError::Kind::PhaseCoverage);
    }
}

TEST(FitEdge, NoEdgeIsIncoherent) {
    RoiPatch patch;
    patch.lum = LuminanceImage(64, 64, 0.5);
    try {
        fit_edge(patch, Orientation::Vertical, 5);
        FAIL();
    } catch (const MeasurementError& e) {
        EXPECT_EQ(e.kind(), MeasurementError::Kind::EdgeIncoherent);
    }
}

TEST(ComputeSfr, FlatEsfHasNoEdgeEnergy) {
    Esf esf;
    esf.half_width_px = 16;
    esf.values.assign(128, 0.5);
    try {
        compute_sfr(esf);
        FAIL();
    } catch (const MeasurementError& e) {
        EXPECT_EQ(e.kind(), MeasurementError::Kind::NoEdgeEnergy);
    }
}

TEST(ProjectEsf, MatchesApertureConvolvedGaussianCdf) {
    for (double angle : {5.0, 12.0}) {
        const auto spec = edge(angle, 1.0);
        const auto m = measure(spec);
        const double lo = spec.mean_level - spec.contrast / 2;
        ASSERT_EQ(m.esf.values.size(), 128u);
        double worst = 0.0;
        for (std::size_t k = 0; k < m.esf.values.size(); ++k) {
            const double d = -16.0 + (k + 0.5) * kEsfBinPx;
            const double expected = oracle::pixel_esf(d, 1.0, angle * oracle::kPi / 180);
            worst = std::max(worst, std::abs((m.esf.values[k] - lo) / spec.contrast - expected));
        }
        EXPECT_LT(worst, 0.01) << "angle " << angle;
        EXPECT_EQ(m.esf.filled_bins, 0);
    }
}

TEST(ComputeSfr, IdealStepFollowsPixelAperture) {
    const auto m = measure(edge(5.0, 0.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < m.curve.frequencies.size(); ++k) {
        const double f = m.curve.frequencies[k];
        if (f > 0.5 + 1e-9) break;
        worst = std::max(worst, std::abs(m.curve.values[k] - std::abs(oracle::sinc(f))));
    }
    EXPECT_LE(worst, 0.02);
    EXPECT_DOUBLE_EQ(m.curve.values[0], 1.0);
}

TEST(ComputeSfr, GaussianBlurMtf50MatchesAnalyticRoot) {
    for (double sigma : {0.6, 1.0, 1.4, 1.8}) {
        const double expected = oracle::gaussian_pixel_mtf50(sigma);
        const auto m = measure(edge(5.0, sigma));
        ASSERT_TRUE(m.curve.mtf50) << sigma;
        EXPECT_NEAR(*m.curve.mtf50 / expected, 1.0, 0.05) << "sigma " << sigma;
    }
}

TEST(ComputeSfr, AnalyticRootMatchesLibraryHelper) {
    for (double sigma : {0.5, 1.0, 2.0}) EXPECT_NEAR(analytic_mtf50(sigma), oracle::gaussian_pixel_mtf50(sigma), 1e-9);
    EXPECT_NEAR(oracle::gaussian_pixel_mtf50(1.0), 0.18, 0.001);
}

TEST(ComputeSfr, RobustToAngleAndOrientation) {
    std::vector<double> results;
    for (double angle : {3.0, 8.0, 12.0, 93.0, 98.0, 102.0, 188.0, 278.0}) {
        const auto m = measure(edge(angle, 1.0));
        ASSERT_TRUE(m.curve.mtf50) << angle;
        results.push_back(*m.curve.mtf50);
    }
    const auto [lo, hi] = std::minmax_element(results.begin(), results.end());
    EXPECT_LE((*hi - *lo) / *lo, 0.03);
}

TEST(ComputeSfr, ModestNoiseKeepsMtf50) {
    const double expected = oracle::gaussian_pixel_mtf50(1.0);
    for (std::uint64_t seed : {1, 2, 3}) {
        auto spec = edge(5.0, 1.0, 0.004);
        spec.seed = seed;
        const auto m = measure(spec);
        ASSERT_TRUE(m.curve.mtf50);
        EXPECT_NEAR(*m.curve.mtf50 / expected, 1.0, 0.05);
    }
}

TEST(ComputeSfr, SharpeningRaisesThePeak) {
    auto spec = edge(5.0, 1.0);
    spec.sharpen_gain = 3.0;
    const auto m = measure(spec);
    const double peak = *std::max_element(m.curve.values.begin(), m.curve.values.end());
    EXPECT_GT(peak, 1.4);
}
