#pragma once

#include "nssfr/roi_detect.hpp"

#include <optional>
#include <vector>

namespace nssfr {

/// Polynomial model of the edge crossing position along each scan line.
///
/// Scan lines are rows for vertical-class edges and columns for
/// horizontal-class edges. The polynomial is expressed in the normalized
/// abscissa t = (line - center) / scale so that every coefficient is in
/// pixels: coefficients[k] is the contribution of t^k at t = 1.
struct EdgeFit {
    Orientation orientation = Orientation::Vertical;
    std::vector<double> coefficients;
    double center = 0.0;
    double scale = 1.0;
    double mean_angle_deg = 0.0; ///< slant of the edge relative to the scan axis
    double rmse = 0.0;           ///< residual of the per-line crossings, px

    int order() const { return static_cast<int>(coefficients.size()) - 1; }
    double position(double line) const;
    /// d(position)/d(line)
    double slope(double line) const;
};

inline constexpr double kMaxFitRmsePx = 0.5;

/// Centroid of the per-line derivative, then a least-squares polynomial fit.
/// Throws MeasurementError(EdgeIncoherent) when rmse exceeds kMaxFitRmsePx or
/// too few lines carry an edge.
EdgeFit fit_edge(const RoiPatch& patch, Orientation orientation, int order);

inline constexpr int kSupersampling = 4;
inline constexpr double kEsfBinPx = 1.0 / kSupersampling;

/// Edge spread function, dark to light, sampled every kEsfBinPx along the
/// edge normal. values.front() corresponds to distance -half_width.
struct Esf {
    std::vector<double> values;
    double half_width_px = 0.0;
    int filled_bins = 0; ///< empty bins filled by interpolation
};

/// Projects support pixels onto the normal of the fitted edge and averages
/// them into 0.25 px bins. Throws MeasurementError(PhaseCoverage) when more
/// than 5% of the central 80% of bins are empty.
Esf project_esf(const RoiPatch& patch, const EdgeFit& fit, double half_width_px = kEsfHalfWidthPx);

inline constexpr double kSfrStep = 0.01;
inline constexpr double kSfrMaxFrequency = 1.0;

/// Sampled SFR on a uniform grid over [0, 1] cycles/pixel.
struct SfrCurve {
    std::vector<double> frequencies;
    std::vector<double> values;
    std::optional<double> mtf50;

    double step() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : kSfrStep; }
};

/// Uniform frequency grid i*step, i = 0..round(max/step).
std::vector<double> frequency_grid(double step = kSfrStep, double max_frequency = kSfrMaxFrequency);

/// LSF by central difference, Hamming window of half-width `window_half_width_px`
/// centred on the LSF centroid, DFT magnitude normalized by DC, then divided by
/// the derivative and binning transfer functions. mtf50 is filled in.
/// Throws MeasurementError(NoEdgeEnergy) for a flat ESF.
SfrCurve compute_sfr(const Esf& esf, double window_half_width_px = kEsfHalfWidthPx, double step = kSfrStep);

/// First downward crossing of 0.5, linearly interpolated; nullopt if the
/// curve never reaches 0.5.
std::optional<double> mtf50(const SfrCurve& curve);

struct SfrMeasurement {
    EdgeFit fit;
    Esf esf;
    SfrCurve curve;
};

/// fit_edge -> project_esf -> compute_sfr for one ROI.
SfrMeasurement measure_roi(const RoiPatch& patch, Orientation orientation, int edge_fit_order,
                           double half_width_px = kEsfHalfWidthPx);

/// sin(pi x) / (pi x)
double sinc(double x);

} // namespace nssfr
