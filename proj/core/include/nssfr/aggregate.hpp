#pragma once

#include "nssfr/radial.hpp"
#include "nssfr/roi_detect.hpp"
#include "nssfr/sfr.hpp"
#include "nssfr/validate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nssfr {

/// One candidate with whatever the measurement stage produced for it.
struct Measurement {
    RoiCandidate candidate;
    std::optional<SfrCurve> curve; ///< absent when the SFR could not be computed
    Verdict verdict;
    int segment = 0;
};

struct SegmentStats {
    int segment_index = 0;
    Orientation orientation = Orientation::Horizontal;
    int count_valid = 0;
    int count_invalid = 0;     ///< produced a curve, rejected by classify
    int count_failed = 0;      ///< no curve (incoherent edge, poor phase coverage)
    int count_no_crossing = 0; ///< valid, but the curve never fell to 0.5
    std::vector<double> frequencies;
    std::vector<double> mean_curve;
    std::optional<double> mean_mtf50;
    double mtf50_stddev = 0.0;
    std::optional<double> mean_curve_mtf50; ///< MTF50 of mean_curve itself
    std::optional<double> min_mtf50;
    std::optional<double> max_mtf50;
    bool low_confidence = false;
};

/// Groups measurements by (segment, orientation) for every segment and every
/// orientation in `orientations`, in that order. Input order does not matter.
std::vector<SegmentStats> accumulate(const std::vector<Measurement>& measurements, const RadialSegmentation& seg,
                                     const std::vector<Orientation>& orientations);

/// More than this many valid edges are needed for a confident mean.
inline constexpr int kSufficientValidEdges = 20;

/// Warning text when the group has too few valid edges, empty otherwise.
std::optional<std::string> sufficiency_check(const SegmentStats& stats, int n_segments);

} // namespace nssfr
