#pragma once

#include "nssfr/image.hpp"
#include "nssfr/mask.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nssfr {

enum class Orientation { Horizontal, Vertical };

const char* to_string(Orientation o);

/// Which orientation classes a run keeps.
enum class OrientationFilter { Horizontal, Vertical, Both };

bool accepts(OrientationFilter filter, Orientation o);

/// Slanted-edge selection parameters.
struct NsSfrParams {
    double contrast_min = 0.1;
    double contrast_max = 0.9;
    double st = 0.02;          ///< max std-dev of the flat tails, normalized luminance
    int esfw = 5;              ///< min separation (px) between an edge and its neighbours
    double angle_exclusion_deg = 2.0;
    int edge_fit_order = 5;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// Half-width (px) of the band sampled across an edge. 16 px gives a
/// 128-bin ESF at 4x supersampling.
inline constexpr int kEsfHalfWidthPx = 16;

/// ROI extent along the edge.
inline constexpr int kRoiMaxLengthPx = 64;
inline constexpr int kRoiMinLengthPx = 32;

/// Luminance of an ROI plus the band of pixels that belong to the edge
/// measurement. An empty support means every pixel participates.
struct RoiPatch {
    LuminanceImage lum;
    Grid<std::uint8_t> support;

    bool in_support(int x, int y) const { return support.empty() || support(x, y) != 0; }
};

struct RoiCandidate {
    std::string frame_id;
    int roi_index = 0;
    RectI bbox;              ///< original frame coordinates
    Point2d centroid;        ///< original frame coordinates, pixel centres at +0.5
    double edge_angle_deg = 0.0; ///< direction of the dark-to-light normal, [0,360)
    double contrast = 0.0;
    Orientation orientation = Orientation::Vertical;
    RoiPatch patch;
};

using EdgeMap = Grid<std::uint8_t>;

/// Canny edges (Gaussian sigma 1, Sobel, percentile hysteresis) AND-ed
/// with the validity map.
EdgeMap detect_edges(const LuminanceImage& lum, const ValidityMap& vmap);

/// Counters for why runs were dropped; useful for tuning and diagnostics.
struct CandidateStats {
    int runs = 0;
    int too_short = 0;
    int angle = 0;
    int invalid_pixels = 0;
    int separation = 0;
    int contrast = 0;
    int flatness = 0;
    int accepted = 0;
};

/// Traces edge chains, splits them into near-straight runs and keeps the
/// runs that pass the contrast, flatness, angle, separation and validity
/// rules. Returned geometry is in the coordinates of `lum`; callers that
/// work on a crop translate with offset_candidates().
std::vector<RoiCandidate> extract_candidates(const Frame& frame, const EdgeMap& edges, const NsSfrParams& params,
                                             const ValidityMap& vmap, CandidateStats* stats = nullptr);

void offset_candidates(std::vector<RoiCandidate>& candidates, Point2i offset);

/// Angular distance (deg) from `angle_deg` to the nearest multiple of 45.
double distance_to_axis_family(double angle_deg);

bool angle_excluded(double angle_deg, double exclusion_deg);

Orientation classify_orientation(double edge_angle_deg);

/// 8-connected chains of edge pixels, traced in raster order.
std::vector<std::vector<Point2i>> trace_chains(const EdgeMap& edges);

/// Splits a chain into runs whose points all lie within `tolerance` px of
/// the chord between the run's end points. Returns [begin, end] index pairs.
std::vector<std::pair<int, int>> split_straight_runs(const std::vector<Point2i>& chain, double tolerance = 1.0);

} // namespace nssfr
