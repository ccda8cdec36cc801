#pragma once

#include "nssfr/image.hpp"
#include "nssfr/mask.hpp"

#include <vector>

namespace nssfr {

/// Concentric annuli around a reference centre. Segment k covers
/// distances [boundaries[k-1], boundaries[k]) with boundaries[-1] = 0; the
/// outermost segment also includes r_e itself.
struct RadialSegmentation {
    Point2d center;
    double r_e = 0.0;
    std::vector<double> boundaries;

    int n_segments() const { return static_cast<int>(boundaries.size()); }
};

/// Image centre (W/2, H/2) without a mask, otherwise the mean of the valid
/// pixel centres.
Point2d reference_center(const ValidityMap& vmap, bool masked);

/// Largest distance from `center` to the periphery of the valid region.
/// Unmasked: the image corners. Masked: the outer corners of valid pixels on
/// the region boundary.
double max_radius(Point2d center, const ValidityMap& vmap, bool masked);

/// boundaries[k] = r_e * (k+1) / n. Throws ConfigError for n < 2 or r_e <= 0.
std::vector<double> segment_radii(double r_e, int n = 3);

/// boundaries[k] = r_e * ratios[k]. Ratios must be strictly increasing in
/// (0,1] and end at 1.
std::vector<double> segment_radii(double r_e, const std::vector<double>& ratios);

RadialSegmentation build_segmentation(const ValidityMap& vmap, bool masked, int n_segments = 3,
                                      const std::vector<double>& ratios = {});

/// Segment index of a location. Throws Error when the distance exceeds r_e.
int classify_location(Point2d p, const RadialSegmentation& seg);

const char* segment_name(int index, int n_segments);

} // namespace nssfr
