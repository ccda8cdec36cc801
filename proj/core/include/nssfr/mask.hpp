#pragma once

#include "nssfr/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nssfr {

using Polygon = std::vector<Point2d>;

/// Closed polygons outlining the natural scene for one camera. Coordinates
/// refer to an image of `reference_width` x `reference_height` pixels; the
/// first and last vertices are implicitly joined.
struct RegionMask {
    int reference_width = 0;
    int reference_height = 0;
    std::vector<Polygon> polygons;

    /// Throws ConfigError when a polygon has fewer than 3 vertices, a vertex
    /// falls outside the reference frame or a polygon has zero area.
    void validate() const;
};

/// Mask file format: { "reference_size": [w,h], "polygons": [[[x,y],...], ...] }
RegionMask parse_mask_json(const std::string& text);
RegionMask load_mask(const std::filesystem::path& path);
std::string mask_to_json(const RegionMask& mask);

/// Per-pixel validity. `margin` records the exclusion dilation applied so far.
struct ValidityMap {
    Grid<std::uint8_t> valid;
    int margin = 0;

    int width() const { return valid.width(); }
    int height() const { return valid.height(); }
    bool at(int x, int y) const { return valid(x, y) != 0; }
    std::size_t count_valid() const;

    static ValidityMap all_valid(int width, int height);
};

/// Signed shoelace area of a polygon.
double polygon_area(const Polygon& poly);

/// Polygons scaled from the mask reference size to width x height. Throws
/// ConfigError when the target size is not a proportional scaling.
std::vector<Polygon> scaled_polygons(const RegionMask& mask, int width, int height);

/// Even-odd fill of all polygons sampled at pixel centres (x+0.5, y+0.5).
/// Throws ConfigError if the interior covers less than 1% of the image.
ValidityMap rasterize(const RegionMask& mask, int width, int height);

/// Invalidates every pixel closer than `margin` (Chebyshev) to an invalid
/// pixel. Image borders are not treated as invalid.
ValidityMap dilate_exclusion(const ValidityMap& vmap, int margin);

/// Bounding box of the valid pixels. Throws Error if there are none.
RectI valid_bounds(const ValidityMap& vmap);

struct CroppedFrame {
    Frame frame;
    Point2i offset; ///< add to cropped coordinates to get original coordinates
};

/// Crops the frame to the bounding box of valid pixels.
CroppedFrame crop_to_mask(const Frame& frame, const ValidityMap& vmap);

ValidityMap crop_validity(const ValidityMap& vmap, const RectI& box);

} // namespace nssfr
