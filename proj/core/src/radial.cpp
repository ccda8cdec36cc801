#include "nssfr/radial.hpp"

#include "nssfr/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nssfr {

Point2d reference_center(const ValidityMap& vmap, bool masked) {
    if (!masked) return {vmap.width() / 2.0, vmap.height() / 2.0};
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < vmap.height(); ++y) {
        const std::uint8_t* row = vmap.valid.row(y);
        for (int x = 0; x < vmap.width(); ++x) {
            if (!row[x]) continue;
            sx += x + 0.5;
            sy += y + 0.5;
            ++n;
        }
    }
    if (n == 0) throw Error("reference_center: no valid pixels");
    return {sx / n, sy / n};
}

namespace {

// Farthest of the four corners of pixel (x, y).
double farthest_corner(Point2d c, int x, int y) {
    const double dx = std::max(std::abs(x - c.x), std::abs(x + 1 - c.x));
    const double dy = std::max(std::abs(y - c.y), std::abs(y + 1 - c.y));
    return std::hypot(dx, dy);
}

} // namespace

double max_radius(Point2d center, const ValidityMap& vmap, bool masked) {
    const double w = vmap.width(), h = vmap.height();
    if (!masked) {
        const double dx = std::max(center.x, w - center.x);
        const double dy = std::max(center.y, h - center.y);
        return std::hypot(dx, dy);
    }
    // Distance to a pixel's far corner is convex along a row, so the maximum
    // over each run of valid pixels is attained at one of its ends.
    double r = 0.0;
    for (int y = 0; y < vmap.height(); ++y) {
        const std::uint8_t* row = vmap.valid.row(y);
        int x = 0;
        while (x < vmap.width()) {
            if (!row[x]) {
                ++x;
                continue;
            }
            const int start = x;
            while (x < vmap.width() && row[x]) ++x;
            r = std::max({r, farthest_corner(center, start, y), farthest_corner(center, x - 1, y)});
        }
    }
    return r;
}

std::vector<double> segment_radii(double r_e, int n) {
    if (n < 2) throw ConfigError("number of radial segments must be >= 2");
    if (!(r_e > 0.0)) throw ConfigError("maximum radius must be > 0");
    std::vector<double> b(n);
    for (int k = 0; k < n; ++k) b[k] = r_e * (k + 1) / n;
    b.back() = r_e;
    return b;
}

std::vector<double> segment_radii(double r_e, const std::vector<double>& ratios) {
    if (ratios.size() < 2) throw ConfigError("segment ratios need at least 2 entries");
    if (!(r_e > 0.0)) throw ConfigError("maximum radius must be > 0");
    double prev = 0.0;
    for (double r : ratios) {
        if (!(r > prev && r <= 1.0)) throw ConfigError("segment ratios must be strictly increasing in (0,1]");
        prev = r;
    }
    if (ratios.back() != 1.0) throw ConfigError("last segment ratio must be 1");
    std::vector<double> b(ratios.size());
    for (std::size_t k = 0; k < ratios.size(); ++k) b[k] = r_e * ratios[k];
    b.back() = r_e;
    return b;
}

RadialSegmentation build_segmentation(const ValidityMap& vmap, bool masked, int n_segments,
                                      const std::vector<double>& ratios) {
    RadialSegmentation seg;
    seg.center = reference_center(vmap, masked);
    seg.r_e = max_radius(seg.center, vmap, masked);
    seg.boundaries = ratios.empty() ? segment_radii(seg.r_e, n_segments) : segment_radii(seg.r_e, ratios);
    return seg;
}

int classify_location(Point2d p, const RadialSegmentation& seg) {
    const double d = std::hypot(p.x - seg.center.x, p.y - seg.center.y);
    if (d > seg.r_e) {
        std::ostringstream os;
        os << "location (" << p.x << "," << p.y << ") lies beyond r_e=" << seg.r_e;
        throw Error(os.str());
    }
    const auto it = std::upper_bound(seg.boundaries.begin(), seg.boundaries.end(), d);
    if (it == seg.boundaries.end()) return seg.n_segments() - 1;
    return static_cast<int>(it - seg.boundaries.begin());
}

const char* segment_name(int index, int n_segments) {
    if (n_segments == 3) {
        static const char* names[] = {"center", "middle", "edge"};
        return names[index];
    }
    if (index == 0) return "center";
    if (index == n_segments - 1) return "edge";
    return "middle";
}

} // namespace nssfr
