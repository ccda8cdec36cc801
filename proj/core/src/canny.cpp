#include "nssfr/roi_detect.hpp"

#include "nssfr/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nssfr {
namespace {

constexpr double kSmoothSigma = 1.0;
constexpr double kHighPercentile = 0.90;
constexpr double kLowRatio = 0.4;
// Magnitudes at or below this are rounding residue of a flat region.
constexpr double kNonzeroMagnitude = 1e-6;

LuminanceImage gaussian_smooth(const LuminanceImage& in, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;

    const int w = in.width();
    const int h = in.height();
    LuminanceImage tmp(w, h);
    LuminanceImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * in(std::clamp(x + i, 0, w - 1), y);
            tmp(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp(x, std::clamp(y + i, 0, h - 1));
            out(x, y) = acc;
        }
    }
    return out;
}


bool set_at(const EdgeMap& e, int x, int y) {
    return x >= 0 && y >= 0 && x < e.width() && y < e.height() && e(x, y) != 0;
}

/// Removes L-corner pixels of 4-connected staircases when the remaining
/// neighbourhood stays 8-connected, leaving 8-connected digital lines.
void remove_staircase_corners(EdgeMap& e) {
    constexpr int rx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    constexpr int ry[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    for (int y = 0; y < e.height(); ++y) {
        for (int x = 0; x < e.width(); ++x) {
            if (!e(x, y)) continue;
            const bool horizontal = set_at(e, x - 1, y) || set_at(e, x + 1, y);
            const bool vertical = set_at(e, x, y - 1) || set_at(e, x, y + 1);
            if (!horizontal || !vertical) continue;
            int nx[8], ny[8], count = 0;
            for (int k = 0; k < 8; ++k) {
                if (!set_at(e, x + rx[k], y + ry[k])) continue;
                nx[count] = rx[k];
                ny[count] = ry[k];
                ++count;
            }
            // Flood the neighbours from the first one using 8-adjacency.
            unsigned reached = 1;
            for (bool grew = true; grew;) {
                grew = false;
                for (int i = 0; i < count; ++i) {
                    if (!(reached >> i & 1u)) continue;
                    for (int j = 0; j < count; ++j) {
                        if (reached >> j & 1u) continue;
                        if (std::abs(nx[i] - nx[j]) <= 1 && std::abs(ny[i] - ny[j]) <= 1) {
                            reached |= 1u << j;
                            grew = true;
                        }
                    }
                }
            }
            if (count >= 2 && reached == (1u << count) - 1) e(x, y) = 0;
        }
    }
}

} // namespace

EdgeMap detect_edges(const LuminanceImage& lum, const ValidityMap& vmap) {
    const int w = lum.width();
    const int h = lum.height();
    if (vmap.width() != w || vmap.height() != h) throw ConfigError("detect_edges: validity map size mismatch");

    EdgeMap edges(w, h, 0);
    if (w < 3 || h < 3) return edges;

    const LuminanceImage s = gaussian_smooth(lum, kSmoothSigma);
    LuminanceImage gx(w, h), gy(w, h), mag(w, h);
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(0, y - 1), yp = std::min(h - 1, y + 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(0, x - 1), xp = std::min(w - 1, x + 1);
            const double dx = (s(xp, ym) + 2.0 * s(xp, y) + s(xp, yp)) - (s(xm, ym) + 2.0 * s(xm, y) + s(xm, yp));
            const double dy = (s(xm, yp) + 2.0 * s(x, yp) + s(xp, yp)) - (s(xm, ym) + 2.0 * s(x, ym) + s(xp, ym));
            gx(x, y) = dx;
            gy(x, y) = dy;
            mag(x, y) = std::hypot(dx, dy);
        }
    }

    std::vector<double> nonzero;
    nonzero.reserve(mag.size() / 4);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (vmap.at(x, y) && mag(x, y) > kNonzeroMagnitude) nonzero.push_back(mag(x, y));
        }
    }
    if (nonzero.empty()) return edges;
    const auto nth = nonzero.begin() + static_cast<std::ptrdiff_t>(kHighPercentile * (nonzero.size() - 1));
    std::nth_element(nonzero.begin(), nth, nonzero.end());
    const double high = *nth;
    const double low = kLowRatio * high;

    // Non-maximum suppression along the quantized gradient direction.
    Grid<std::uint8_t> thin(w, h, 0); // 0 none, 1 weak, 2 strong
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double m = mag(x, y);
            if (m < low || m <= kNonzeroMagnitude) continue;
            double angle = std::atan2(gy(x, y), gx(x, y)) * 180.0 / M_PI;
            if (angle < 0) angle += 180.0;
            int dx = 1, dy = 0;
            if (angle >= 22.5 && angle < 67.5) {
                dx = 1;
                dy = 1;
            } else if (angle >= 67.5 && angle < 112.5) {
                dx = 0;
                dy = 1;
            } else if (angle >= 112.5 && angle < 157.5) {
                dx = -1;
                dy = 1;
            }
            const double ahead = mag(x + dx, y + dy);
            const double behind = mag(x - dx, y - dy);
            if (m > ahead && m >= behind) thin(x, y) = m >= high ? 2 : 1;
        }
    }

    // Hysteresis: keep weak pixels 8-connected to a strong one.
    std::vector<Point2i> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (thin(x, y) != 2 || edges(x, y)) continue;
            edges(x, y) = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Point2i p = stack.back();
                stack.pop_back();
                for (int ny = std::max(0, p.y - 1); ny <= std::min(h - 1, p.y + 1); ++ny) {
                    for (int nx = std::max(0, p.x - 1); nx <= std::min(w - 1, p.x + 1); ++nx) {
                        if (thin(nx, ny) && !edges(nx, ny)) {
                            edges(nx, ny) = 1;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!vmap.at(x, y)) edges(x, y) = 0;
        }
    }
    remove_staircase_corners(edges);
    return edges;
}

} // namespace nssfr
