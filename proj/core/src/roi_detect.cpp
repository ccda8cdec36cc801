#include "nssfr/roi_detect.hpp"

#include "nssfr/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>

namespace nssfr {

const char* to_string(Orientation o) { return o == Orientation::Horizontal ? "horizontal" : "vertical"; }

bool accepts(OrientationFilter filter, Orientation o) {
    switch (filter) {
    case OrientationFilter::Horizontal: return o == Orientation::Horizontal;
    case OrientationFilter::Vertical: return o == Orientation::Vertical;
    case OrientationFilter::Both: return true;
    }
    return false;
}

void NsSfrParams::validate() const {
    if (!(contrast_min > 0.0 && contrast_min < contrast_max && contrast_max < 1.0)) {
        throw ConfigError("contrast range must satisfy 0 < min < max < 1");
    }
    if (!(st > 0.0)) throw ConfigError("st must be > 0");
    if (esfw < 3) throw ConfigError("esfw must be >= 3");
    if (!(angle_exclusion_deg >= 0.0 && angle_exclusion_deg < 22.5)) {
        throw ConfigError("angle exclusion must be in [0, 22.5)");
    }
    if (edge_fit_order != 1 && edge_fit_order != 3 && edge_fit_order != 5) {
        throw ConfigError("edge fit order must be 1, 3 or 5");
    }
}

double distance_to_axis_family(double angle_deg) {
    const double r = std::fmod(std::fmod(angle_deg, 45.0) + 45.0, 45.0);
    return std::min(r, 45.0 - r);
}

bool angle_excluded(double angle_deg, double exclusion_deg) {
    return distance_to_axis_family(angle_deg) <= exclusion_deg;
}

Orientation classify_orientation(double edge_angle_deg) {
    const double a = std::fmod(std::fmod(edge_angle_deg, 180.0) + 180.0, 180.0);
    return (a > 45.0 && a < 135.0) ? Orientation::Horizontal : Orientation::Vertical;
}

namespace {

// Neighbour order: 4-connected first so staircases are followed without
// leaving single-pixel stubs behind.
constexpr std::array<Point2i, 8> kNeighbours{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};

int degree(const EdgeMap& e, int x, int y) {
    int d = 0;
    for (const auto& o : kNeighbours) {
        const int nx = x + o.x, ny = y + o.y;
        if (nx >= 0 && ny >= 0 && nx < e.width() && ny < e.height() && e(nx, ny)) ++d;
    }
    return d;
}

void extend(const EdgeMap& e, Grid<std::uint8_t>& visited, Point2i p, std::vector<Point2i>& out) {
    for (;;) {
        bool moved = false;
        for (const auto& o : kNeighbours) {
            const int nx = p.x + o.x, ny = p.y + o.y;
            if (nx < 0 || ny < 0 || nx >= e.width() || ny >= e.height()) continue;
            if (!e(nx, ny) || visited(nx, ny)) continue;
            visited(nx, ny) = 1;
            p = {nx, ny};
            out.push_back(p);
            moved = true;
            break;
        }
        if (!moved) return;
    }
}

std::vector<Point2i> trace_from(const EdgeMap& e, Grid<std::uint8_t>& visited, Point2i start) {
    visited(start.x, start.y) = 1;
    std::vector<Point2i> forward{start};
    extend(e, visited, start, forward);
    std::vector<Point2i> backward;
    extend(e, visited, start, backward);
    if (backward.empty()) return forward;
    std::reverse(backward.begin(), backward.end());
    backward.insert(backward.end(), forward.begin(), forward.end());
    return backward;
}

} // namespace

std::vector<std::vector<Point2i>> trace_chains(const EdgeMap& edges) {
    Grid<std::uint8_t> visited(edges.width(), edges.height(), 0);
    std::vector<std::vector<Point2i>> chains;
    for (int pass = 0; pass < 2; ++pass) {
        for (int y = 0; y < edges.height(); ++y) {
            for (int x = 0; x < edges.width(); ++x) {
                if (!edges(x, y) || visited(x, y)) continue;
                if (pass == 0 && degree(edges, x, y) > 1) continue;
                chains.push_back(trace_from(edges, visited, {x, y}));
            }
        }
    }
    return chains;
}

namespace {

void split_recursive(const std::vector<Point2i>& c, int a, int b, double tol, std::vector<std::pair<int, int>>& out) {
    const double ax = c[a].x, ay = c[a].y;
    const double dx = c[b].x - ax, dy = c[b].y - ay;
    const double len = std::hypot(dx, dy);
    double worst = 0.0;
    int worst_i = -1;
    for (int i = a + 1; i < b; ++i) {
        const double px = c[i].x - ax, py = c[i].y - ay;
        const double d = len > 0.0 ? std::abs(px * dy - py * dx) / len : std::hypot(px, py);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst <= tol || worst_i < 0) {
        out.emplace_back(a, b);
        return;
    }
    split_recursive(c, a, worst_i, tol, out);
    split_recursive(c, worst_i, b, tol, out);
}

struct Frame2 {
    double cx, cy; // band centre
    double ux, uy; // along the edge
    double nx, ny; // normal, dark to light
    double s(double x, double y) const { return (x - cx) * ux + (y - cy) * uy; }
    double t(double x, double y) const { return (x - cx) * nx + (y - cy) * ny; }
};

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double stddev() const {
        if (n < 2) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, sum_sq / n - m * m));
    }
};

} // namespace

std::vector<std::pair<int, int>> split_straight_runs(const std::vector<Point2i>& chain, double tolerance) {
    std::vector<std::pair<int, int>> runs;
    if (chain.size() < 2) return runs;
    split_recursive(chain, 0, static_cast<int>(chain.size()) - 1, tolerance, runs);
    return runs;
}

std::vector<RoiCandidate> extract_candidates(const Frame& frame, const EdgeMap& edges, const NsSfrParams& params,
                                             const ValidityMap& vmap, CandidateStats* stats) {
    const LuminanceImage& lum = frame.luminance;
    const int W = lum.width();
    const int H = lum.height();
    if (edges.width() != W || edges.height() != H || vmap.width() != W || vmap.height() != H) {
        throw ConfigError("extract_candidates: inconsistent dimensions");
    }
    CandidateStats local;
    CandidateStats& st = stats ? *stats : local;

    const double half_width = kEsfHalfWidthPx;
    const double tail_start = 0.8 * half_width;
    const double min_length = std::max<double>(kRoiMinLengthPx, 4.0 * params.esfw);
    // Edge pixels closer than this to the run line belong to the run itself.
    constexpr double kSelfBand = 2.0;

    Grid<std::uint8_t> occupied(W, H, 0);
    std::vector<RoiCandidate> out;

    for (const auto& chain : trace_chains(edges)) {
        for (const auto& [a, b] : split_straight_runs(chain, 1.0)) {
            ++st.runs;
            const int n = b - a + 1;
            const double chord = std::hypot(chain[b].x - chain[a].x, chain[b].y - chain[a].y);
            if (chord < min_length) {
                ++st.too_short;
                continue;
            }

            // Principal axis of the run pixels.
            double mx = 0.0, my = 0.0;
            for (int i = a; i <= b; ++i) {
                mx += chain[i].x;
                my += chain[i].y;
            }
            mx /= n;
            my /= n;
            double sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int i = a; i <= b; ++i) {
                const double dx = chain[i].x - mx, dy = chain[i].y - my;
                sxx += dx * dx;
                syy += dy * dy;
                sxy += dx * dy;
            }
            const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
            Frame2 g{mx, my, std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta)};

            double s_min = 1e300, s_max = -1e300;
            for (int i = a; i <= b; ++i) {
                const double s = g.s(chain[i].x, chain[i].y);
                s_min = std::min(s_min, s);
                s_max = std::max(s_max, s);
            }
            const double s_mid = 0.5 * (s_min + s_max);
            g.cx += g.ux * s_mid;
            g.cy += g.uy * s_mid;

            // Bounding box of the band |s| <= hl, |t| <= half_width around
            // the point `shift` px along the run, if it lies on valid pixels.
            auto place = [&](double shift, double hl) -> std::optional<RectI> {
                const double cx = g.cx + shift * g.ux, cy = g.cy + shift * g.uy;
                double bx0 = 1e300, by0 = 1e300, bx1 = -1e300, by1 = -1e300;
                for (int cs : {-1, 1}) {
                    for (int ct : {-1, 1}) {
                        const double x = cx + cs * hl * g.ux + ct * half_width * g.nx;
                        const double y = cy + cs * hl * g.uy + ct * half_width * g.ny;
                        bx0 = std::min(bx0, x);
                        by0 = std::min(by0, y);
                        bx1 = std::max(bx1, x);
                        by1 = std::max(by1, y);
                    }
                }
                const RectI r{static_cast<int>(std::floor(bx0)), static_cast<int>(std::floor(by0)),
                              static_cast<int>(std::ceil(bx1)) - static_cast<int>(std::floor(bx0)) + 1,
                              static_cast<int>(std::ceil(by1)) - static_cast<int>(std::floor(by0)) + 1};
                if (r.x < 0 || r.y < 0 || r.right() > W || r.bottom() > H) return std::nullopt;
                for (int y = r.y; y < r.bottom(); ++y) {
                    for (int x = r.x; x < r.right(); ++x) {
                        if (!vmap.at(x, y)) return std::nullopt;
                    }
                }
                return r;
            };

            // Longest window first, centred first; slide along the run and
            // shrink toward the minimum length until the band fits.
            const double run_half = 0.5 * (s_max - s_min);
            const double min_half = 0.5 * min_length;
            std::vector<double> lengths;
            for (double hl = std::min<double>(0.5 * kRoiMaxLengthPx, run_half); hl > min_half; hl -= 2.0) {
                lengths.push_back(hl);
            }
            lengths.push_back(min_half);
            double half_len = lengths.front();
            std::optional<RectI> placed;
            double shift = 0.0;
            for (double hl : lengths) {
                if (placed) break;
                const double room = std::max(0.0, run_half - hl);
                for (double d = 0.0; !placed && d <= room + 1e-9; d += 2.0) {
                    for (double sgn : {1.0, -1.0}) {
                        if (d == 0.0 && sgn < 0) continue;
                        if ((placed = place(sgn * d, hl))) {
                            shift = sgn * d;
                            half_len = hl;
                            break;
                        }
                    }
                }
            }
            if (!placed) {
                ++st.invalid_pixels;
                continue;
            }
            g.cx += shift * g.ux;
            g.cy += shift * g.uy;
            const RectI box = *placed;

            // Orient the normal from dark to light.
            Moments pos, neg;
            for (int y = box.y; y < box.bottom(); ++y) {
                for (int x = box.x; x < box.right(); ++x) {
                    const double s = g.s(x, y), t = g.t(x, y);
                    if (std::abs(s) > half_len || std::abs(t) > half_width) continue;
                    if (t > 0) pos.add(lum(x, y));
                    if (t < 0) neg.add(lum(x, y));
                }
            }
            if (pos.mean() < neg.mean()) {
                g.nx = -g.nx;
                g.ny = -g.ny;
                g.ux = -g.ux;
                g.uy = -g.uy;
            }
            double angle = std::atan2(g.ny, g.nx) * 180.0 / M_PI;
            if (angle < 0) angle += 360.0;
            if (angle >= 360.0) angle -= 360.0;
            if (angle_excluded(angle, params.angle_exclusion_deg)) {
                ++st.angle;
                continue;
            }

            // Separation: no foreign edge pixel within esfw of the run, and
            // the run must not cut through an already accepted band.
            bool crowded = false;
            {
                const double reach = std::max<double>(params.esfw, half_width);
                const int x0 = std::max(0, box.x - static_cast<int>(std::ceil(reach)));
                const int y0 = std::max(0, box.y - static_cast<int>(std::ceil(reach)));
                const int x1 = std::min(W, box.right() + static_cast<int>(std::ceil(reach)));
                const int y1 = std::min(H, box.bottom() + static_cast<int>(std::ceil(reach)));
                for (int y = y0; y < y1 && !crowded; ++y) {
                    for (int x = x0; x < x1; ++x) {
                        if (!edges(x, y)) continue;
                        const double s = g.s(x, y), t = std::abs(g.t(x, y));
                        if (std::abs(s) > half_len) continue;
                        if (t > kSelfBand && t <= params.esfw) {
                            crowded = true;
                            break;
                        }
                        if (t <= kSelfBand && occupied(x, y)) {
                            crowded = true;
                            break;
                        }
                    }
                }
            }
            if (crowded) {
                ++st.separation;
                continue;
            }

            Moments dark, light;
            for (int y = box.y; y < box.bottom(); ++y) {
                for (int x = box.x; x < box.right(); ++x) {
                    const double s = g.s(x, y), t = g.t(x, y);
                    if (std::abs(s) > half_len || std::abs(t) > half_width) continue;
                    if (t <= -tail_start) dark.add(lum(x, y));
                    if (t >= tail_start) light.add(lum(x, y));
                }
            }
            const double contrast = light.mean() - dark.mean();
            if (contrast < params.contrast_min || contrast > params.contrast_max) {
                ++st.contrast;
                continue;
            }
            if (dark.stddev() > params.st || light.stddev() > params.st) {
                ++st.flatness;
                continue;
            }

            RoiCandidate cand;
            cand.frame_id = frame.id;
            cand.roi_index = static_cast<int>(out.size());
            cand.bbox = box;
            cand.centroid = {g.cx + 0.5, g.cy + 0.5};
            cand.edge_angle_deg = angle;
            cand.contrast = contrast;
            cand.orientation = classify_orientation(angle);
            cand.patch.lum = lum.crop(box);
            cand.patch.support = Grid<std::uint8_t>(box.w, box.h, 0);
            for (int y = box.y; y < box.bottom(); ++y) {
                for (int x = box.x; x < box.right(); ++x) {
                    const double s = g.s(x, y), t = g.t(x, y);
                    if (std::abs(s) <= half_len && std::abs(t) <= half_width) {
                        cand.patch.support(x - box.x, y - box.y) = 1;
                        occupied(x, y) = 1;
                    }
                }
            }
            out.push_back(std::move(cand));
            ++st.accepted;
        }
    }
    return out;
}

void offset_candidates(std::vector<RoiCandidate>& candidates, Point2i offset) {
    for (auto& c : candidates) {
        c.bbox.x += offset.x;
        c.bbox.y += offset.y;
        c.centroid.x += offset.x;
        c.centroid.y += offset.y;
    }
}

} // namespace nssfr
